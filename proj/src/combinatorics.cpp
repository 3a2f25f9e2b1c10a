#include "soup/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace soup {

bool alternation_feasible(const BlockLayout& layout) {
    int n = layout.total();
    int mx = 0;
    for (int s : layout.sizes) mx = std::max(mx, s);
    return 2 * mx <= n;
}

void for_each_circular_permutation(int k, const std::function<void(const std::vector<int>&)>& visit) {
    if (k < 1) throw Error("circular_permutations: k >= 1 required");
    std::vector<int> seq(k);
    seq[0] = 0;
    std::vector<int> rest(k - 1);
    std::iota(rest.begin(), rest.end(), 1);
    do {
        std::copy(rest.begin(), rest.end(), seq.begin() + 1);
        visit(seq);
    } while (std::next_permutation(rest.begin(), rest.end()));
}

std::vector<std::vector<int>> circular_permutations(int k) {
    std::vector<std::vector<int>> out;
    for_each_circular_permutation(k, [&](const std::vector<int>& s) { out.push_back(s); });
    return out;
}

void for_each_alternating_map(const BlockLayout& layout,
                              const std::function<void(const std::vector<int>&)>& visit) {
    const int n = layout.total();
    const int k = layout.num_blocks();
    if (k < 2) throw Error("alternating_maps: k >= 2 required");
    std::vector<int> remaining(layout.sizes.begin(), layout.sizes.end());
    std::vector<int> seq(n, -1);
    std::function<void(int)> rec = [&](int j) {
        if (j == n) {
            if (seq[n - 1] != seq[0]) visit(seq);
            return;
        }
        for (int b = 0; b < k; ++b) {
            if (remaining[b] == 0) continue;
            if (j > 0 && seq[j - 1] == b) continue;
            seq[j] = b;
            --remaining[b];
            rec(j + 1);
            ++remaining[b];
        }
        seq[j] = -1;
    };
    rec(0);
}

std::vector<std::vector<int>> alternating_maps(const BlockLayout& layout) {
    std::vector<std::vector<int>> out;
    for_each_alternating_map(layout, [&](const std::vector<int>& s) { out.push_back(s); });
    return out;
}

namespace {

// Walks the partially built permutation from `start`; returns the cycle if
// it closed, empty if it ran into an unassigned slot.
std::vector<int> closed_cycle_through(const std::vector<int>& perm, int start) {
    std::vector<int> cyc{start};
    int cur = perm[start];
    while (cur != -1 && cur != start) {
        cyc.push_back(cur);
        cur = perm[cur];
    }
    if (cur == start) return cyc;
    return {};
}

}  // namespace

void for_each_alternating_cycle_perm(const BlockLayout& layout, bool same_cycle,
                                     const std::function<void(const std::vector<int>&)>& visit) {
    const int n = layout.total();
    if (n < 1) throw Error("alternating_cycle_perms: empty layout");
    std::vector<int> perm(n, -1);
    std::vector<char> used(n, 0);
    std::vector<int> block_size(layout.sizes.begin(), layout.sizes.end());

    std::function<void(int)> rec = [&](int j) {
        if (j == n) {
            visit(perm);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            if (layout.block_of(v) == layout.block_of(j)) continue;
            perm[j] = v;
            used[v] = 1;
            bool ok = true;
            if (same_cycle) {
                // when a cycle closes, every block it touches must be inside it
                std::vector<int> cyc = closed_cycle_through(perm, j);
                if (!cyc.empty()) {
                    std::vector<int> in_cycle_per_block(layout.num_blocks(), 0);
                    for (int e : cyc) ++in_cycle_per_block[layout.block_of(e)];
                    for (int e : cyc) {
                        int b = layout.block_of(e);
                        if (in_cycle_per_block[b] != block_size[b]) {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if (ok) rec(j + 1);
            used[v] = 0;
            perm[j] = -1;
        }
    };
    rec(0);
}

std::vector<std::vector<int>> alternating_cycle_perms(const BlockLayout& layout, bool same_cycle) {
    std::vector<std::vector<int>> out;
    for_each_alternating_cycle_perm(layout, same_cycle,
                                    [&](const std::vector<int>& p) { out.push_back(p); });
    return out;
}

void for_each_separated_partition(int p, const std::vector<std::pair<int, int>>& windows,
                                  int min_block,
                                  const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
    if (p < 0) throw Error("separated_partitions: p >= 0 required");
    // window id per element, -1 when uncovered
    std::vector<int> win_of(p, -1);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (int e = windows[w].first; e <= windows[w].second; ++e) {
            if (e < 0 || e >= p) throw Error("separated_partitions: window out of range");
            if (win_of[e] != -1) throw Error("separated_partitions: windows must be disjoint");
            win_of[e] = static_cast<int>(w);
        }
    }
    std::vector<std::vector<int>> blocks;
    std::vector<std::uint64_t> block_windows;  // bitmask of windows met

    std::function<void(int)> rec = [&](int e) {
        if (e == p) {
            for (const auto& b : blocks)
                if (static_cast<int>(b.size()) < min_block) return;
            visit(blocks);
            return;
        }
        // prune: every deficient block still needs members
        int deficit = 0;
        for (const auto& b : blocks) deficit += std::max(0, min_block - static_cast<int>(b.size()));
        if (deficit > p - e) return;

        std::uint64_t ebit = win_of[e] >= 0 ? (1ULL << win_of[e]) : 0ULL;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (ebit && (block_windows[i] & ebit)) continue;
            blocks[i].push_back(e);
            block_windows[i] |= ebit;
            rec(e + 1);
            block_windows[i] &= ~ebit;
            blocks[i].pop_back();
        }
        blocks.push_back({e});
        block_windows.push_back(ebit);
        rec(e + 1);
        blocks.pop_back();
        block_windows.pop_back();
    };
    rec(0);
}

std::vector<std::vector<std::vector<int>>> separated_partitions(
    int p, const std::vector<std::pair<int, int>>& windows, int min_block) {
    std::vector<std::vector<std::vector<int>>> out;
    for_each_separated_partition(p, windows, min_block,
                                 [&](const std::vector<std::vector<int>>& b) { out.push_back(b); });
    return out;
}

std::vector<std::vector<int>> cycles_of(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> cycles;
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        int cur = i;
        while (!seen[cur]) {
            seen[cur] = 1;
            cyc.push_back(cur);
            cur = perm[cur];
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

int cycle_count(const std::vector<int>& perm) { return static_cast<int>(cycles_of(perm).size()); }

std::map<int, long long> alternating_cycle_histogram(const BlockLayout& layout, bool same_cycle) {
    std::map<int, long long> hist;
    for_each_alternating_cycle_perm(layout, same_cycle, [&](const std::vector<int>& p) {
        ++hist[cycle_count(p)];
    });
    return hist;
}

long SigmaIndex::weight() const {
    long w = 0;
    for (std::size_t i = 0; i < chains.size(); ++i) w += static_cast<long>(i + 1) * chains[i];
    for (std::size_t j = 0; j < circuits.size(); ++j) w += static_cast<long>(j + 2) * circuits[j];
    return w;
}

long SigmaIndex::weight_plus() const {
    long w = 0;
    for (std::size_t i = 0; i < chains.size(); ++i) w += static_cast<long>(i + 2) * chains[i];
    for (std::size_t j = 0; j < circuits.size(); ++j) w += static_cast<long>(j + 2) * circuits[j];
    return w;
}

namespace {

using int128 = unsigned __int128;

int128 factorial128(int n) {
    int128 f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<unsigned>(i);
    return f;
}

}  // namespace

double remove_relabel_count(const SigmaIndex& sigma, int n) {
    const long w = sigma.weight();
    const long wp = sigma.weight_plus();
    if (wp > n) throw Error("remove_relabel_count: |sigma|_+ exceeds n");
    int128 num = factorial128(n) * factorial128(static_cast<int>(n - w));
    int128 den = factorial128(static_cast<int>(n - wp));
    for (std::size_t i = 0; i < sigma.chains.size(); ++i)
        den *= factorial128(static_cast<int>(sigma.chains[i]));
    for (std::size_t j = 0; j < sigma.circuits.size(); ++j) {
        den *= factorial128(static_cast<int>(sigma.circuits[j]));
        for (long c = 0; c < sigma.circuits[j]; ++c) den *= static_cast<unsigned>(j + 2);
    }
    return static_cast<double>(num / den);
}

double rising_factorial_sum(int n, double alpha) {
    if (n < 1) throw Error("rising_factorial_sum: n >= 1 required");
    double v = 1.0;
    for (int i = 1; i <= n; ++i) v *= static_cast<double>(i);
    for (int i = 0; i < n; ++i) v *= alpha + static_cast<double>(i);
    return v;
}

// --- brute force for the remove-and-relabel counting ------------------------

namespace {

bool sigma_matches(const SigmaIndex& sigma, const std::vector<long>& kcounts,
                   const std::vector<long>& mcounts) {
    auto eq = [](const std::vector<long>& a, const std::vector<long>& b) {
        std::size_t n = std::max(a.size(), b.size());
        for (std::size_t i = 0; i < n; ++i) {
            long x = i < a.size() ? a[i] : 0;
            long y = i < b.size() ? b[i] : 0;
            if (x != y) return false;
        }
        return true;
    };
    return eq(sigma.chains, kcounts) && eq(sigma.circuits, mcounts);
}

// relabels surviving high values by order of first appearance
std::vector<int> relabel(const std::vector<std::vector<int>>& cycles, int m) {
    std::map<int, int> new_label;
    int next = m;
    for (const auto& cyc : cycles)
        for (int v : cyc)
            if (v >= m && !new_label.count(v)) new_label[v] = next++;
    int total = 0;
    for (const auto& cyc : cycles) total += static_cast<int>(cyc.size());
    std::vector<int> perm(total, -1);
    auto lab = [&](int v) { return v < m ? v : new_label.at(v); };
    for (const auto& cyc : cycles)
        for (std::size_t i = 0; i < cyc.size(); ++i)
            perm[lab(cyc[i])] = lab(cyc[(i + 1) % cyc.size()]);
    return perm;
}

}  // namespace

std::map<std::vector<int>, long long> remove_relabel_fibers(const SigmaIndex& sigma, int m, int n,
                                                            bool with_circuits) {
    const int M = m + n;
    if (M > 9) throw EnumerationBudget("remove_relabel_fibers: m + n too large for brute force");
    std::map<std::vector<int>, long long> fibers;

    auto process_cycles = [&](const std::vector<std::vector<int>>& cycles) {
        std::vector<long> kcounts, mcounts;
        std::vector<std::vector<int>> reduced;
        for (const auto& cyc0 : cycles) {
            bool all_high = true;
            int low_at = -1;
            for (std::size_t i = 0; i < cyc0.size(); ++i)
                if (cyc0[i] < m) {
                    all_high = false;
                    low_at = static_cast<int>(i);
                    break;
                }
            if (all_high) {
                if (!with_circuits) return;  // circle family has no room for circuits
                std::size_t j = cyc0.size();
                if (j < 2) return;  // high fixed point: outside every sigma family
                if (mcounts.size() < j - 1) mcounts.resize(j - 1, 0);
                ++mcounts[j - 2];
                continue;  // removed entirely
            }
            // rotate so the cycle starts low, so no run wraps
            std::vector<int> cyc(cyc0.begin() + low_at, cyc0.end());
            cyc.insert(cyc.end(), cyc0.begin(), cyc0.begin() + low_at);
            std::vector<int> out;
            std::vector<int> run;
            auto flush = [&]() {
                if (run.empty()) return;
                if (run.size() >= 2) {
                    if (kcounts.size() < run.size() - 1) kcounts.resize(run.size() - 1, 0);
                    ++kcounts[run.size() - 2];
                }
                out.push_back(run.front());  // keep the first element of a run
                run.clear();
            };
            for (int v : cyc) {
                if (v >= m) {
                    run.push_back(v);
                } else {
                    flush();
                    out.push_back(v);
                }
            }
            flush();
            reduced.push_back(std::move(out));
        }
        if (!sigma_matches(sigma, kcounts, mcounts)) return;
        ++fibers[relabel(reduced, m)];
    };

    if (with_circuits) {
        // fixed-point-free permutations of [0, M)
        std::vector<int> perm(M);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            bool fpf = true;
            for (int i = 0; i < M; ++i)
                if (perm[i] == i) {
                    fpf = false;
                    break;
                }
            if (!fpf) continue;
            process_cycles(cycles_of(perm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        for_each_circular_permutation(M, [&](const std::vector<int>& seq) {
            process_cycles({seq});
        });
    }
    return fibers;
}

}  // namespace soup
