#include "soup/poisson_chaos.hpp"

#include <cmath>

#include "soup/combinatorics.hpp"

namespace soup {

SoupFunctional make_functional(const LoopMeasure& measure, OccupationPolynomial poly) {
    SoupFunctional f;
    f.mu_mean = measure.mu_expectation(poly);
    f.poly = std::move(poly);
    f.kernel = &measure.kernel();
    return f;
}

SoupFunctional product_functional(const LoopMeasure& measure, const SoupFunctional& a,
                                  const SoupFunctional& b) {
    return make_functional(measure, a.poly * b.poly);
}

namespace {

// per-subset sums S[mask] = sum over loops of prod_{j in mask} g_j(loop)
std::vector<double> subset_power_sums(const LoopSoup& soup, const std::vector<SoupFunctional>& gs) {
    const int n = static_cast<int>(gs.size());
    std::vector<double> s(static_cast<std::size_t>(1) << n, 0.0);
    std::vector<double> vals(n);
    for (const BasedLoop& loop : soup.loops) {
        for (int j = 0; j < n; ++j) vals[j] = gs[j](loop);
        for (std::size_t mask = 1; mask < s.size(); ++mask) {
            double p = 1.0;
            for (int j = 0; j < n; ++j)
                if (mask & (1ULL << j)) p *= vals[j];
            s[mask] += p;
        }
    }
    return s;
}

double phi_from_sums(const std::vector<double>& sums, const std::vector<int>& indices) {
    const int n = static_cast<int>(indices.size());
    if (n == 0) return 1.0;
    double total = 0.0;
    for_each_separated_partition(n, {}, 1, [&](const std::vector<std::vector<int>>& blocks) {
        double term = 1.0;
        for (const auto& block : blocks) {
            std::size_t mask = 0;
            for (int e : block) mask |= 1ULL << indices[e];
            double sign = block.size() % 2 == 1 ? 1.0 : -1.0;
            double fact = 1.0;
            for (std::size_t i = 2; i < block.size(); ++i) fact *= static_cast<double>(i);
            term *= sign * fact * sums[mask];
        }
        total += term;
    });
    return total;
}

}  // namespace

double phi_n(const LoopSoup& soup, const std::vector<SoupFunctional>& gs) {
    const int n = static_cast<int>(gs.size());
    if (n == 0) return 1.0;
    std::vector<double> sums = subset_power_sums(soup, gs);
    std::vector<int> all(n);
    for (int j = 0; j < n; ++j) all[j] = j;
    return phi_from_sums(sums, all);
}

double phi_n_direct(const LoopSoup& soup, const std::vector<SoupFunctional>& gs) {
    const int n = static_cast<int>(gs.size());
    if (n == 0) return 1.0;
    const int L = static_cast<int>(soup.loops.size());
    if (L < n) return 0.0;
    std::vector<std::vector<double>> vals(n, std::vector<double>(L));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < L; ++i) vals[j][i] = gs[j](soup.loops[i]);
    std::vector<int> pick(n, -1);
    std::vector<char> used(L, 0);
    double total = 0.0;
    std::function<void(int, double)> rec = [&](int j, double prod) {
        if (j == n) {
            total += prod;
            return;
        }
        for (int i = 0; i < L; ++i) {
            if (used[i]) continue;
            used[i] = 1;
            rec(j + 1, prod * vals[j][i]);
            used[i] = 0;
        }
    };
    rec(0, 1.0);
    return total;
}

double I_n(const LoopSoup& soup, double alpha, const std::vector<SoupFunctional>& gs) {
    const int n = static_cast<int>(gs.size());
    if (n == 0) return 1.0;
    std::vector<double> sums = subset_power_sums(soup, gs);
    double total = 0.0;
    for (std::size_t mask = 0; mask < (static_cast<std::size_t>(1) << n); ++mask) {
        std::vector<int> inside;
        double outside = 1.0;
        for (int j = 0; j < n; ++j) {
            if (mask & (1ULL << j))
                inside.push_back(j);
            else
                outside *= alpha * gs[j].mu_mean;
        }
        double sign = (n - static_cast<int>(inside.size())) % 2 == 0 ? 1.0 : -1.0;
        total += sign * phi_from_sums(sums, inside) * outside;
    }
    return total;
}

double exp_chaos(const LoopSoup& soup, double alpha,
                 const std::function<double(const BasedLoop&)>& g, double mu_g) {
    double prod = 1.0;
    for (const BasedLoop& loop : soup.loops) prod *= 1.0 + g(loop);
    return prod * std::exp(-alpha * mu_g);
}

double exp_chaos(const LoopSoup& soup, double alpha, const SoupFunctional& g) {
    double prod = 1.0;
    for (const BasedLoop& loop : soup.loops) prod *= 1.0 + g(loop);
    return prod * std::exp(-alpha * g.mu_mean);
}

double wick_expand_residual(const LoopSoup& soup, const LoopMeasure& measure,
                            const std::vector<int>& layout, const std::vector<SoupFunctional>& gs) {
    int p = 0;
    std::vector<std::pair<int, int>> windows;
    for (int n_m : layout) {
        windows.emplace_back(p, p + n_m - 1);
        p += n_m;
    }
    if (p != static_cast<int>(gs.size()))
        throw Error("wick_expand_residual: layout does not cover the functional list");

    double lhs = 1.0;
    int offset = 0;
    for (int n_m : layout) {
        std::vector<SoupFunctional> block(gs.begin() + offset, gs.begin() + offset + n_m);
        lhs *= phi_n(soup, block);
        offset += n_m;
    }

    double rhs = 0.0;
    for_each_separated_partition(p, windows, 1, [&](const std::vector<std::vector<int>>& blocks) {
        std::vector<SoupFunctional> merged;
        for (const auto& block : blocks) {
            SoupFunctional f = gs[block[0]];
            for (std::size_t i = 1; i < block.size(); ++i)
                f = product_functional(measure, f, gs[block[i]]);
            merged.push_back(std::move(f));
        }
        rhs += phi_n(soup, merged);
    });
    return lhs - rhs;
}

CoupledSoupPair sample_coupled_pair(const LoopMeasure& measure, double alpha, double alpha_prime,
                                    Rng& rng) {
    CoupledSoupPair pair;
    pair.alpha = alpha;
    pair.alpha_prime = alpha_prime;
    pair.base = measure.sample(alpha, rng);
    pair.extension = measure.sample(alpha_prime, rng);
    return pair;
}

double martingale_decompose_residual(const CoupledSoupPair& pair,
                                     const std::vector<SoupFunctional>& gs) {
    const int n = static_cast<int>(gs.size());
    LoopSoup combined = pair.combined();
    double lhs = I_n(combined, pair.alpha + pair.alpha_prime, gs);
    double rhs = 0.0;
    for (std::size_t mask = 0; mask < (static_cast<std::size_t>(1) << n); ++mask) {
        std::vector<SoupFunctional> in, out;
        for (int j = 0; j < n; ++j) {
            if (mask & (1ULL << j))
                in.push_back(gs[j]);
            else
                out.push_back(gs[j]);
        }
        rhs += I_n(pair.base, pair.alpha, in) * I_n(pair.extension, pair.alpha_prime, out);
    }
    return lhs - rhs;
}

}  // namespace soup
