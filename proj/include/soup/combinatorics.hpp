#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "soup/util.hpp"

namespace soup {

// Positions are 0-based throughout: a layout (n_1,...,n_k) covers positions
// [0, n) with block 0 first.
struct BlockLayout {
    std::vector<int> sizes;

    explicit BlockLayout(std::vector<int> s) : sizes(std::move(s)) {
        block_of_.reserve(total());
        for (std::size_t b = 0; b < sizes.size(); ++b)
            for (int i = 0; i < sizes[b]; ++i) block_of_.push_back(static_cast<int>(b));
    }
    int total() const {
        int n = 0;
        for (int s : sizes) n += s;
        return n;
    }
    int num_blocks() const { return static_cast<int>(sizes.size()); }
    int block_of(int pos) const { return block_of_[pos]; }

  private:
    std::vector<int> block_of_;
};

// A cyclic alternation on a circle of n slots is possible iff no block
// holds more than half the slots.
bool alternation_feasible(const BlockLayout& layout);

// --- enumeration families ---------------------------------------------------

// Cyclic orders of [0,k): each yielded as a sequence starting at 0; there
// are (k-1)! of them, in lexicographic order.
void for_each_circular_permutation(int k, const std::function<void(const std::vector<int>&)>& visit);
std::vector<std::vector<int>> circular_permutations(int k);

// Maps [0,n) -> blocks with prescribed fiber sizes and pi(j+1) != pi(j)
// cyclically. Lexicographic in the value sequence.
void for_each_alternating_map(const BlockLayout& layout,
                              const std::function<void(const std::vector<int>&)>& visit);
std::vector<std::vector<int>> alternating_maps(const BlockLayout& layout);

// Permutations pi of [0,n) with block(pi(j)) != block(j) for every j;
// with same_cycle, additionally every block lies inside a single cycle of
// pi. Yields one-line notation, lexicographic.
void for_each_alternating_cycle_perm(const BlockLayout& layout, bool same_cycle,
                                     const std::function<void(const std::vector<int>&)>& visit);
std::vector<std::vector<int>> alternating_cycle_perms(const BlockLayout& layout, bool same_cycle);

// Partitions of [0,p) whose blocks all have size >= min_block and meet
// each window (inclusive index ranges, pairwise disjoint) at most once.
// Blocks are listed by least element; elements sorted within blocks.
void for_each_separated_partition(int p, const std::vector<std::pair<int, int>>& windows,
                                  int min_block,
                                  const std::function<void(const std::vector<std::vector<int>>&)>& visit);
std::vector<std::vector<std::vector<int>>> separated_partitions(
    int p, const std::vector<std::pair<int, int>>& windows, int min_block);

// --- cycle utilities --------------------------------------------------------

std::vector<std::vector<int>> cycles_of(const std::vector<int>& perm);
int cycle_count(const std::vector<int>& perm);

// Histogram c(pi) -> #permutations over the alternating family; evaluating
// sum_c hist[c] * alpha^c recovers the cycle-weighted sum for any alpha.
std::map<int, long long> alternating_cycle_histogram(const BlockLayout& layout, bool same_cycle);

// --- chain/circuit index and counting ---------------------------------------

// Multiplicities of chain orders (k_i, i>=1) and circuit orders (m_j, j>=2).
struct SigmaIndex {
    std::vector<long> chains;    // chains[i] = k_{i+1}
    std::vector<long> circuits;  // circuits[j] = m_{j+2}

    long weight() const;       // |sigma|
    long weight_plus() const;  // |sigma|_+
    bool zero() const { return weight() == 0; }
};

// n!/(prod_j m_j! j^{m_j}) * (n-|sigma|)! / (prod_i k_i! (n-|sigma|_+)!)
// Requires |sigma|_+ <= n.  Exact integer arithmetic internally.
double remove_relabel_count(const SigmaIndex& sigma, int n);

// n! alpha(alpha+1)...(alpha+n-1)
double rising_factorial_sum(int n, double alpha);

// --- brute-force checks for the counting formula ----------------------------

// Enumerates the relevant permutation family on m low + n high elements,
// keeps those whose high part realizes sigma, applies remove-and-relabel
// and tallies preimages per reduced permutation. `with_circuits` selects
// the multi-cycle family (fixed-point-free permutations) instead of the
// single-circle one. Returns the multiset of fiber sizes keyed by the
// reduced permutation's one-line notation.
std::map<std::vector<int>, long long> remove_relabel_fibers(const SigmaIndex& sigma, int m, int n,
                                                            bool with_circuits);

}  // namespace soup
