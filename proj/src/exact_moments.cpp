#include "soup/exact_moments.hpp"

#include <cmath>
#include <functional>

#include "soup/combinatorics.hpp"

namespace soup {

namespace {

constexpr int kEnumerationCap = 12;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

BlockLayout layout_of(const std::vector<BlockSpec>& blocks) {
    std::vector<int> sizes;
    for (const auto& b : blocks) sizes.push_back(b.n);
    return BlockLayout(sizes);
}

// Sums prod over directed edges u(x_{from}, x_{to})^count against the block
// measures, iterating over the product of supports.
double edge_weighted_state_sum(const MarkovKernel& kernel, const std::vector<BlockSpec>& blocks,
                               const std::map<std::pair<int, int>, int>& edge_counts) {
    const int k = static_cast<int>(blocks.size());
    std::vector<std::vector<int>> supports;
    for (const auto& b : blocks) supports.push_back(b.nu.support());
    std::vector<int> x(k, 0);
    double total = 0.0;
    std::function<void(int, double)> rec = [&](int b, double w) {
        if (b == k) {
            double prod = w;
            for (const auto& [edge, cnt] : edge_counts) {
                double uv = kernel.u(x[edge.first], x[edge.second]);
                for (int i = 0; i < cnt; ++i) prod *= uv;
            }
            total += prod;
            return;
        }
        for (int s : supports[b]) {
            x[b] = s;
            rec(b + 1, w * blocks[b].nu(s));
        }
    };
    rec(0, 1.0);
    return total;
}

std::map<int, double> soup_joint_family(const MarkovKernel& kernel,
                                        const std::vector<BlockSpec>& blocks, bool same_cycle) {
    const int k = static_cast<int>(blocks.size());
    if (k < 1) throw Error("soup moment: at least one block required");
    BlockLayout layout = layout_of(blocks);
    const int n = layout.total();
    if (n > kEnumerationCap) throw EnumerationBudget("soup moment: total order exceeds 12");
    std::map<int, double> by_cycles;
    for_each_alternating_cycle_perm(layout, same_cycle, [&](const std::vector<int>& perm) {
        std::map<std::pair<int, int>, int> edges;
        for (int j = 0; j < n; ++j) ++edges[{layout.block_of(j), layout.block_of(perm[j])}];
        by_cycles[cycle_count(perm)] += edge_weighted_state_sum(kernel, blocks, edges);
    });
    return by_cycles;
}

double substitute_alpha(const std::map<int, double>& poly, double alpha) {
    double v = 0.0;
    for (const auto& [c, coeff] : poly) v += coeff * std::pow(alpha, c);
    return v;
}

}  // namespace

double mu_joint_L(const MarkovKernel& kernel, const std::vector<BlockSpec>& blocks) {
    const int k = static_cast<int>(blocks.size());
    if (k < 2) throw Error("mu_joint_L: k >= 2 required");
    BlockLayout layout = layout_of(blocks);
    const int n = layout.total();
    if (n > kEnumerationCap) throw EnumerationBudget("mu_joint_L: total order exceeds 12");
    double sum = 0.0;
    for_each_alternating_map(layout, [&](const std::vector<int>& seq) {
        std::map<std::pair<int, int>, int> edges;
        for (int j = 0; j < n; ++j) ++edges[{seq[j], seq[(j + 1) % n]}];
        sum += edge_weighted_state_sum(kernel, blocks, edges);
    });
    double lead = 1.0;
    for (const auto& b : blocks) lead *= factorial(b.n);
    return lead / static_cast<double>(n) * sum;
}

std::map<int, double> soup_joint_psi_poly(const MarkovKernel& kernel,
                                          const std::vector<BlockSpec>& blocks) {
    return soup_joint_family(kernel, blocks, true);
}

double soup_joint_psi(const MarkovKernel& kernel, double alpha,
                      const std::vector<BlockSpec>& blocks) {
    return substitute_alpha(soup_joint_psi_poly(kernel, blocks), alpha);
}

std::map<int, double> soup_joint_psitilde_poly(const MarkovKernel& kernel,
                                               const std::vector<BlockSpec>& blocks) {
    return soup_joint_family(kernel, blocks, false);
}

double soup_joint_psitilde(const MarkovKernel& kernel, double alpha,
                           const std::vector<BlockSpec>& blocks) {
    return substitute_alpha(soup_joint_psitilde_poly(kernel, blocks), alpha);
}

double soup_joint_psi_partition_route(const MarkovKernel& kernel, double alpha,
                                      const std::vector<BlockSpec>& blocks) {
    const int k = static_cast<int>(blocks.size());
    double total = 0.0;
    for_each_separated_partition(k, {}, 2, [&](const std::vector<std::vector<int>>& parts) {
        double prod = 1.0;
        for (const auto& part : parts) {
            std::vector<BlockSpec> sub;
            for (int i : part) sub.push_back(blocks[i]);
            prod *= alpha * mu_joint_L(kernel, sub);
        }
        total += prod;
    });
    return total;
}

namespace {

double separated_partition_sum(const LoopMeasure& measure, double alpha,
                               const std::vector<int>& layout,
                               const std::vector<SoupFunctional>& gs, int min_block) {
    int p = 0;
    std::vector<std::pair<int, int>> windows;
    for (int n_m : layout) {
        windows.emplace_back(p, p + n_m - 1);
        p += n_m;
    }
    if (p != static_cast<int>(gs.size()))
        throw Error("poisson moment: layout does not cover the functional list");
    double total = 0.0;
    for_each_separated_partition(p, windows, min_block,
                                 [&](const std::vector<std::vector<int>>& parts) {
                                     double prod = 1.0;
                                     for (const auto& part : parts) {
                                         OccupationPolynomial poly = gs[part[0]].poly;
                                         for (std::size_t i = 1; i < part.size(); ++i)
                                             poly = poly * gs[part[i]].poly;
                                         prod *= alpha * measure.mu_expectation(poly);
                                     }
                                     total += prod;
                                 });
    return total;
}

}  // namespace

double poisson_joint_phi(const LoopMeasure& measure, double alpha, const std::vector<int>& layout,
                         const std::vector<SoupFunctional>& gs) {
    return separated_partition_sum(measure, alpha, layout, gs, 1);
}

double poisson_joint_I(const LoopMeasure& measure, double alpha, const std::vector<int>& layout,
                       const std::vector<SoupFunctional>& gs) {
    return separated_partition_sum(measure, alpha, layout, gs, 2);
}

double I_ll_covariance(const MarkovKernel& kernel, double alpha, const std::vector<int>& ls,
                       const std::vector<int>& ls_prime, const PointMeasure& nu,
                       const PointMeasure& nu_prime) {
    // degree vectors must match
    std::map<int, int> deg, deg_prime;
    for (int l : ls) ++deg[l];
    for (int l : ls_prime) ++deg_prime[l];
    if (deg != deg_prime) return 0.0;
    double e = 1.0;  // prod m_i(l)!
    for (const auto& [l, m] : deg) e *= factorial(m);
    double total = 0.0;
    for (int x : nu.support()) {
        for (int y : nu_prime.support()) {
            double uu = kernel.u(x, y) * kernel.u(y, x);
            double prod = 1.0;
            for (int l : ls)
                prod *= alpha * factorial(l) * factorial(l - 1) * std::pow(uu, l);
            total += nu(x) * nu_prime(y) * prod;
        }
    }
    return e * total;
}

double theta_mean(const MarkovKernel& kernel, double alpha, const PointMeasure& rho,
                  const PointMeasure& phi) {
    double total = 0.0;
    for (int x : rho.support())
        for (int y : phi.support())
            total += rho(x) * phi(y) * kernel.u(x, y) * kernel.u(y, x);
    return alpha * total;
}

}  // namespace soup
