#include "soup/isomorphism.hpp"

#include <cmath>

#include "soup/exact_moments.hpp"
#include "soup/mc_engine.hpp"

namespace soup {

TestFunction test_function_const_one() {
    return {"const_one", [](const std::vector<double>&) { return 1.0; }, 1.0};
}

TestFunction test_function_inv_quadratic() {
    return {"inv_quadratic",
            [](const std::vector<double>& v) {
                double p = 1.0;
                for (double x : v) p *= 1.0 / (1.0 + x * x);
                return p;
            },
            1.0};
}

TestFunction test_function_cos() {
    return {"cos",
            [](const std::vector<double>& v) {
                double p = 1.0;
                for (double x : v) p *= std::cos(x);
                return p;
            },
            1.0};
}

WeightedLoop sample_weighted_extra_loop(const LoopMeasure& measure, const PointMeasure& rho,
                                        const PointMeasure& phi, Rng& rng) {
    WeightedLoop wl;
    wl.loop = measure.sample_single_loop(rng);
    double lr = 0.0, lp = 0.0;
    for (int x : rho.support()) lr += rho(x) * wl.loop.occupation(x);
    for (int x : phi.support()) lp += phi(x) * wl.loop.occupation(x);
    wl.weight = measure.total_sampled_mass() * lr * lp;
    return wl;
}

namespace {

double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

IsoReport two_sample(const Welford& lhs, const Welford& rhs, double yardstick) {
    IsoReport r;
    r.lhs = lhs.mean();
    r.lhs_se = lhs.stderror();
    r.rhs = rhs.mean();
    r.rhs_se = rhs.stderror();
    r.z = (r.lhs - r.rhs) / std::sqrt(r.lhs_se * r.lhs_se + r.rhs_se * r.rhs_se);
    r.samples = lhs.count() + rhs.count();
    // estimates can legitimately sit near zero (odd test functions), so the
    // scale is floored at a tenth of the functional's natural magnitude
    double scale = std::max({std::fabs(r.lhs), std::fabs(r.rhs), 0.1 * yardstick});
    if (scale == 0.0) scale = 1e-12;
    if (!(r.lhs_se <= 0.1 * scale) || !(r.rhs_se <= 0.1 * scale))
        throw BudgetTooSmall("isomorphism check: standard error above 10% of scale");
    return r;
}

}  // namespace

IsoReport iso_one_check(const LoopMeasure& measure, double alpha, const PointMeasure& rho,
                        const PointMeasure& phi,
                        const std::vector<std::pair<int, PointMeasure>>& blocks,
                        const TestFunction& F, std::uint64_t budget, std::uint64_t seed,
                        int threads) {
    int max_n = 1;
    for (const auto& [n, nu] : blocks) max_n = std::max(max_n, n);
    FieldEvaluator fields(measure, alpha, max_n);
    const MarkovKernel& kernel = measure.kernel();

    // per-block B_n polynomials for the extra-loop argument
    std::vector<std::vector<std::pair<int, RenormPolynomial>>> bpolys(blocks.size());
    for (std::size_t j = 0; j < blocks.size(); ++j)
        for (int x : blocks[j].second.support())
            bpolys[j].emplace_back(x, build_B(kernel.u(x, x), blocks[j].first));

    auto lhs_body = [&](Rng& rng) {
        LoopSoup soup = measure.sample(alpha, rng);
        WeightedLoop wl = sample_weighted_extra_loop(measure, rho, phi, rng);
        std::vector<double> args(blocks.size());
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            double arg = fields.psi_n(soup, blocks[j].first, blocks[j].second);
            for (const auto& [x, poly] : bpolys[j]) {
                double occ = wl.loop.occupation(x);
                if (occ != 0.0) arg += blocks[j].second(x) * poly.evaluate(occ);
            }
            args[j] = arg;
        }
        return wl.weight * F.fn(args);
    };
    auto rhs_body = [&](Rng& rng) {
        LoopSoup soup = measure.sample(alpha, rng);
        std::vector<double> args(blocks.size());
        for (std::size_t j = 0; j < blocks.size(); ++j)
            args[j] = fields.psi_n(soup, blocks[j].first, blocks[j].second);
        return fields.theta(soup, rho, phi) / alpha * F.fn(args);
    };
    Welford lhs = mc_run(budget, threads, seed, 0x150ULL, lhs_body, 180.0);
    Welford rhs = mc_run(budget, threads, seed, 0x151ULL, rhs_body, 180.0);
    double yardstick = theta_mean(kernel, alpha, rho, phi) / alpha * F.bound;
    return two_sample(lhs, rhs, yardstick);
}

IsoReport iso_two_check(const LoopMeasure& measure, double alpha, const PointMeasure& rho,
                        const PointMeasure& phi, int n, const PointMeasure& nu,
                        const TestFunction& F, std::uint64_t budget, std::uint64_t seed,
                        int threads) {
    FieldEvaluator fields(measure, alpha, n);
    const MarkovKernel& kernel = measure.kernel();
    std::vector<int> supp = nu.support();
    // A_j and B_k per support state, j,k = 0..n (degree-0 polynomials are 1)
    std::vector<std::vector<RenormPolynomial>> apoly(supp.size()), bpoly(supp.size());
    for (std::size_t s = 0; s < supp.size(); ++s) {
        double c = kernel.u(supp[s], supp[s]);
        apoly[s].resize(n + 1);
        bpoly[s].resize(n + 1);
        apoly[s][0].coeffs = {1.0};
        bpoly[s][0].coeffs = {1.0};
        for (int j = 1; j <= n; ++j) {
            apoly[s][j] = build_A(c, alpha, j);
            bpoly[s][j] = build_B(c, j);
        }
    }

    auto lhs_body = [&](Rng& rng) {
        LoopSoup soup = measure.sample(alpha, rng);
        WeightedLoop wl = sample_weighted_extra_loop(measure, rho, phi, rng);
        double arg = 0.0;
        for (std::size_t s = 0; s < supp.size(); ++s) {
            int x = supp[s];
            double psi_x = fields.psi(soup, x);
            double occ = wl.loop.occupation(x);
            double site = 0.0;
            for (int k = 0; k <= n; ++k) {
                double bk = k == 0 ? 1.0 : (occ != 0.0 ? bpoly[s][k].evaluate(occ) : 0.0);
                if (bk == 0.0) continue;
                site += binomial(n, k) * apoly[s][n - k].evaluate(psi_x) * bk;
            }
            arg += nu(x) * site;
        }
        return wl.weight * F.fn({arg});
    };
    auto rhs_body = [&](Rng& rng) {
        LoopSoup soup = measure.sample(alpha, rng);
        return fields.theta(soup, rho, phi) / alpha * F.fn({fields.psi_tilde_n(soup, n, nu)});
    };
    Welford lhs = mc_run(budget, threads, seed, 0x250ULL, lhs_body, 180.0);
    Welford rhs = mc_run(budget, threads, seed, 0x251ULL, rhs_body, 180.0);
    double yardstick = theta_mean(kernel, alpha, rho, phi) / alpha * F.bound;
    return two_sample(lhs, rhs, yardstick);
}

double add_loop_expansion_residual(const LoopSoup& soup, const BasedLoop& extra,
                                   const LoopMeasure& measure, int n, double alpha,
                                   const PointMeasure& nu) {
    LoopSoup merged = soup;
    merged.loops.push_back(extra);
    double lhs = psi_tilde_n(merged, measure, n, alpha, nu);
    const MarkovKernel& kernel = measure.kernel();
    double rhs = 0.0;
    for (int x : nu.support()) {
        double c = kernel.u(x, x);
        double psi_x = psi_field(soup, measure, x);
        double occ = extra.occupation(x);
        double site = 0.0;
        for (int k = 0; k <= n; ++k) {
            double bk = k == 0 ? 1.0 : (occ != 0.0 ? build_B(c, k).evaluate(occ) : 0.0);
            if (bk == 0.0) continue;
            double aj = n - k == 0 ? 1.0 : build_A(c, alpha, n - k).evaluate(psi_x);
            site += binomial(n, k) * aj * bk;
        }
        rhs += nu(x) * site;
    }
    return lhs - rhs;
}

}  // namespace soup
