#pragma once

#include <functional>
#include <string>
#include <vector>

#include "soup/loop_measure.hpp"
#include "soup/point_measure.hpp"
#include "soup/renorm.hpp"

namespace soup {

// theta^{rho,phi}: per-soup quadratic functional sum_omega L1(rho) L1(phi)
struct ThetaFunctional {
    PointMeasure rho, phi;
    double value(const LoopSoup& soup) const {
        double total = 0.0;
        for (const BasedLoop& loop : soup.loops) {
            double lr = 0.0, lp = 0.0;
            for (int x : rho.support()) lr += rho(x) * loop.occupation(x);
            for (int x : phi.support()) lp += phi(x) * loop.occupation(x);
            total += lr * lp;
        }
        return total;
    }
};

// Bounded test functions on R^J applied coordinatewise as a product.
struct TestFunction {
    std::string name;
    std::function<double(const std::vector<double>&)> fn;
    double bound = 1.0;
};

TestFunction test_function_const_one();
TestFunction test_function_inv_quadratic();  // prod 1/(1+v_j^2)
TestFunction test_function_cos();            // prod cos(v_j)

struct WeightedLoop {
    BasedLoop loop;
    double weight;
};

// Draws a loop from mu_eps/|mu_eps| and attaches the importance weight
// |mu_eps| L1(rho)(omega) L1(phi)(omega).
WeightedLoop sample_weighted_extra_loop(const LoopMeasure& measure, const PointMeasure& rho,
                                        const PointMeasure& phi, Rng& rng);

struct IsoReport {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    double z = 0.0;
    std::uint64_t samples = 0;
};

// Two-sample comparison of the first isomorphism identity: the weighted
// extra-loop side against the theta-weighted side. Throws BudgetTooSmall
// when either standard error exceeds 10% of the estimate scale.
IsoReport iso_one_check(const LoopMeasure& measure, double alpha, const PointMeasure& rho,
                        const PointMeasure& phi,
                        const std::vector<std::pair<int, PointMeasure>>& blocks,
                        const TestFunction& F, std::uint64_t budget, std::uint64_t seed,
                        int threads);

// Second isomorphism identity: the binomial chain/Wick mixture on the
// extra-loop side against psitilde_n on the theta side.
IsoReport iso_two_check(const LoopMeasure& measure, double alpha, const PointMeasure& rho,
                        const PointMeasure& phi, int n, const PointMeasure& nu,
                        const TestFunction& F, std::uint64_t budget, std::uint64_t seed,
                        int threads);

// per-realization residual of the add-one-loop expansion:
// psitilde_n(soup + extra) - sum_k C(n,k) (psitilde_{n-k} x L_k)
double add_loop_expansion_residual(const LoopSoup& soup, const BasedLoop& extra,
                                   const LoopMeasure& measure, int n, double alpha,
                                   const PointMeasure& nu);

}  // namespace soup
