#pragma once

#include <vector>

#include "soup/loop_measure.hpp"
#include "soup/loops.hpp"

namespace soup {

// An occupation polynomial together with its exact mu-mean; the unit the
// chaos operators work on.
struct SoupFunctional {
    OccupationPolynomial poly;
    double mu_mean = 0.0;
    const MarkovKernel* kernel = nullptr;

    double operator()(const BasedLoop& loop) const { return poly.evaluate(loop); }
};

SoupFunctional make_functional(const LoopMeasure& measure, OccupationPolynomial poly);
SoupFunctional product_functional(const LoopMeasure& measure, const SoupFunctional& a,
                                  const SoupFunctional& b);

// sum over ordered tuples of distinct loops of prod g_j(omega_{i_j});
// evaluated through the partition expansion, O(Bell(n) * |soup|)
double phi_n(const LoopSoup& soup, const std::vector<SoupFunctional>& gs);
// literal tuple sum, O(|soup|^n); cross-check path
double phi_n_direct(const LoopSoup& soup, const std::vector<SoupFunctional>& gs);

// Poisson Wick product: inclusion-exclusion of phi over subsets against
// the attached alpha-mu means
double I_n(const LoopSoup& soup, double alpha, const std::vector<SoupFunctional>& gs);

// prod over loops of (1 + g(omega)) * exp(-alpha mu(g)); `mu_g` must be the
// mean attached to the evaluator
double exp_chaos(const LoopSoup& soup, double alpha, const std::function<double(const BasedLoop&)>& g,
                 double mu_g);
double exp_chaos(const LoopSoup& soup, double alpha, const SoupFunctional& g);

// residual of the Wick expansion: prod_m phi_{n_m}(block m of gs) minus the
// separated-partition sum; zero in exact arithmetic
double wick_expand_residual(const LoopSoup& soup, const LoopMeasure& measure,
                            const std::vector<int>& layout, const std::vector<SoupFunctional>& gs);

// Two independent soups at intensities alpha and alpha_prime; their union
// is distributed as a soup at alpha + alpha_prime.
struct CoupledSoupPair {
    LoopSoup base;       // intensity alpha
    LoopSoup extension;  // intensity alpha_prime
    double alpha = 0.0;
    double alpha_prime = 0.0;

    LoopSoup combined() const {
        LoopSoup s = base;
        s.alpha = alpha + alpha_prime;
        s.loops.insert(s.loops.end(), extension.loops.begin(), extension.loops.end());
        return s;
    }
};

CoupledSoupPair sample_coupled_pair(const LoopMeasure& measure, double alpha, double alpha_prime,
                                    Rng& rng);

// residual of I_n^{(a+a')}(combined) = sum_{A subset [n]} I_{|A|}^{(a)}(base)
// * I_{|A^c|}^{(a')}(extension)
double martingale_decompose_residual(const CoupledSoupPair& pair,
                                     const std::vector<SoupFunctional>& gs);

}  // namespace soup
