#pragma once

#include <vector>

#include "soup/loop_measure.hpp"
#include "soup/point_measure.hpp"
#include "soup/poisson_chaos.hpp"

namespace soup {

// Chain and circuit function values in the point-mass limit: both collapse
// to powers of the diagonal Green value.
struct ChainCircuitTable {
    explicit ChainCircuitTable(const MarkovKernel& kernel) {
        for (int x = 0; x < kernel.num_states(); ++x) diag.push_back(kernel.u(x, x));
    }
    double c(int x) const { return diag[x]; }
    double chain(int x, int i) const { return std::pow(diag[x], i); }
    double circuit(int x, int j) const { return std::pow(diag[x], j); }
    std::vector<double> diag;
};

// Renormalization polynomial: coefficient j multiplies v^j.
struct RenormPolynomial {
    int degree = 0;
    std::vector<double> coeffs;  // size degree + 1
    double evaluate(double v) const {
        double acc = 0.0;
        for (int j = degree; j >= 0; --j) acc = acc * v + coeffs[j];
        return acc;
    }
};

// Self-intersection local time polynomial B_n with chain values c^i.
RenormPolynomial build_B(double c, int n);
// Wick power polynomial A_n with chain values c^i and circuit values c^j.
RenormPolynomial build_A(double c, double alpha, int n);

// B_n(u(x,x)) evaluated at the loop's occupation of x
double L_n_on_loop(const MarkovKernel& kernel, int n, int x, const BasedLoop& loop);

// mu(B_n(L(x))) = sum_j b_j (j-1)! u(x,x)^j
double mu_of_L_n(const MarkovKernel& kernel, int n, int x);

// occupation polynomial representing B_n(L(x))
OccupationPolynomial L_n_polynomial(const MarkovKernel& kernel, int n, int x);

// centered occupation field: sum_omega L(x)(omega) - alpha * mu_eps(L(x))
double psi_field(const LoopSoup& soup, const LoopMeasure& measure, int x);

// loop soup n-fold self-intersection local time aggregated by nu, centered
// with the full-mu compensator
double psi_n(const LoopSoup& soup, const LoopMeasure& measure, int n, const PointMeasure& nu);

// permanental Wick power: A_n applied to the centered field, aggregated by nu
double psi_tilde_n(const LoopSoup& soup, const LoopMeasure& measure, int n, double alpha,
                   const PointMeasure& nu);

// mixed chaos I_n(L_{l_1}(x), ..., L_{l_n}(x)) aggregated by nu
double I_ll_chaos(const LoopSoup& soup, const LoopMeasure& measure, const std::vector<int>& ls,
                  const PointMeasure& nu);

// Precomputes the per-state polynomials once so the field values can be
// evaluated across millions of soups without rebuilding them.
class FieldEvaluator {
  public:
    FieldEvaluator(const LoopMeasure& measure, double alpha, int max_n);

    double psi(const LoopSoup& soup, int x) const;
    double psi_n(const LoopSoup& soup, int n, const PointMeasure& nu) const;
    double psi_tilde_n(const LoopSoup& soup, int n, const PointMeasure& nu) const;
    double theta(const LoopSoup& soup, const PointMeasure& rho, const PointMeasure& phi) const;

    const LoopMeasure& measure() const { return *measure_; }
    double alpha() const { return alpha_; }

  private:
    const LoopMeasure* measure_;
    double alpha_;
    std::vector<std::vector<RenormPolynomial>> b_, a_;  // [x][n]
    std::vector<std::vector<double>> mu_ln_;            // [x][n]
    std::vector<double> eps_comp_;
};

}  // namespace soup
