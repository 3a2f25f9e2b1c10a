#include "soup/renorm.hpp"

#include <cmath>
#include <functional>

namespace soup {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

// Enumerates chain multiplicities (k_1, k_2, ...) and, when with_circuits,
// circuit multiplicities (m_2, m_3, ...) with |sigma|_+ <= budget, calling
//   visit(weight_removed = |sigma|, slots_used = |sigma|_+, combinatorial factor)
// where the factor is prod c^{i k_i} / k_i! * prod (alpha c^j / j)^{m_j} / m_j!.
void enumerate_sigma(int budget, double c, double alpha, bool with_circuits,
                     const std::function<void(int, int, double)>& visit) {
    // chains first: order i uses i+1 slots and removes i
    std::function<void(int, int, int, double)> chains = [&](int order, int removed, int used,
                                                            double factor) {
        int slots = order + 1;
        if (slots > budget - used) {
            if (!with_circuits) {
                visit(removed, used, factor);
                return;
            }
            // circuits: order j uses and removes j slots
            std::function<void(int, int, int, double)> circuits = [&](int jorder, int rem, int us,
                                                                      double f) {
                if (jorder > budget - us) {
                    visit(rem, us, f);
                    return;
                }
                double term = 1.0;
                for (int mj = 0;; ++mj) {
                    if (us + jorder * mj > budget) break;
                    circuits(jorder + 1, rem + jorder * mj, us + jorder * mj, f * term);
                    term *= alpha * std::pow(c, jorder) / static_cast<double>(jorder) /
                            static_cast<double>(mj + 1);
                }
            };
            circuits(2, removed, used, factor);
            return;
        }
        double term = 1.0;
        for (int ki = 0;; ++ki) {
            if (used + slots * ki > budget) break;
            chains(order + 1, removed + order * ki, used + slots * ki, factor * term);
            term *= std::pow(c, order) / static_cast<double>(ki + 1);
        }
    };
    chains(1, 0, 0, 1.0);
}

RenormPolynomial build_renorm(double c, double alpha, int n, bool with_circuits) {
    if (n < 1) throw Error("renorm polynomial: n >= 1 required");
    std::vector<RenormPolynomial> polys(n + 1);
    polys[0].degree = 0;
    polys[0].coeffs = {1.0};
    for (int deg = 1; deg <= n; ++deg) {
        RenormPolynomial p;
        p.degree = deg;
        p.coeffs.assign(deg + 1, 0.0);
        p.coeffs[deg] = 1.0;
        enumerate_sigma(deg, c, alpha, with_circuits, [&](int removed, int used, double factor) {
            if (removed < 1) return;
            double coeff = factorial(deg) / factorial(deg - used) * factor;
            const RenormPolynomial& lower = polys[deg - removed];
            for (int j = 0; j <= lower.degree; ++j) p.coeffs[j] -= coeff * lower.coeffs[j];
        });
        polys[deg] = std::move(p);
    }
    return polys[n];
}

}  // namespace

RenormPolynomial build_B(double c, int n) { return build_renorm(c, 0.0, n, false); }

RenormPolynomial build_A(double c, double alpha, int n) {
    if (!(alpha > 0.0)) throw Error("build_A: alpha > 0 required");
    return build_renorm(c, alpha, n, true);
}

double L_n_on_loop(const MarkovKernel& kernel, int n, int x, const BasedLoop& loop) {
    double occ = loop.occupation(x);
    if (occ == 0.0) return 0.0;  // B_n has no constant term
    return build_B(kernel.u(x, x), n).evaluate(occ);
}

double mu_of_L_n(const MarkovKernel& kernel, int n, int x) {
    RenormPolynomial b = build_B(kernel.u(x, x), n);
    double c = kernel.u(x, x);
    double v = 0.0;
    double fact = 1.0;  // (j-1)!
    for (int j = 1; j <= b.degree; ++j) {
        if (j > 1) fact *= static_cast<double>(j - 1);
        v += b.coeffs[j] * fact * std::pow(c, j);
    }
    return v;
}

OccupationPolynomial L_n_polynomial(const MarkovKernel& kernel, int n, int x) {
    RenormPolynomial b = build_B(kernel.u(x, x), n);
    return poly_in_state(x, b.coeffs);
}

namespace {

void require_same_kernel(const LoopSoup& soup, const LoopMeasure& measure) {
    if (soup.kernel != &measure.kernel())
        throw KernelMismatch("soup was sampled from a different kernel");
}

}  // namespace

double psi_field(const LoopSoup& soup, const LoopMeasure& measure, int x) {
    require_same_kernel(soup, measure);
    double s = 0.0;
    for (const BasedLoop& loop : soup.loops) s += loop.occupation(x);
    return s - soup.alpha * measure.epsilon_compensator(x);
}

double psi_n(const LoopSoup& soup, const LoopMeasure& measure, int n, const PointMeasure& nu) {
    require_same_kernel(soup, measure);
    const MarkovKernel& kernel = measure.kernel();
    double total = 0.0;
    for (int x : nu.support()) {
        RenormPolynomial b = build_B(kernel.u(x, x), n);
        double s = 0.0;
        for (const BasedLoop& loop : soup.loops) {
            double occ = loop.occupation(x);
            if (occ != 0.0) s += b.evaluate(occ);
        }
        total += nu(x) * (s - soup.alpha * mu_of_L_n(kernel, n, x));
    }
    return total;
}

double psi_tilde_n(const LoopSoup& soup, const LoopMeasure& measure, int n, double alpha,
                   const PointMeasure& nu) {
    require_same_kernel(soup, measure);
    const MarkovKernel& kernel = measure.kernel();
    double total = 0.0;
    for (int x : nu.support()) {
        RenormPolynomial a = build_A(kernel.u(x, x), alpha, n);
        total += nu(x) * a.evaluate(psi_field(soup, measure, x));
    }
    return total;
}

double I_ll_chaos(const LoopSoup& soup, const LoopMeasure& measure, const std::vector<int>& ls,
                  const PointMeasure& nu) {
    require_same_kernel(soup, measure);
    const MarkovKernel& kernel = measure.kernel();
    double total = 0.0;
    for (int x : nu.support()) {
        std::vector<SoupFunctional> gs;
        for (int l : ls) gs.push_back(make_functional(measure, L_n_polynomial(kernel, l, x)));
        total += nu(x) * I_n(soup, soup.alpha, gs);
    }
    return total;
}

FieldEvaluator::FieldEvaluator(const LoopMeasure& measure, double alpha, int max_n)
    : measure_(&measure), alpha_(alpha) {
    const MarkovKernel& kernel = measure.kernel();
    const int m = kernel.num_states();
    b_.resize(m);
    a_.resize(m);
    mu_ln_.resize(m);
    eps_comp_.resize(m);
    for (int x = 0; x < m; ++x) {
        double c = kernel.u(x, x);
        b_[x].resize(max_n + 1);
        a_[x].resize(max_n + 1);
        mu_ln_[x].assign(max_n + 1, 0.0);
        for (int n = 1; n <= max_n; ++n) {
            b_[x][n] = build_B(c, n);
            a_[x][n] = build_A(c, alpha, n);
            mu_ln_[x][n] = mu_of_L_n(kernel, n, x);
        }
        eps_comp_[x] = measure.epsilon_compensator(x);
    }
}

double FieldEvaluator::psi(const LoopSoup& soup, int x) const {
    double s = 0.0;
    for (const BasedLoop& loop : soup.loops) s += loop.occupation(x);
    return s - soup.alpha * eps_comp_[x];
}

double FieldEvaluator::psi_n(const LoopSoup& soup, int n, const PointMeasure& nu) const {
    double total = 0.0;
    for (int x : nu.support()) {
        const RenormPolynomial& b = b_[x][n];
        double s = 0.0;
        for (const BasedLoop& loop : soup.loops) {
            double occ = loop.occupation(x);
            if (occ != 0.0) s += b.evaluate(occ);
        }
        total += nu(x) * (s - soup.alpha * mu_ln_[x][n]);
    }
    return total;
}

double FieldEvaluator::psi_tilde_n(const LoopSoup& soup, int n, const PointMeasure& nu) const {
    double total = 0.0;
    for (int x : nu.support()) total += nu(x) * a_[x][n].evaluate(psi(soup, x));
    return total;
}

double FieldEvaluator::theta(const LoopSoup& soup, const PointMeasure& rho,
                             const PointMeasure& phi) const {
    double total = 0.0;
    for (const BasedLoop& loop : soup.loops) {
        double lr = 0.0, lp = 0.0;
        for (int x : rho.support()) lr += rho(x) * loop.occupation(x);
        for (int x : phi.support()) lp += phi(x) * loop.occupation(x);
        total += lr * lp;
    }
    return total;
}

}  // namespace soup
