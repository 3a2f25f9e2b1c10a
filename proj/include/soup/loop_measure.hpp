#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "soup/loops.hpp"
#include "soup/markov_kernel.hpp"
#include "soup/util.hpp"

namespace soup {

// The loop measure of a killed finite-state chain, split into per-state
// trivial strata (duration density e^{-qt}/t, sampled above a cutoff
// epsilon) and the jump-skeleton stratum of total mass -log det(I - P_J).
// Exact first and joint moments come from the circular-permutation formula;
// sampling is reproducible from the caller's Rng stream.
class LoopMeasure {
  public:
    LoopMeasure(std::shared_ptr<const MarkovKernel> kernel, double epsilon = 1e-8);

    const MarkovKernel& kernel() const { return *kernel_; }
    std::shared_ptr<const MarkovKernel> kernel_ptr() const { return kernel_; }
    double epsilon() const { return epsilon_; }

    // -log det(I - P_J); zero when the jump chain is empty
    double nontrivial_mass() const { return nontrivial_mass_; }
    // E1(qtilde(x) * epsilon), the sampled trivial mass at x
    double trivial_mass(int x) const { return trivial_mass_[x]; }
    double total_sampled_mass() const;

    // sum over circular permutations of prod u(y_pi(j), y_pi(j+1));
    // u(y,y) when points has a single entry
    double mu_moment(const std::vector<int>& points) const;

    // exact mu-integral of an occupation polynomial (no constant term)
    double mu_expectation(const OccupationPolynomial& poly) const;

    // mu_eps(L(x)) = u(x,x) - int_0^eps e^{-qt} dt
    double epsilon_compensator(int x) const;

    // exact trivial-stratum power moment: int_0^inf t^d e^{-qt}/t dt
    double trivial_power_moment(int x, int d) const;

    // mu(1 - exp(-sum_x lambda[x] L(x))), lambda >= 0, in closed form
    double laplace_functional(const std::vector<double>& lambda) const;

    // mass of nontrivial loops visiting x exactly d times, d = 1..dmax
    std::vector<double> visit_count_masses(int x, int dmax) const;

    // mu(h(L(x))) for h with h(0) = 0, by the visit-count decomposition
    double mu_nonlinear(int x, const std::function<double(double)>& h, int dmax = 64) const;

    LoopSoup sample(double alpha, Rng& rng) const;
    BasedLoop sample_single_loop(Rng& rng) const;   // from mu_eps / |mu_eps|
    BasedLoop sample_skeleton_loop(Rng& rng) const; // from mu_J / |mu_J|

    int skeleton_max_length() const { return static_cast<int>(length_weights_.size()) + 1; }

  private:
    BasedLoop sample_skeleton(Rng& rng) const;
    BasedLoop sample_trivial(int x, Rng& rng) const;

    std::shared_ptr<const MarkovKernel> kernel_;
    double epsilon_;
    double nontrivial_mass_ = 0.0;
    std::vector<double> trivial_mass_;
    std::vector<Eigen::MatrixXd> pj_powers_;    // P_J^0 .. P_J^K
    std::vector<double> length_weights_;        // tr(P_J^k)/k for k = 2..K
    double length_weight_total_ = 0.0;
    std::vector<std::vector<double>> trivial_cdf_;  // per state, on a log grid
    std::vector<double> trivial_log_grid_lo_, trivial_log_grid_step_;
};

}  // namespace soup
