#pragma once

#include <Eigen/Dense>
#include <vector>

#include "soup/util.hpp"

namespace soup {

// A finite-state continuous-time Markov chain killed at a positive total
// rate, together with its Green matrix u = (-Q)^{-1}. Immutable after
// construction; safe to share across threads.
class MarkovKernel {
  public:
    int num_states() const { return m_; }
    const Eigen::MatrixXd& rates() const { return q_; }
    const Eigen::VectorXd& kill_rate() const { return kill_; }
    const Eigen::VectorXd& exit_rate() const { return exit_; }
    const Eigen::MatrixXd& jump_chain() const { return pj_; }
    const Eigen::MatrixXd& green() const { return green_; }

    double u(int x, int y) const { return green_(x, y); }
    double jump_spectral_radius() const { return pj_radius_; }
    bool irreducible() const { return irreducible_; }

    friend MarkovKernel build_kernel(const Eigen::MatrixXd& rates);

  private:
    MarkovKernel() = default;
    int m_ = 0;
    Eigen::MatrixXd q_, pj_, green_;
    Eigen::VectorXd kill_, exit_;
    double pj_radius_ = 0.0;
    bool irreducible_ = false;
};

// Validates the rate matrix and computes all derived fields.
// Throws NegativeRate / SingularGenerator.
MarkovKernel build_kernel(const Eigen::MatrixXd& rates);

// One killed trajectory: visited states plus the holding time in each.
struct KilledPath {
    std::vector<int> states;
    std::vector<double> holds;
    double occupation(int x) const {
        double t = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == x) t += holds[i];
        return t;
    }
};

KilledPath simulate_path(const MarkovKernel& kernel, int start, Rng& rng);

}  // namespace soup
