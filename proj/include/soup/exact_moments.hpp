#pragma once

#include <map>
#include <vector>

#include "soup/loop_measure.hpp"
#include "soup/point_measure.hpp"
#include "soup/poisson_chaos.hpp"

namespace soup {

struct BlockSpec {
    int n = 1;
    PointMeasure nu;
};

// mu(prod_i L_{n_i}(nu_i)) via the alternating-map sum:
// (prod n_i!)/n * sum_{pi in M_a} sum_states prod_j u(x_{pi(j)}, x_{pi(j+1)})
double mu_joint_L(const MarkovKernel& kernel, const std::vector<BlockSpec>& blocks);

// E[prod_i psi_{n_i}(nu_i)]: cycle-weighted sum over block-alternating
// permutations, same-cycle constrained (histogram keyed by cycle count so
// any alpha substitutes exactly)
std::map<int, double> soup_joint_psi_poly(const MarkovKernel& kernel,
                                          const std::vector<BlockSpec>& blocks);
double soup_joint_psi(const MarkovKernel& kernel, double alpha, const std::vector<BlockSpec>& blocks);

// same with the same-cycle constraint dropped: E[prod_i psitilde_{n_i}(nu_i)]
std::map<int, double> soup_joint_psitilde_poly(const MarkovKernel& kernel,
                                               const std::vector<BlockSpec>& blocks);
double soup_joint_psitilde(const MarkovKernel& kernel, double alpha,
                           const std::vector<BlockSpec>& blocks);

// the partition route of the same moment: sum over partitions of the blocks
// with parts >= 2 of prod alpha * mu_joint_L(part)
double soup_joint_psi_partition_route(const MarkovKernel& kernel, double alpha,
                                      const std::vector<BlockSpec>& blocks);

// E[prod_m phi_{n_m}(gs...)] = sum over separated partitions of prod alpha mu(g_A)
double poisson_joint_phi(const LoopMeasure& measure, double alpha, const std::vector<int>& layout,
                         const std::vector<SoupFunctional>& gs);

// E[prod_m I_{n_m}(gs...)]: as above with every part of size >= 2
double poisson_joint_I(const LoopMeasure& measure, double alpha, const std::vector<int>& layout,
                       const std::vector<SoupFunctional>& gs);

// E[I_l(nu) I_l'(nu')] in closed form; zero unless the degree vectors match
double I_ll_covariance(const MarkovKernel& kernel, double alpha, const std::vector<int>& ls,
                       const std::vector<int>& ls_prime, const PointMeasure& nu,
                       const PointMeasure& nu_prime);

// alpha * sum_{x,y} rho(x) phi(y) u(x,y) u(y,x)
double theta_mean(const MarkovKernel& kernel, double alpha, const PointMeasure& rho,
                  const PointMeasure& phi);

}  // namespace soup
