#include "soup/loop_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace soup {

namespace {
constexpr int kTrivialGridSize = 4096;
constexpr double kLengthTailTol = 1e-16;
constexpr int kMaxSkeletonLength = 512;
}  // namespace

LoopMeasure::LoopMeasure(std::shared_ptr<const MarkovKernel> kernel, double epsilon)
    : kernel_(std::move(kernel)), epsilon_(epsilon) {
    const MarkovKernel& k = *kernel_;
    const int m = k.num_states();
    if (!(epsilon_ > 0.0)) throw Error("LoopMeasure: epsilon must be positive");
    double qmin = k.exit_rate().minCoeff();
    if (epsilon_ >= 1.0 / qmin)
        throw CutoffTooLarge("LoopMeasure: epsilon >= 1/min exit rate");

    // skeleton stratum; individual traces can vanish (bipartite jump
    // graphs), so truncate on the spectral-radius tail bound instead
    Eigen::MatrixXd pj = k.jump_chain();
    pj_powers_.push_back(Eigen::MatrixXd::Identity(m, m));
    pj_powers_.push_back(pj);
    const double rho = k.jump_spectral_radius();
    double total = 0.0;
    for (int len = 2; len <= kMaxSkeletonLength; ++len) {
        pj_powers_.push_back(pj_powers_.back() * pj);
        double w = pj_powers_.back().trace() / static_cast<double>(len);
        if (w < 0.0) w = 0.0;
        length_weights_.push_back(w);
        total += w;
        if (rho <= 0.0) break;
        double tail_bound = m * std::pow(rho, len + 1) /
                            ((1.0 - rho) * static_cast<double>(len + 1));
        if (tail_bound < kLengthTailTol * (total + tail_bound) && len >= 4) break;
    }
    length_weight_total_ = total;
    nontrivial_mass_ = -std::log((Eigen::MatrixXd::Identity(m, m) - pj).determinant());
    if (nontrivial_mass_ < 0.0 && nontrivial_mass_ > -1e-15) nontrivial_mass_ = 0.0;

    // trivial strata: mass and inverse-CDF tables on a log-duration grid
    trivial_mass_.resize(m);
    trivial_cdf_.resize(m);
    trivial_log_grid_lo_.resize(m);
    trivial_log_grid_step_.resize(m);
    for (int x = 0; x < m; ++x) {
        double q = k.exit_rate()(x);
        trivial_mass_[x] = expint_e1(q * epsilon_);
        double lo = std::log(epsilon_);
        double hi = std::log(45.0 / q);
        if (hi <= lo) hi = lo + 1.0;
        double step = (hi - lo) / (kTrivialGridSize - 1);
        trivial_log_grid_lo_[x] = lo;
        trivial_log_grid_step_[x] = step;
        std::vector<double>& cdf = trivial_cdf_[x];
        cdf.resize(kTrivialGridSize);
        // d(mass) = e^{-q t} dlog t
        double acc = 0.0;
        double prev = std::exp(-q * std::exp(lo));
        cdf[0] = 0.0;
        for (int i = 1; i < kTrivialGridSize; ++i) {
            double cur = std::exp(-q * std::exp(lo + step * i));
            acc += 0.5 * (prev + cur) * step;
            cdf[i] = acc;
            prev = cur;
        }
        for (double& c : cdf) c /= acc;
    }
}

double LoopMeasure::total_sampled_mass() const {
    double t = nontrivial_mass_;
    for (double v : trivial_mass_) t += v;
    return t;
}

double LoopMeasure::mu_moment(const std::vector<int>& points) const {
    const int k = static_cast<int>(points.size());
    if (k < 1) throw Error("mu_moment: k >= 1 required");
    const Eigen::MatrixXd& u = kernel_->green();
    if (k == 1) return u(points[0], points[0]);
    std::vector<int> rest(k - 1);
    std::iota(rest.begin(), rest.end(), 1);
    double sum = 0.0;
    do {
        double prod = u(points[0], points[rest[0]]);
        for (int i = 0; i + 1 < k - 1; ++i) prod *= u(points[rest[i]], points[rest[i + 1]]);
        prod *= u(points[rest[k - 2]], points[0]);
        sum += prod;
    } while (std::next_permutation(rest.begin(), rest.end()));
    return sum;
}

double LoopMeasure::mu_expectation(const OccupationPolynomial& poly) const {
    if (poly.constant_term() != 0.0)
        throw InfiniteMass("mu_expectation: polynomial has a constant term");
    double sum = 0.0;
    for (const auto& [mono, coeff] : poly.terms()) {
        std::vector<int> points;
        for (const auto& [state, exp] : mono)
            for (int i = 0; i < exp; ++i) points.push_back(state);
        sum += coeff * mu_moment(points);
    }
    return sum;
}

double LoopMeasure::epsilon_compensator(int x) const {
    double q = kernel_->exit_rate()(x);
    return kernel_->u(x, x) - (1.0 - std::exp(-q * epsilon_)) / q;
}

double LoopMeasure::trivial_power_moment(int x, int d) const {
    if (d < 1) throw Error("trivial_power_moment: d >= 1 required");
    double q = kernel_->exit_rate()(x);
    return std::exp(std::lgamma(d)) / std::pow(q, d);
}

double LoopMeasure::laplace_functional(const std::vector<double>& lambda) const {
    const int m = kernel_->num_states();
    if (static_cast<int>(lambda.size()) != m)
        throw Error("laplace_functional: lambda size mismatch");
    double v = 0.0;
    Eigen::VectorXd d(m);
    for (int x = 0; x < m; ++x) {
        if (lambda[x] < 0.0) throw Error("laplace_functional: lambda must be nonnegative");
        double q = kernel_->exit_rate()(x);
        v += std::log1p(lambda[x] / q);
        d(x) = q / (q + lambda[x]);
    }
    const Eigen::MatrixXd& pj = kernel_->jump_chain();
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
    double det_damped = (id - pj * d.asDiagonal()).determinant();
    double det_plain = (id - pj).determinant();
    return v + std::log(det_damped) - std::log(det_plain);
}

std::vector<double> LoopMeasure::visit_count_masses(int x, int dmax) const {
    const int m = kernel_->num_states();
    const Eigen::MatrixXd& pj = kernel_->jump_chain();
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd m0 = id - pj;
    m0.col(x) = id.col(x);  // column of I - P_J D_z at z = 0
    double a = m0.determinant();
    double b = (id - pj).determinant() - a;
    double r = -b / a;  // visit-count generating ratio
    std::vector<double> w(dmax);
    double pw = 1.0;
    for (int d = 1; d <= dmax; ++d) {
        pw *= r;
        w[d - 1] = pw / static_cast<double>(d);
    }
    return w;
}

double LoopMeasure::mu_nonlinear(int x, const std::function<double(double)>& h, int dmax) const {
    double q = kernel_->exit_rate()(x);
    // trivial stratum, full mass (no cutoff): h(t)/t is bounded near 0
    auto trivial_integrand = [&](double t) { return h(t) / t * std::exp(-q * t); };
    double tmax = 50.0 / q;
    double v = integrate(trivial_integrand, 0.0, 1.0 / q, 1e-11).value +
               integrate(trivial_integrand, 1.0 / q, tmax, 1e-11).value;
    // nontrivial stratum: d visits => occupation ~ Gamma(d, q)
    std::vector<double> w = visit_count_masses(x, dmax);
    for (int d = 1; d <= dmax; ++d) {
        if (std::fabs(w[d - 1]) < 1e-16) break;
        double hi = (d + 12.0 * std::sqrt(static_cast<double>(d)) + 50.0) / q;
        auto dens = [&](double t) {
            double logp = d * std::log(q) + (d - 1) * std::log(t) - q * t - std::lgamma(d);
            return h(t) * std::exp(logp);
        };
        v += w[d - 1] * integrate(dens, 0.0, hi, 1e-11).value;
    }
    return v;
}

BasedLoop LoopMeasure::sample_trivial(int x, Rng& rng) const {
    const std::vector<double>& cdf = trivial_cdf_[x];
    double u = rng.uniform();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = it == cdf.begin() ? 1 : static_cast<std::size_t>(it - cdf.begin());
    if (i >= cdf.size()) i = cdf.size() - 1;
    double c0 = cdf[i - 1], c1 = cdf[i];
    double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    double logt = trivial_log_grid_lo_[x] + trivial_log_grid_step_[x] * (static_cast<double>(i - 1) + frac);
    return make_trivial_loop(x, std::exp(logt));
}

BasedLoop LoopMeasure::sample_skeleton(Rng& rng) const {
    const int m = kernel_->num_states();
    std::size_t li = rng.discrete(length_weights_, length_weight_total_);
    int k = static_cast<int>(li) + 2;
    const Eigen::MatrixXd& pk = pj_powers_[k];
    // root proportional to diag(P_J^k)
    std::vector<double> diag(m);
    double dtot = 0.0;
    for (int x = 0; x < m; ++x) {
        diag[x] = std::max(pk(x, x), 0.0);
        dtot += diag[x];
    }
    int root = static_cast<int>(rng.discrete(diag, dtot));
    std::vector<int> states{root};
    const Eigen::MatrixXd& pj = kernel_->jump_chain();
    int cur = root;
    for (int i = 1; i < k; ++i) {
        // remaining steps from the next state back to the root: k - i
        const Eigen::MatrixXd& back = pj_powers_[k - i];
        std::vector<double> wts(m);
        double tot = 0.0;
        for (int y = 0; y < m; ++y) {
            double w = pj(cur, y) * back(y, root);
            wts[y] = std::max(w, 0.0);
            tot += wts[y];
        }
        cur = static_cast<int>(rng.discrete(wts, tot));
        states.push_back(cur);
    }
    std::vector<double> durs(k);
    for (int i = 0; i < k; ++i) durs[i] = rng.exponential(kernel_->exit_rate()(states[i]));
    return make_skeleton_loop(std::move(states), std::move(durs));
}

LoopSoup LoopMeasure::sample(double alpha, Rng& rng) const {
    if (!(alpha > 0.0)) throw Error("sample: alpha must be positive");
    LoopSoup soup;
    soup.alpha = alpha;
    soup.epsilon = epsilon_;
    soup.kernel = kernel_.get();
    long n_skel = length_weight_total_ > 0.0 ? rng.poisson(alpha * nontrivial_mass_) : 0;
    for (long i = 0; i < n_skel; ++i) soup.loops.push_back(sample_skeleton(rng));
    for (int x = 0; x < kernel_->num_states(); ++x) {
        long n_triv = rng.poisson(alpha * trivial_mass_[x]);
        for (long i = 0; i < n_triv; ++i) soup.loops.push_back(sample_trivial(x, rng));
    }
    return soup;
}

BasedLoop LoopMeasure::sample_skeleton_loop(Rng& rng) const {
    if (!(length_weight_total_ > 0.0))
        throw Error("sample_skeleton_loop: jump chain carries no loop mass");
    return sample_skeleton(rng);
}

BasedLoop LoopMeasure::sample_single_loop(Rng& rng) const {
    std::vector<double> strata;
    strata.push_back(nontrivial_mass_);
    for (double t : trivial_mass_) strata.push_back(t);
    double tot = total_sampled_mass();
    std::size_t pick = rng.discrete(strata, tot);
    if (pick == 0 && length_weight_total_ > 0.0) return sample_skeleton(rng);
    if (pick == 0) pick = 1;  // no skeleton mass: fall through to a trivial stratum
    return sample_trivial(static_cast<int>(pick) - 1, rng);
}

}  // namespace soup
