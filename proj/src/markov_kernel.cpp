#include "soup/markov_kernel.hpp"

#include <cmath>

namespace soup {

MarkovKernel build_kernel(const Eigen::MatrixXd& rates) {
    const int m = static_cast<int>(rates.rows());
    if (m < 1 || rates.cols() != m) throw Error("build_kernel: rates must be square and nonempty");

    MarkovKernel k;
    k.m_ = m;
    k.q_ = rates;
    k.kill_.resize(m);
    k.exit_.resize(m);
    for (int x = 0; x < m; ++x) {
        double off = 0.0;
        for (int y = 0; y < m; ++y) {
            if (y == x) continue;
            if (rates(x, y) < 0.0)
                throw NegativeRate("build_kernel: negative off-diagonal rate at (" +
                                   std::to_string(x) + "," + std::to_string(y) + ")");
            off += rates(x, y);
        }
        double exit = -rates(x, x);
        if (!(exit > 0.0)) throw Error("build_kernel: diagonal must be strictly negative");
        double kill = exit - off;
        if (kill < -1e-12 * exit)
            throw Error("build_kernel: row " + std::to_string(x) +
                        " has off-diagonal mass exceeding the exit rate");
        k.exit_(x) = exit;
        k.kill_(x) = std::max(kill, 0.0);
    }

    k.pj_ = Eigen::MatrixXd::Zero(m, m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            if (y != x) k.pj_(x, y) = rates(x, y) / k.exit_(x);

    Eigen::MatrixXd neg_q = -rates;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(neg_q);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw SingularGenerator("build_kernel: -Q is singular (the chain is not killed)");
    k.green_ = lu.inverse();

    k.pj_radius_ = 0.0;
    for (const auto& ev : k.pj_.eigenvalues())
        k.pj_radius_ = std::max(k.pj_radius_, std::abs(ev));
    if (!(k.pj_radius_ < 1.0))
        throw SingularGenerator("build_kernel: jump chain has spectral radius >= 1");

    // reachability of the jump graph, both directions
    auto reach_all = [&](bool forward) {
        std::vector<char> seen(m, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y = 0; y < m; ++y) {
                double r = forward ? rates(x, y) : rates(y, x);
                if (y != x && r > 0.0 && !seen[y]) {
                    seen[y] = 1;
                    stack.push_back(y);
                }
            }
        }
        for (char c : seen)
            if (!c) return false;
        return true;
    };
    k.irreducible_ = reach_all(true) && reach_all(false);
    return k;
}

KilledPath simulate_path(const MarkovKernel& kernel, int start, Rng& rng) {
    if (start < 0 || start >= kernel.num_states())
        throw Error("simulate_path: start state out of range");
    KilledPath path;
    int x = start;
    for (;;) {
        double q = kernel.exit_rate()(x);
        path.states.push_back(x);
        path.holds.push_back(rng.exponential(q));
        // exit event: die with probability kill/q, otherwise jump
        double u = rng.uniform() * q;
        if (u < kernel.kill_rate()(x)) break;
        double cum = kernel.kill_rate()(x);
        int next = -1;
        for (int y = 0; y < kernel.num_states(); ++y) {
            if (y == x) continue;
            cum += kernel.rates()(x, y);
            if (u < cum) {
                next = y;
                break;
            }
        }
        if (next < 0) break;  // numerical edge: treat as killed
        x = next;
    }
    return path;
}

}  // namespace soup
