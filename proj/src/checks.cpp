#include <chrono>
#include <cmath>
#include <functional>
#include <memory>

#include "soup/combinatorics.hpp"
#include "soup/config.hpp"
#include "soup/exact_moments.hpp"
#include "soup/isomorphism.hpp"
#include "soup/mc_engine.hpp"
#include "soup/renorm.hpp"

namespace soup {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SuiteContext {
    const SuiteConfig* cfg;
    std::shared_ptr<const MarkovKernel> kernel;
    std::shared_ptr<const LoopMeasure> measure;

    double alpha() const { return cfg->alphas.front(); }
    int threads() const { return std::max(1, cfg->threads); }

    const PointMeasure& named_measure(const std::string& name) const {
        auto it = cfg->measures.find(name);
        if (it == cfg->measures.end())
            throw ConfigError("check references unknown measure '" + name + "'");
        return it->second;
    }
    PointMeasure measure_or_delta(const std::string& name, int fallback_state) const {
        if (name.empty()) return PointMeasure::delta(fallback_state, kernel->num_states());
        return named_measure(name);
    }
};

double param_or(const CheckSpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

TestFunction pick_test_function(const std::string& name) {
    if (name.empty() || name == "inv_quadratic") return test_function_inv_quadratic();
    if (name == "const_one") return test_function_const_one();
    if (name == "cos") return test_function_cos();
    throw ConfigError("unknown test function '" + name + "'");
}

// ---------------------------------------------------------------------------
// exact checks
// ---------------------------------------------------------------------------

std::vector<ComparisonRow> check_kernel_invariants(const SuiteContext& ctx, const CheckSpec& spec) {
    auto t0 = Clock::now();
    const MarkovKernel& k = *ctx.kernel;
    const int m = k.num_states();
    std::vector<ComparisonRow> rows;

    double resolvent = ((-k.rates()) * k.green() - Eigen::MatrixXd::Identity(m, m))
                           .cwiseAbs()
                           .maxCoeff();
    rows.push_back(make_residual_row(spec.name + ".resolvent", spec.kind, resolvent, 1e-12, 1,
                                     seconds_since(t0)));

    Eigen::MatrixXd gj = (Eigen::MatrixXd::Identity(m, m) - k.jump_chain()).inverse();
    Eigen::MatrixXd alt = gj * k.exit_rate().cwiseInverse().asDiagonal();
    double factorization = (alt - k.green()).cwiseAbs().maxCoeff() / k.green().cwiseAbs().maxCoeff();
    rows.push_back(make_residual_row(spec.name + ".jump_factorization", spec.kind, factorization,
                                     1e-12, 1, seconds_since(t0)));

    ComparisonRow sr;
    sr.name = spec.name + ".jump_spectral_radius";
    sr.kind = spec.kind;
    sr.estimate = k.jump_spectral_radius();
    sr.pass = k.jump_spectral_radius() < 1.0;
    sr.samples = 1;
    sr.seconds = seconds_since(t0);
    rows.push_back(sr);

    double decomposition = 0.0;
    for (int x = 0; x < m; ++x) {
        double q = k.exit_rate()(x);
        double lhs = 1.0 / q + (gj(x, x) - 1.0) / q;
        decomposition = std::max(decomposition, std::fabs(lhs - k.u(x, x)) / k.u(x, x));
    }
    rows.push_back(make_residual_row(spec.name + ".sampler_decomposition", spec.kind, decomposition,
                                     1e-12, 1, seconds_since(t0)));

    if (k.irreducible()) {
        ComparisonRow pos;
        pos.name = spec.name + ".green_positive";
        pos.kind = spec.kind;
        pos.pass = k.green().minCoeff() > 0.0;
        pos.samples = 1;
        pos.seconds = seconds_since(t0);
        rows.push_back(pos);
    }
    return rows;
}

std::vector<ComparisonRow> check_cycle_sum(const SuiteContext&, const CheckSpec& spec) {
    std::vector<ComparisonRow> rows;
    int n_max = static_cast<int>(param_or(spec, "n_max", 4));
    std::vector<double> alphas{0.5, 1.0, 2.5};
    for (int n = 1; n <= n_max; ++n) {
        auto t0 = Clock::now();
        auto hist = alternating_cycle_histogram(BlockLayout({n, n}), false);
        for (double a : alphas) {
            double lhs = 0.0;
            for (const auto& [c, count] : hist) lhs += static_cast<double>(count) * std::pow(a, c);
            double rhs = rising_factorial_sum(n, a);
            rows.push_back(make_exact_row(spec.name + ".n" + std::to_string(n) + "_a" +
                                              std::to_string(a),
                                          spec.kind, rhs, lhs, 1e-12, seconds_since(t0)));
        }
    }
    return rows;
}

std::vector<ComparisonRow> check_counting(const SuiteContext&, const CheckSpec& spec) {
    std::vector<ComparisonRow> rows;
    auto t0 = Clock::now();

    // the two worked values
    SigmaIndex s1;
    s1.chains = {2, 1};
    rows.push_back(make_exact_row(spec.name + ".worked_chain", spec.kind, 483840.0,
                                  remove_relabel_count(s1, 8), 0.0, seconds_since(t0)));
    SigmaIndex s2;
    s2.chains = {2, 1};
    s2.circuits = {0, 2};
    rows.push_back(make_exact_row(spec.name + ".worked_circuit", spec.kind, 58118860800.0,
                                  remove_relabel_count(s2, 14), 0.0, seconds_since(t0)));

    int max_weight = static_cast<int>(param_or(spec, "max_weight", 5));
    // enumerate sigma with |sigma|_+ <= max_weight
    std::vector<SigmaIndex> sigmas;
    std::function<void(SigmaIndex&, int, int)> add_chains = [&](SigmaIndex& s, int order, int used) {
        if (s.weight() >= 1) sigmas.push_back(s);
        for (int o = order; o + 1 + used <= max_weight; ++o) {
            s.chains.resize(std::max<std::size_t>(s.chains.size(), o), 0);
            ++s.chains[o - 1];
            add_chains(s, o, used + o + 1);
            --s.chains[o - 1];
            while (!s.chains.empty() && s.chains.back() == 0) s.chains.pop_back();
        }
    };
    SigmaIndex empty;
    add_chains(empty, 1, 0);
    std::size_t chain_only = sigmas.size();
    std::vector<SigmaIndex> with_circ;
    for (const SigmaIndex& base : sigmas) {
        SigmaIndex s = base;
        for (int j = 2; static_cast<long>(j) + s.weight_plus() <= max_weight; ++j) {
            SigmaIndex sc = s;
            sc.circuits.resize(j - 1, 0);
            ++sc.circuits[j - 2];
            with_circ.push_back(sc);
        }
    }
    for (int j = 2; j <= max_weight; ++j) {
        SigmaIndex sc;
        sc.circuits.assign(j - 1, 0);
        ++sc.circuits[j - 2];
        with_circ.push_back(sc);
        if (2 * j <= max_weight) {
            SigmaIndex sd = sc;
            ++sd.circuits[j - 2];
            with_circ.push_back(sd);
        }
    }

    auto run_family = [&](const SigmaIndex& sigma, bool with_circuits, const std::string& tag) {
        auto tb = Clock::now();
        int n = static_cast<int>(sigma.weight_plus());
        int need = n - static_cast<int>(sigma.weight());
        // the reduced permutation must be fixed-point-free in the multi-cycle
        // family, so a circuit-only sigma still needs two low elements
        int m = std::max(with_circuits ? 2 : 1, need);
        if (m > 3 || m + n > 9) return;
        auto fibers = remove_relabel_fibers(sigma, m, n, with_circuits);
        double expected = remove_relabel_count(sigma, n);
        bool ok = !fibers.empty();
        double worst = 0.0;
        for (const auto& [img, count] : fibers) {
            worst = std::max(worst, std::fabs(static_cast<double>(count) - expected));
            if (static_cast<double>(count) != expected) ok = false;
        }
        ComparisonRow row = make_residual_row(spec.name + "." + tag, spec.kind, worst, 0.0,
                                              fibers.size(), seconds_since(tb));
        row.exact = expected;
        row.pass = ok;
        rows.push_back(row);
    };

    for (std::size_t i = 0; i < chain_only; ++i)
        run_family(sigmas[i], false, "circle_sigma" + std::to_string(i));
    for (std::size_t i = 0; i < chain_only; ++i)
        run_family(sigmas[i], true, "cycles_sigma" + std::to_string(i));
    for (std::size_t i = 0; i < with_circ.size(); ++i)
        run_family(with_circ[i], true, "circuit_sigma" + std::to_string(i));
    return rows;
}

// all layouts (n_1 >= ... >= n_k) with sum <= max_total and k blocks
std::vector<std::vector<int>> layouts_up_to(int max_total, int max_blocks) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (cur.size() >= 2) out.push_back(cur);
        if (static_cast<int>(cur.size()) == max_blocks) return;
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    rec(max_total, max_total);
    return out;
}

std::vector<ComparisonRow> check_cross_engine(const SuiteContext& ctx, const CheckSpec& spec) {
    std::vector<ComparisonRow> rows;
    const MarkovKernel& kernel = *ctx.kernel;
    const LoopMeasure& measure = *ctx.measure;
    const int m = kernel.num_states();
    int max_total = static_cast<int>(param_or(spec, "max_total", 6));

    for (const auto& layout : layouts_up_to(max_total, std::min(4, m))) {
        auto t0 = Clock::now();
        int k = static_cast<int>(layout.size());
        // disjoint supports: deltas at distinct states
        std::vector<BlockSpec> blocks;
        for (int i = 0; i < k; ++i) blocks.push_back({layout[i], PointMeasure::delta(i, m)});
        if (!alternation_feasible(BlockLayout(layout))) {
            // family empty: the moment must be exactly zero on both routes
            double lhs = mu_joint_L(kernel, blocks);
            OccupationPolynomial prod = OccupationPolynomial::constant(1.0);
            for (int i = 0; i < k; ++i) prod = prod * L_n_polynomial(kernel, layout[i], i);
            double rhs = measure.mu_expectation(prod);
            std::string tag = spec.name + ".empty";
            for (int p : layout) tag += "_" + std::to_string(p);
            rows.push_back(make_residual_row(tag, spec.kind, std::fabs(lhs) + std::fabs(rhs), 1e-9,
                                             1, seconds_since(t0)));
            continue;
        }
        double lhs = mu_joint_L(kernel, blocks);
        OccupationPolynomial prod = OccupationPolynomial::constant(1.0);
        for (int i = 0; i < k; ++i) prod = prod * L_n_polynomial(kernel, layout[i], i);
        double rhs = measure.mu_expectation(prod);
        std::string tag = spec.name;
        for (int p : layout) tag += "_" + std::to_string(p);
        rows.push_back(make_exact_row(tag, spec.kind, rhs, lhs, 1e-9, seconds_since(t0)));
    }

    // same-support case: reported, never failing (alternation is over measure
    // indices, not states)
    {
        auto t0 = Clock::now();
        std::vector<BlockSpec> blocks{{1, PointMeasure::delta(0, m)}, {1, PointMeasure::delta(0, m)}};
        double lhs = mu_joint_L(kernel, blocks);
        OccupationPolynomial prod = L_n_polynomial(kernel, 1, 0) * L_n_polynomial(kernel, 1, 0);
        double rhs = measure.mu_expectation(prod);
        ComparisonRow row;
        row.name = spec.name + ".same_support_exploratory";
        row.kind = spec.kind;
        row.exact = rhs;
        row.estimate = lhs;
        row.residual = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
        row.pass = true;
        row.note = "exploratory: same-support blocks are outside the disjoint-support contract";
        row.samples = 1;
        row.seconds = seconds_since(t0);
        rows.push_back(row);
    }
    return rows;
}

std::vector<ComparisonRow> check_partition_identity(const SuiteContext& ctx, const CheckSpec& spec) {
    std::vector<ComparisonRow> rows;
    const MarkovKernel& kernel = *ctx.kernel;
    const int m = kernel.num_states();
    double alpha = ctx.alpha();
    std::vector<std::vector<int>> cases = {{1, 1}, {2, 1}, {1, 1, 1}, {2, 2}, {1, 1, 1, 1}, {2, 1, 1}};
    for (const auto& layout : cases) {
        auto t0 = Clock::now();
        std::vector<BlockSpec> blocks;
        for (std::size_t i = 0; i < layout.size(); ++i)
            blocks.push_back({layout[i], PointMeasure::delta(static_cast<int>(i) % m, m)});
        double direct = soup_joint_psi(kernel, alpha, blocks);
        double via_partitions = soup_joint_psi_partition_route(kernel, alpha, blocks);
        std::string tag = spec.name;
        for (int p : layout) tag += "_" + std::to_string(p);
        double scale = std::max({1e-30, std::fabs(direct), std::fabs(via_partitions)});
        rows.push_back(make_residual_row(tag, spec.kind, std::fabs(direct - via_partitions) / scale,
                                         1e-10, 1, seconds_since(t0)));
    }
    return rows;
}

LoopSoup synthetic_soup(const MarkovKernel& kernel, Rng& rng, double alpha) {
    LoopSoup soup;
    soup.alpha = alpha;
    soup.kernel = &kernel;
    const int m = kernel.num_states();
    int n_triv = 1 + static_cast<int>(rng.uniform() * 4);
    for (int i = 0; i < n_triv; ++i)
        soup.loops.push_back(make_trivial_loop(static_cast<int>(rng.uniform() * m),
                                               0.05 + rng.uniform()));
    if (m >= 2) {
        int n_skel = static_cast<int>(rng.uniform() * 3);
        for (int i = 0; i < n_skel; ++i) {
            // odd cyclic words need at least three letters
            int k = m == 2 ? 2 * (1 + static_cast<int>(rng.uniform() * 2))
                           : 2 + static_cast<int>(rng.uniform() * 3);
            std::vector<int> states;
            int prev = -1;
            for (int j = 0; j < k; ++j) {
                int s;
                do {
                    s = static_cast<int>(rng.uniform() * m);
                } while (s == prev || (j == k - 1 && s == states.front()));
                states.push_back(s);
                prev = s;
            }
            std::vector<double> durs;
            for (int j = 0; j < k; ++j) durs.push_back(0.05 + rng.uniform());
            soup.loops.push_back(make_skeleton_loop(std::move(states), std::move(durs)));
        }
    }
    return soup;
}

std::vector<ComparisonRow> check_identity_residuals(const SuiteContext& ctx, const CheckSpec& spec) {
    const MarkovKernel& kernel = *ctx.kernel;
    const LoopMeasure& measure = *ctx.measure;
    const int m = kernel.num_states();
    double alpha = ctx.alpha();
    int n_soups = static_cast<int>(param_or(spec, "soups", 100));
    Rng rng(ctx.cfg->seed, 0xABCULL, 0);

    auto functional_pool = [&](Rng& r, int count) {
        std::vector<SoupFunctional> gs;
        for (int i = 0; i < count; ++i) {
            OccupationPolynomial p;
            int x = static_cast<int>(r.uniform() * m);
            int y = static_cast<int>(r.uniform() * m);
            p += poly_in_state(x, {0.0, 0.3 + 0.4 * r.uniform()});
            p += poly_in_state(y, {0.0, 0.0, 0.1 + 0.2 * r.uniform()});
            gs.push_back(make_functional(measure, p));
        }
        return gs;
    };

    struct Acc {
        std::string tag;
        double worst = 0.0;
    };
    std::vector<Acc> accs = {{"phi_pair_product"},   {"wick_expand_2x1"}, {"wick_expand_2x2"},
                             {"power_expansion"}, {"exp_chaos_product"}, {"wick_pair_product"},
                             {"martingale_split"},   {"add_loop_binomial"}, {"phi_exp_product"}};

    for (int s = 0; s < n_soups; ++s) {
        LoopSoup soup = synthetic_soup(kernel, rng, alpha);
        auto rel = [](double resid, double scale) {
            return std::fabs(resid) / std::max(1.0, std::fabs(scale));
        };

        {  // phi_1 phi_1 = phi_2 + phi_1(g1 g2)
            auto gs = functional_pool(rng, 2);
            double lhs = phi_n(soup, {gs[0]}) * phi_n(soup, {gs[1]});
            double rhs = phi_n(soup, gs) + phi_n(soup, {product_functional(measure, gs[0], gs[1])});
            accs[0].worst = std::max(accs[0].worst, rel(lhs - rhs, lhs));
        }
        {
            auto gs = functional_pool(rng, 3);
            accs[1].worst =
                std::max(accs[1].worst, rel(wick_expand_residual(soup, measure, {2, 1}, gs), 1.0));
        }
        {
            auto gs = functional_pool(rng, 4);
            accs[2].worst =
                std::max(accs[2].worst, rel(wick_expand_residual(soup, measure, {2, 2}, gs), 1.0));
        }
        {
            auto g = functional_pool(rng, 1)[0];
            std::vector<SoupFunctional> rep(4, g);
            accs[3].worst =
                std::max(accs[3].worst, rel(wick_expand_residual(soup, measure, {1, 1, 1, 1}, rep), 1.0));
        }
        {
            auto gs = functional_pool(rng, 2);
            double lhs = exp_chaos(soup, alpha, gs[0]) * exp_chaos(soup, alpha, gs[1]);
            SoupFunctional fg = product_functional(measure, gs[0], gs[1]);
            SoupFunctional sum = make_functional(measure, gs[0].poly + gs[1].poly + fg.poly);
            double rhs = exp_chaos(soup, alpha, sum) * std::exp(alpha * fg.mu_mean);
            accs[4].worst = std::max(accs[4].worst, rel(lhs - rhs, lhs));
        }
        {  // I_1 I_1 = I_2 + I_1(g1 g2) + alpha mu(g1 g2)
            auto gs = functional_pool(rng, 2);
            SoupFunctional fg = product_functional(measure, gs[0], gs[1]);
            double lhs = I_n(soup, alpha, {gs[0]}) * I_n(soup, alpha, {gs[1]});
            double rhs = I_n(soup, alpha, gs) + I_n(soup, alpha, {fg}) + alpha * fg.mu_mean;
            accs[5].worst = std::max(accs[5].worst, rel(lhs - rhs, lhs));
        }
        {
            CoupledSoupPair pair;
            pair.alpha = alpha;
            pair.alpha_prime = 0.5 * alpha;
            pair.base = soup;
            pair.extension = synthetic_soup(kernel, rng, 0.5 * alpha);
            for (int n = 1; n <= 3; ++n) {
                auto gs = functional_pool(rng, n);
                accs[6].worst =
                    std::max(accs[6].worst, rel(martingale_decompose_residual(pair, gs), 1.0));
            }
        }
        {
            BasedLoop extra = synthetic_soup(kernel, rng, alpha).loops.front();
            PointMeasure nu = PointMeasure::delta(static_cast<int>(rng.uniform() * m), m);
            for (int n = 1; n <= 4; ++n)
                accs[7].worst = std::max(
                    accs[7].worst,
                    rel(add_loop_expansion_residual(soup, extra, measure, n, alpha, nu), 1.0));
        }
        {  // product of exponential sums without the centering factors
            auto gs = functional_pool(rng, 2);
            auto prod_over_loops = [&](const SoupFunctional& g) {
                double p = 1.0;
                for (const BasedLoop& loop : soup.loops) p *= 1.0 + g(loop);
                return p;
            };
            SoupFunctional fg = product_functional(measure, gs[0], gs[1]);
            SoupFunctional sum = make_functional(measure, gs[0].poly + gs[1].poly + fg.poly);
            double lhs = prod_over_loops(gs[0]) * prod_over_loops(gs[1]);
            double rhs = prod_over_loops(sum);
            accs[8].worst = std::max(accs[8].worst, rel(lhs - rhs, lhs));
        }
    }

    std::vector<ComparisonRow> rows;
    for (const Acc& acc : accs) {
        double tol = acc.tag == "add_loop_binomial" ? 1e-8 : 1e-10;
        rows.push_back(make_residual_row(spec.name + "." + acc.tag, spec.kind, acc.worst, tol,
                                         static_cast<std::uint64_t>(n_soups), 0.0));
    }
    return rows;
}

std::vector<ComparisonRow> check_chaos_decomposition(const SuiteContext& ctx, const CheckSpec& spec) {
    const MarkovKernel& kernel = *ctx.kernel;
    double alpha = ctx.alpha();
    int n_soups = static_cast<int>(param_or(spec, "soups", 50));
    double tiny_eps = param_or(spec, "epsilon", 1e-10);
    LoopMeasure measure(std::const_pointer_cast<const MarkovKernel>(ctx.kernel), tiny_eps);
    Rng rng(ctx.cfg->seed, 0xDECULL, 0);
    const int m = kernel.num_states();
    PointMeasure nu = PointMeasure::delta(0, m);

    double worst2 = 0.0, worst3 = 0.0, worst_749 = 0.0;
    for (int s = 0; s < n_soups; ++s) {
        LoopSoup soup = measure.sample(alpha, rng);
        double p2 = psi_tilde_n(soup, measure, 2, alpha, nu) - psi_n(soup, measure, 2, nu) -
                    I_ll_chaos(soup, measure, {1, 1}, nu);
        worst2 = std::max(worst2, std::fabs(p2));
        double p3 = psi_tilde_n(soup, measure, 3, alpha, nu) - psi_n(soup, measure, 3, nu) -
                    3.0 * I_ll_chaos(soup, measure, {2, 1}, nu) -
                    I_ll_chaos(soup, measure, {1, 1, 1}, nu);
        worst3 = std::max(worst3, std::fabs(p3));
        for (int n = 1; n <= 3; ++n) {
            double d = I_ll_chaos(soup, measure, {n}, nu) - psi_n(soup, measure, n, nu);
            worst_749 = std::max(worst_749, std::fabs(d));
        }
    }
    std::vector<ComparisonRow> rows;
    rows.push_back(make_residual_row(spec.name + ".wick2_decomposition", spec.kind, worst2, 1e-6,
                                     n_soups, 0.0));
    rows.push_back(make_residual_row(spec.name + ".wick3_decomposition", spec.kind, worst3, 1e-6,
                                     n_soups, 0.0));
    rows.push_back(make_residual_row(spec.name + ".single_block_chaos", spec.kind, worst_749, 1e-6,
                                     n_soups, 0.0));
    return rows;
}

// ---------------------------------------------------------------------------
// Monte Carlo checks
// ---------------------------------------------------------------------------

std::vector<ComparisonRow> check_green_oracle(const SuiteContext& ctx, const CheckSpec& spec) {
    const MarkovKernel& kernel = *ctx.kernel;
    const int m = kernel.num_states();
    std::vector<ComparisonRow> rows;
    for (int x = 0; x < m; ++x) {
        auto t0 = Clock::now();
        auto body = [&, x](Rng& rng, std::vector<double>& out) {
            KilledPath path = simulate_path(kernel, x, rng);
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < path.states.size(); ++i)
                out[path.states[i]] += path.holds[i];
        };
        auto acc = mc_run_vec(spec.budget, ctx.threads(), ctx.cfg->seed, 0x47 + x, m, body, 120.0);
        for (int y = 0; y < m; ++y)
            rows.push_back(make_z_row(spec.name + ".u_" + std::to_string(x) + std::to_string(y),
                                      spec.kind, kernel.u(x, y), acc[y], seconds_since(t0)));
    }
    return rows;
}

std::vector<std::vector<int>> tuples_up_to(int m, int max_size) {
    // multisets of states, sizes 1..max_size
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int start, int remaining) {
        if (!cur.empty()) out.push_back(cur);
        if (remaining == 0) return;
        for (int s = start; s < m; ++s) {
            cur.push_back(s);
            rec(s, remaining - 1);
            cur.pop_back();
        }
    };
    rec(0, max_size);
    return out;
}

std::vector<ComparisonRow> check_mu_moment_oracle(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const int m = ctx.kernel->num_states();
    std::vector<ComparisonRow> rows;
    int idx = 0;
    for (const auto& tuple : tuples_up_to(m, 3)) {
        auto t0 = Clock::now();
        OccupationPolynomial mono = OccupationPolynomial::constant(1.0);
        for (int s : tuple) mono = mono * OccupationPolynomial::occupation(s);
        Rng rng(ctx.cfg->seed, 0x0A0ULL, idx++);
        Estimator est = loop_stratum_oracle(measure, mono, spec.budget, rng);
        std::string tag = spec.name + ".mu";
        for (int s : tuple) tag += std::to_string(s);
        rows.push_back(
            make_z_row(tag, spec.kind, measure.mu_moment(tuple), est.acc, seconds_since(t0)));
    }
    return rows;
}

std::vector<ComparisonRow> check_poisson_count(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    double alpha = ctx.alpha();
    auto t0 = Clock::now();
    Rng rng(ctx.cfg->seed, 0xC0ULL, 0);
    std::vector<std::uint64_t> hist;
    for (std::uint64_t i = 0; i < spec.budget; ++i) {
        LoopSoup soup = measure.sample(alpha, rng);
        std::size_t c = soup.nontrivial_count();
        if (hist.size() <= c) hist.resize(c + 1, 0);
        ++hist[c];
    }
    double p = poisson_chi2_pvalue(hist, alpha * measure.nontrivial_mass(), spec.budget);
    ComparisonRow row;
    row.name = spec.name + ".nontrivial_chi2";
    row.kind = spec.kind;
    row.exact = alpha * measure.nontrivial_mass();
    row.estimate = p;
    row.pass = p > 0.001;
    row.note = "estimate column holds the chi-square p-value";
    row.samples = spec.budget;
    row.seconds = seconds_since(t0);
    return {row};
}

std::vector<ComparisonRow> check_soup_mean(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const int m = ctx.kernel->num_states();
    double alpha = ctx.alpha();
    std::vector<ComparisonRow> rows;
    auto tuples = tuples_up_to(m, 3);
    auto t0 = Clock::now();
    auto body = [&](Rng& rng, std::vector<double>& out) {
        LoopSoup soup = measure.sample(alpha, rng);
        for (std::size_t k = 0; k < tuples.size(); ++k) {
            double sum = 0.0;
            for (const BasedLoop& loop : soup.loops) {
                double p = 1.0;
                for (int s : tuples[k]) p *= loop.occupation(s);
                sum += p;
            }
            out[k] = sum;
        }
    };
    auto acc = mc_run_vec(spec.budget, ctx.threads(), ctx.cfg->seed, 0x5B, tuples.size(), body, 120.0);
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        // exact mean of the truncated sampler for a single occupation factor
        double target = tuples[k].size() == 1
                            ? alpha * measure.epsilon_compensator(tuples[k][0])
                            : alpha * measure.mu_moment(tuples[k]);
        std::string tag = spec.name + ".L";
        for (int s : tuples[k]) tag += std::to_string(s);
        rows.push_back(make_z_row(tag, spec.kind, target, acc[k], seconds_since(t0)));
    }
    return rows;
}

std::vector<ComparisonRow> check_soup_moment(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const MarkovKernel& kernel = *ctx.kernel;
    double alpha = ctx.alpha();
    bool wick = param_or(spec, "wick", 0) != 0.0;
    std::vector<BlockSpec> blocks;
    int max_n = 1;
    for (const auto& [n, name] : spec.blocks) {
        blocks.push_back({n, ctx.named_measure(name)});
        max_n = std::max(max_n, n);
    }
    if (blocks.empty()) throw ConfigError("soup_moment needs a blocks list");
    double target = wick ? soup_joint_psitilde(kernel, alpha, blocks)
                         : soup_joint_psi(kernel, alpha, blocks);
    FieldEvaluator fields(measure, alpha, max_n);
    auto t0 = Clock::now();
    auto body = [&](Rng& rng) {
        LoopSoup soup = measure.sample(alpha, rng);
        double prod = 1.0;
        for (const auto& b : blocks)
            prod *= wick ? fields.psi_tilde_n(soup, b.n, b.nu) : fields.psi_n(soup, b.n, b.nu);
        return prod;
    };
    Welford acc = mc_run(spec.budget, ctx.threads(), ctx.cfg->seed, wick ? 0x71 : 0x70, body, 150.0);
    return {make_z_row(spec.name, spec.kind, target, acc, seconds_since(t0))};
}

std::vector<ComparisonRow> check_wick_covariance(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const MarkovKernel& kernel = *ctx.kernel;
    const int m = kernel.num_states();
    double alpha = ctx.alpha();
    PointMeasure nu = ctx.measure_or_delta(spec.nu, 0);
    PointMeasure nu2 = ctx.measure_or_delta(spec.phi, std::min(1, m - 1));
    FieldEvaluator fields(measure, alpha, 3);
    std::vector<ComparisonRow> rows;
    for (int n = 1; n <= 3; ++n) {
        for (int k = n; k <= 3; ++k) {
            auto t0 = Clock::now();
            double target = 0.0;
            if (n == k) {
                double s = 0.0;
                for (int x : nu.support())
                    for (int y : nu2.support())
                        s += nu(x) * nu2(y) * std::pow(kernel.u(x, y) * kernel.u(y, x), n);
                target = rising_factorial_sum(n, alpha) * s;
            }
            auto body = [&](Rng& rng) {
                LoopSoup soup = measure.sample(alpha, rng);
                return fields.psi_tilde_n(soup, n, nu) * fields.psi_tilde_n(soup, k, nu2);
            };
            Welford acc = mc_run(spec.budget, ctx.threads(), ctx.cfg->seed,
                                 0x900 + 0x10 * n + k, body, 150.0);
            rows.push_back(make_z_row(spec.name + ".n" + std::to_string(n) + "k" + std::to_string(k),
                                      spec.kind, target, acc, seconds_since(t0)));
        }
    }
    return rows;
}

std::vector<ComparisonRow> check_theta_mean(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const MarkovKernel& kernel = *ctx.kernel;
    const int m = kernel.num_states();
    double alpha = ctx.alpha();
    PointMeasure rho = ctx.measure_or_delta(spec.rho, 0);
    PointMeasure phi = ctx.measure_or_delta(spec.phi, std::min(1, m - 1));
    ThetaFunctional theta{rho, phi};
    auto t0 = Clock::now();
    auto body = [&](Rng& rng) { return theta.value(measure.sample(alpha, rng)); };
    Welford acc = mc_run(spec.budget, ctx.threads(), ctx.cfg->seed, 0x7711, body, 120.0);
    return {make_z_row(spec.name, spec.kind, theta_mean(kernel, alpha, rho, phi), acc,
                       seconds_since(t0))};
}

std::vector<ComparisonRow> check_chaos_stats(const SuiteContext& ctx, const CheckSpec& spec) {
    const LoopMeasure& measure = *ctx.measure;
    const MarkovKernel& kernel = *ctx.kernel;
    const int m = kernel.num_states();
    double alpha = ctx.alpha();
    std::vector<ComparisonRow> rows;
    const std::uint64_t budget = spec.budget;

    // functionals: occupations at cycling states
    std::vector<SoupFunctional> occ;
    for (int x = 0; x < std::min(m, 3); ++x)
        occ.push_back(make_functional(measure, OccupationPolynomial::occupation(x)));
    while (occ.size() < 3) occ.push_back(occ.front());

    {  // E[I_n] = 0 for n <= 3
        for (int n = 1; n <= 3; ++n) {
            auto t0 = Clock::now();
            std::vector<SoupFunctional> gs(occ.begin(), occ.begin() + n);
            auto body = [&](Rng& rng) { return I_n(measure.sample(alpha, rng), alpha, gs); };
            Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE00 + n, body, 120.0);
            rows.push_back(make_z_row(spec.name + ".EI" + std::to_string(n), spec.kind, 0.0, acc,
                                      seconds_since(t0)));
        }
    }
    {  // E[I_1(f) I_1(g)] = alpha mu(fg)
        auto t0 = Clock::now();
        SoupFunctional fg = product_functional(measure, occ[0], occ[1 % occ.size()]);
        auto body = [&](Rng& rng) {
            LoopSoup soup = measure.sample(alpha, rng);
            return I_n(soup, alpha, {occ[0]}) * I_n(soup, alpha, {occ[1 % occ.size()]});
        };
        Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE10, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".I1I1", spec.kind, alpha * fg.mu_mean, acc,
                                  seconds_since(t0)));
    }
    {  // orthogonality: E[I_1 I_2] = 0, E[I_2 I_2] from the partition formula
        auto t0 = Clock::now();
        std::vector<SoupFunctional> g2{occ[0], occ[1 % occ.size()]};
        auto body12 = [&](Rng& rng) {
            LoopSoup soup = measure.sample(alpha, rng);
            return I_n(soup, alpha, {occ[0]}) * I_n(soup, alpha, g2);
        };
        Welford acc12 = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE20, body12, 120.0);
        rows.push_back(make_z_row(spec.name + ".I1I2", spec.kind, 0.0, acc12, seconds_since(t0)));

        std::vector<SoupFunctional> all{g2[0], g2[1], g2[0], g2[1]};
        double target = poisson_joint_I(measure, alpha, {2, 2}, all);
        auto body22 = [&](Rng& rng) {
            LoopSoup soup = measure.sample(alpha, rng);
            double v = I_n(soup, alpha, g2);
            return v * v;
        };
        Welford acc22 = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE21, body22, 120.0);
        rows.push_back(make_z_row(spec.name + ".I2I2_pairing", spec.kind, target, acc22,
                                  seconds_since(t0)));
    }
    {  // E[exp chaos] = 1 for the bounded tanh functional (mu by quadrature)
        auto t0 = Clock::now();
        auto h = [](double t) { return 0.5 * std::tanh(t); };
        double mu_h = measure.mu_nonlinear(0, h);
        auto g = [&](const BasedLoop& loop) { return h(loop.occupation(0)); };
        auto body = [&](Rng& rng) { return exp_chaos(measure.sample(alpha, rng), alpha, g, mu_h); };
        Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE30, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".exp_tanh_unit_mean", spec.kind, 1.0, acc,
                                  seconds_since(t0)));
    }
    {  // same with the closed-form bounded functional
        auto t0 = Clock::now();
        double beta = 0.4, lambda = 0.8;
        std::vector<double> lam(m, 0.0);
        lam[0] = lambda;
        double mu_g = beta * measure.laplace_functional(lam);
        auto g = [&](const BasedLoop& loop) {
            return beta * (1.0 - std::exp(-lambda * loop.occupation(0)));
        };
        auto body = [&](Rng& rng) { return exp_chaos(measure.sample(alpha, rng), alpha, g, mu_g); };
        Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE31, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".exp_laplace_unit_mean", spec.kind, 1.0, acc,
                                  seconds_since(t0)));
    }
    {  // multi-exponential moment for N = 2, 3
        for (int N = 2; N <= 3; ++N) {
            auto t0 = Clock::now();
            std::vector<double> beta(N), lambda(N);
            std::vector<int> site(N);
            for (int i = 0; i < N; ++i) {
                beta[i] = 0.25 + 0.1 * i;
                lambda[i] = 0.6 + 0.3 * i;
                site[i] = i % m;
            }
            // mu of a product of the bounded functionals via inclusion-exclusion
            auto mu_product = [&](const std::vector<int>& members) {
                double total = 0.0;
                int nb = static_cast<int>(members.size());
                for (std::size_t s = 1; s < (1ULL << nb); ++s) {
                    std::vector<double> lam(m, 0.0);
                    int bits = 0;
                    for (int i = 0; i < nb; ++i)
                        if (s & (1ULL << i)) {
                            lam[site[members[i]]] += lambda[members[i]];
                            ++bits;
                        }
                    total += (bits % 2 == 1 ? 1.0 : -1.0) * measure.laplace_functional(lam);
                }
                for (int i : members) total *= beta[i];
                return total;
            };
            double exponent = 0.0;
            for (std::size_t b = 1; b < (1ULL << N); ++b) {
                std::vector<int> members;
                for (int i = 0; i < N; ++i)
                    if (b & (1ULL << i)) members.push_back(i);
                if (members.size() < 2) continue;
                exponent += alpha * mu_product(members);
            }
            double target = std::exp(exponent);
            std::vector<double> mu_single(N);
            for (int i = 0; i < N; ++i) mu_single[i] = mu_product({i});
            auto body = [&](Rng& rng) {
                LoopSoup soup = measure.sample(alpha, rng);
                double prod = 1.0;
                for (int i = 0; i < N; ++i) {
                    auto g = [&](const BasedLoop& loop) {
                        return beta[i] * (1.0 - std::exp(-lambda[i] * loop.occupation(site[i])));
                    };
                    prod *= exp_chaos(soup, alpha, g, mu_single[i]);
                }
                return prod;
            };
            Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE40 + N, body, 120.0);
            rows.push_back(make_z_row(spec.name + ".multi_exp_N" + std::to_string(N) + "",
                                      spec.kind, target, acc, seconds_since(t0)));
        }
    }
    {  // martingale: conditional mean of I_2 over extensions of a fixed base soup
        auto t0 = Clock::now();
        Rng base_rng(ctx.cfg->seed, 0xE50, 0);
        LoopSoup base = measure.sample(alpha, base_rng);
        std::vector<SoupFunctional> gs{occ[0], occ[1 % occ.size()]};
        double target = I_n(base, alpha, gs);
        double alpha_prime = 0.5 * alpha;
        auto body = [&](Rng& rng) {
            CoupledSoupPair pair;
            pair.alpha = alpha;
            pair.alpha_prime = alpha_prime;
            pair.base = base;
            pair.extension = measure.sample(alpha_prime, rng);
            return I_n(pair.combined(), alpha + alpha_prime, gs);
        };
        Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE51, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".martingale_cond_mean", spec.kind, target, acc,
                                  seconds_since(t0)));
    }
    {  // combined pair loop count is Poisson((a+a') * total mass): mean check
        auto t0 = Clock::now();
        double alpha_prime = 0.5 * alpha;
        double target = (alpha + alpha_prime) * measure.total_sampled_mass();
        auto body = [&](Rng& rng) {
            CoupledSoupPair pair = sample_coupled_pair(measure, alpha, alpha_prime, rng);
            return static_cast<double>(pair.combined().loops.size());
        };
        Welford acc = mc_run(budget / 4 + 1, ctx.threads(), ctx.cfg->seed, 0xE52, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".coupled_count", spec.kind, target, acc,
                                  seconds_since(t0)));
    }
    {  // E[I_{1,1}(nu) I_{1,1}(nu')] against the closed form
        auto t0 = Clock::now();
        PointMeasure nu = PointMeasure::delta(0, m);
        PointMeasure nu2 = PointMeasure::delta(std::min(1, m - 1), m);
        double target = I_ll_covariance(kernel, alpha, {1, 1}, {1, 1}, nu, nu2);
        auto body = [&](Rng& rng) {
            LoopSoup soup = measure.sample(alpha, rng);
            return I_ll_chaos(soup, measure, {1, 1}, nu) * I_ll_chaos(soup, measure, {1, 1}, nu2);
        };
        Welford acc = mc_run(budget, ctx.threads(), ctx.cfg->seed, 0xE60, body, 120.0);
        rows.push_back(make_z_row(spec.name + ".I11_covariance", spec.kind, target, acc,
                                  seconds_since(t0)));
    }
    return rows;
}

std::vector<ComparisonRow> check_iso(const SuiteContext& ctx, const CheckSpec& spec, bool second) {
    const LoopMeasure& measure = *ctx.measure;
    const int m = ctx.kernel->num_states();
    double alpha = ctx.alpha();
    PointMeasure rho = ctx.measure_or_delta(spec.rho, 0);
    PointMeasure phi = ctx.measure_or_delta(spec.phi, 0);
    TestFunction F = pick_test_function(spec.test_function);
    auto t0 = Clock::now();
    IsoReport rep;
    if (!second) {
        std::vector<std::pair<int, PointMeasure>> blocks;
        for (const auto& [n, name] : spec.blocks) blocks.emplace_back(n, ctx.named_measure(name));
        if (blocks.empty()) blocks.emplace_back(1, PointMeasure::delta(std::min(1, m - 1), m));
        rep = iso_one_check(measure, alpha, rho, phi, blocks, F, spec.budget, ctx.cfg->seed,
                            ctx.threads());
    } else {
        int n = static_cast<int>(param_or(spec, "n", 2));
        PointMeasure nu = ctx.measure_or_delta(spec.nu, 0);
        rep = iso_two_check(measure, alpha, rho, phi, n, nu, F, spec.budget, ctx.cfg->seed,
                            ctx.threads());
    }
    ComparisonRow row;
    row.name = spec.name;
    row.kind = spec.kind;
    row.exact = rep.rhs;
    row.estimate = rep.lhs;
    row.stderror = std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
    row.z = rep.z;
    row.pass = std::isfinite(rep.z) && std::fabs(rep.z) <= kZThreshold;
    row.samples = rep.samples;
    row.seconds = seconds_since(t0);
    row.note = "two-sample: exact column holds the theta-side estimate";
    return {row};
}

}  // namespace

std::vector<ComparisonRow> run_suite(const SuiteConfig& config, bool exact_only, bool mc_only) {
    SuiteContext ctx;
    ctx.cfg = &config;
    ctx.kernel = std::make_shared<const MarkovKernel>(build_kernel(config.rates));
    ctx.measure = std::make_shared<const LoopMeasure>(ctx.kernel, config.epsilon);

    std::vector<ComparisonRow> rows;
    for (const CheckSpec& spec : config.checks) {
        bool exact = is_exact_check_kind(spec.kind);
        if (exact_only && !exact) continue;
        if (mc_only && exact) continue;
        auto t0 = Clock::now();
        try {
            std::vector<ComparisonRow> part;
            if (spec.kind == "kernel_invariants") part = check_kernel_invariants(ctx, spec);
            else if (spec.kind == "cycle_sum") part = check_cycle_sum(ctx, spec);
            else if (spec.kind == "counting") part = check_counting(ctx, spec);
            else if (spec.kind == "cross_engine") part = check_cross_engine(ctx, spec);
            else if (spec.kind == "partition_identity") part = check_partition_identity(ctx, spec);
            else if (spec.kind == "identity_residuals") part = check_identity_residuals(ctx, spec);
            else if (spec.kind == "chaos_decomposition") part = check_chaos_decomposition(ctx, spec);
            else if (spec.kind == "green_oracle") part = check_green_oracle(ctx, spec);
            else if (spec.kind == "mu_moment_oracle") part = check_mu_moment_oracle(ctx, spec);
            else if (spec.kind == "poisson_count") part = check_poisson_count(ctx, spec);
            else if (spec.kind == "soup_mean") part = check_soup_mean(ctx, spec);
            else if (spec.kind == "soup_moment") part = check_soup_moment(ctx, spec);
            else if (spec.kind == "wick_covariance") part = check_wick_covariance(ctx, spec);
            else if (spec.kind == "chaos_stats") part = check_chaos_stats(ctx, spec);
            else if (spec.kind == "theta_mean_check") part = check_theta_mean(ctx, spec);
            else if (spec.kind == "iso_one") part = check_iso(ctx, spec, false);
            else if (spec.kind == "iso_two") part = check_iso(ctx, spec, true);
            else throw ConfigError("unknown check kind '" + spec.kind + "'");
            rows.insert(rows.end(), part.begin(), part.end());
        } catch (const std::exception& e) {
            ComparisonRow row;
            row.name = spec.name;
            row.kind = spec.kind;
            row.pass = false;
            row.note = e.what();
            row.seconds = seconds_since(t0);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace soup
