// Acceptance suite: runs every shipped criterion at its stated budget and
// tolerance and prints one pass/fail line per criterion.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "soup/config.hpp"
#include "soup/radial_suite.hpp"

using namespace soup;

namespace {

int g_failures = 0;

SuiteConfig base_config(bool four_state) {
    SuiteConfig cfg;
    if (!four_state) {
        cfg.rates.resize(2, 2);
        cfg.rates << -1.0, 0.5, 0.25, -1.0;
        cfg.measures.emplace("d0", PointMeasure::delta(0, 2));
        cfg.measures.emplace("d1", PointMeasure::delta(1, 2));
    } else {
        cfg.rates.resize(4, 4);
        cfg.rates << -2.0, 0.6, 0.5, 0.4,
                      0.3, -1.5, 0.4, 0.2,
                      0.2, 0.7, -1.8, 0.6,
                      0.5, 0.3, 0.2, -1.1;
        for (int i = 0; i < 4; ++i)
            cfg.measures.emplace("d" + std::to_string(i), PointMeasure::delta(i, 4));
    }
    cfg.alphas = {1.0};
    cfg.epsilon = 1e-8;
    cfg.seed = 20260810;
    cfg.threads = 2;
    return cfg;
}

std::vector<ComparisonRow> run_one(SuiteConfig cfg, CheckSpec spec) {
    cfg.checks = {std::move(spec)};
    return run_suite(cfg, false, false);
}

void report(int id, const std::string& title, const std::vector<ComparisonRow>& rows) {
    std::size_t passed = 0;
    for (const auto& r : rows) passed += r.pass;
    bool ok = passed == rows.size() && !rows.empty();
    if (!ok) ++g_failures;
    std::printf("[%s] criterion %2d: %s (%zu/%zu rows)\n", ok ? "PASS" : "FAIL", id, title.c_str(),
                passed, rows.size());
    if (!ok) {
        for (const auto& r : rows) {
            if (r.pass) continue;
            std::printf("        failed row %s", r.name.c_str());
            if (r.z) std::printf("  z=%.3f", *r.z);
            if (r.residual) std::printf("  residual=%.3e", *r.residual);
            if (!r.note.empty()) std::printf("  note=%s", r.note.c_str());
            std::printf("\n");
        }
    }
    std::fflush(stdout);
}

void append(std::vector<ComparisonRow>& all, const std::vector<ComparisonRow>& part) {
    all.insert(all.end(), part.begin(), part.end());
}

CheckSpec spec_of(const std::string& name, const std::string& kind, std::uint64_t budget = 100000) {
    CheckSpec s;
    s.name = name;
    s.kind = kind;
    s.budget = budget;
    return s;
}

}  // namespace

int main() {
    SuiteConfig two = base_config(false);
    SuiteConfig four = base_config(true);

    // 1. green-function oracle on both fixtures at 1e6 paths
    {
        std::vector<ComparisonRow> rows;
        append(rows, run_one(two, spec_of("green2", "green_oracle", 1000000)));
        append(rows, run_one(four, spec_of("green4", "green_oracle", 1000000)));
        append(rows, run_one(two, spec_of("kernel2", "kernel_invariants")));
        append(rows, run_one(four, spec_of("kernel4", "kernel_invariants")));
        report(1, "path-simulation green oracle and resolvent identity", rows);
    }

    // 2. loop-measure exactness: stratified oracle, decomposition, counts
    {
        std::vector<ComparisonRow> rows;
        append(rows, run_one(two, spec_of("mu2", "mu_moment_oracle", 400000)));
        append(rows, run_one(four, spec_of("mu4", "mu_moment_oracle", 120000)));
        append(rows, run_one(two, spec_of("count2", "poisson_count", 120000)));
        append(rows, run_one(four, spec_of("count4", "poisson_count", 120000)));
        append(rows, run_one(two, spec_of("mean2", "soup_mean", 120000)));
        report(2, "loop-measure moments, sampler decomposition, poisson counts", rows);
    }

    // 3. cycle-sum identity, exact
    report(3, "cycle-weighted sums equal the rising factorial", [&] {
        CheckSpec s = spec_of("cycle", "cycle_sum");
        s.params["n_max"] = 4;
        return run_one(two, s);
    }());

    // 4. remove-and-relabel counting against brute force
    report(4, "counting formulas, worked values and brute-force fibers", [&] {
        CheckSpec s = spec_of("counting", "counting");
        s.params["max_weight"] = 5;
        return run_one(two, s);
    }());

    // 5. cross-engine exactness of the joint mu moments
    {
        std::vector<ComparisonRow> rows;
        CheckSpec s = spec_of("cross4", "cross_engine");
        s.params["max_total"] = 6;
        append(rows, run_one(four, s));
        CheckSpec s2 = spec_of("cross2", "cross_engine");
        s2.params["max_total"] = 6;
        append(rows, run_one(two, s2));
        report(5, "alternating-map formula equals the polynomial expansion", rows);
    }

    // 6. soup moment formulas against simulation, plus the partition identity
    {
        std::vector<ComparisonRow> rows;
        auto add_moment = [&](const SuiteConfig& cfg, const std::string& name, bool wick,
                              std::vector<std::pair<int, std::string>> blocks,
                              std::uint64_t budget) {
            CheckSpec s = spec_of(name, "soup_moment", budget);
            s.blocks = std::move(blocks);
            if (wick) s.params["wick"] = 1;
            append(rows, run_one(cfg, s));
        };
        add_moment(two, "psi_11", false, {{1, "d0"}, {1, "d1"}}, 400000);
        add_moment(two, "psi_22", false, {{2, "d0"}, {2, "d1"}}, 400000);
        add_moment(two, "psi_211", false, {{2, "d0"}, {1, "d1"}, {1, "d0"}}, 400000);
        add_moment(four, "psi_1111", false, {{1, "d0"}, {1, "d1"}, {1, "d2"}, {1, "d3"}}, 300000);
        add_moment(two, "psit_11", true, {{1, "d0"}, {1, "d1"}}, 400000);
        add_moment(two, "psit_22", true, {{2, "d0"}, {2, "d1"}}, 400000);
        add_moment(four, "psit_111", true, {{1, "d0"}, {1, "d1"}, {1, "d2"}}, 300000);
        add_moment(two, "psit_31", true, {{3, "d0"}, {1, "d1"}}, 400000);
        append(rows, run_one(four, spec_of("partition", "partition_identity")));
        report(6, "soup moment formulas and the partition identity", rows);
    }

    // 7. wick covariance: orthogonality and the rising-factorial diagonal
    {
        CheckSpec s = spec_of("wick", "wick_covariance", 500000);
        s.nu = "d0";
        s.phi = "d1";
        report(7, "wick power covariance structure", run_one(two, s));
    }

    // 8. isomorphism theorems I and II at 1e6 samples per side
    {
        std::vector<ComparisonRow> rows;
        auto add_iso = [&](const std::string& name, bool second, int n, const std::string& F) {
            CheckSpec s = spec_of(name, second ? "iso_two" : "iso_one", 1000000);
            s.rho = "d0";
            s.phi = "d0";
            s.test_function = F;
            if (second) {
                s.nu = "d1";
                s.params["n"] = n;
            } else {
                s.blocks = {{n, "d1"}};
            }
            append(rows, run_one(two, s));
        };
        add_iso("iso1_const_n1", false, 1, "const_one");
        add_iso("iso1_invq_n1", false, 1, "inv_quadratic");
        add_iso("iso1_invq_n2", false, 2, "inv_quadratic");
        add_iso("iso2_n1", true, 1, "inv_quadratic");
        add_iso("iso2_n2", true, 2, "inv_quadratic");
        add_iso("iso2_cos_n2", true, 2, "cos");
        report(8, "isomorphism theorems I and II", rows);
    }

    // 9. algebraic identity residuals and the chaos decomposition
    {
        std::vector<ComparisonRow> rows;
        CheckSpec s = spec_of("residuals", "identity_residuals");
        s.params["soups"] = 100;
        append(rows, run_one(two, s));
        CheckSpec s4 = spec_of("residuals4", "identity_residuals");
        s4.params["soups"] = 100;
        append(rows, run_one(four, s4));
        CheckSpec c = spec_of("chaos_dec", "chaos_decomposition");
        c.params["soups"] = 60;
        c.params["epsilon"] = 1e-10;
        append(rows, run_one(two, c));
        report(9, "per-realization identity residuals and chaos decomposition", rows);
    }

    // 10. poisson chaos statistics
    {
        std::vector<ComparisonRow> rows;
        append(rows, run_one(two, spec_of("chaos2", "chaos_stats", 250000)));
        CheckSpec theta = spec_of("theta", "theta_mean_check", 200000);
        theta.rho = "d0";
        theta.phi = "d0";
        append(rows, run_one(two, theta));
        CheckSpec theta_mixed = spec_of("theta_mixed", "theta_mean_check", 200000);
        theta_mixed.rho = "d0";
        theta_mixed.phi = "d1";
        append(rows, run_one(two, theta_mixed));
        report(10, "poisson chaos statistics and martingale coupling", rows);
    }

    // 11. radial asymptotics in both dimensions
    {
        std::filesystem::create_directories("acceptance_csv");
        std::vector<ComparisonRow> rows;
        RadialSpec d1;
        d1.d = 1;
        d1.index = 0.9;
        d1.k_max = 3;
        d1.r_min = 1.0;
        d1.r_max = 1e4;
        append(rows, run_radial_suite(d1, "acceptance_csv"));
        RadialSpec d2;
        d2.d = 2;
        d2.index = 1.6;
        d2.k_max = 3;
        d2.r_min = 1.0;
        d2.r_max = 1e3;
        append(rows, run_radial_suite(d2, "acceptance_csv"));
        report(11, "regular-variation indices, bands and growth ratios", rows);
    }

    if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
