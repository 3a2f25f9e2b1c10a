#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "soup/config.hpp"
#include "soup/loop_measure.hpp"
#include "soup/radial_suite.hpp"

namespace {

int write_report(const soup::SuiteConfig& cfg, const std::string& out_override,
                 const std::vector<soup::ComparisonRow>& rows) {
    std::string path = out_override.empty() ? cfg.report_path : out_override;
    std::ofstream os(path);
    if (!os) {
        std::cerr << "cannot write report to " << path << "\n";
        return 2;
    }
    os << soup::serialize_report(rows) << "\n";
    std::size_t passed = 0;
    for (const auto& r : rows) passed += r.pass;
    std::cerr << passed << "/" << rows.size() << " rows passed; report written to " << path << "\n";
    return 0;
}

soup::SuiteConfig load(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                       int threads_override) {
    soup::SuiteConfig cfg = soup::load_config(config_path);
    if (has_seed) cfg.seed = seed_override;
    if (threads_override > 0) cfg.threads = threads_override;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loopsoup: exact and Monte Carlo checks for loop-soup functionals of killed "
                 "finite-state Markov chains"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int threads = 0;
    long sample_count = 10;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config path")->required();
        cmd->add_option("--out", out_path, "output path override");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            has_seed = true;
        });
        cmd->add_option("--threads", threads, "worker thread count");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the exact-identity checks");
    add_common(verify);
    CLI::App* estimate = app.add_subcommand("estimate", "run the Monte Carlo comparison checks");
    add_common(estimate);
    CLI::App* sample = app.add_subcommand("sample", "write sampled loop soups");
    add_common(sample);
    sample->add_option("--count", sample_count, "number of soups to write");
    CLI::App* radial = app.add_subcommand("radial", "run the radial-asymptotics checks");
    add_common(radial);

    CLI11_PARSE(app, argc, argv);

    try {
        soup::SuiteConfig cfg = load(config_path, seed, has_seed, threads);

        if (verify->parsed()) {
            auto rows = soup::run_suite(cfg, /*exact_only=*/true, /*mc_only=*/false);
            int rc = write_report(cfg, out_path, rows);
            if (rc != 0) return rc;
            for (const auto& r : rows)
                if (!r.pass) return 1;
            return 0;
        }
        if (estimate->parsed()) {
            auto rows = soup::run_suite(cfg, /*exact_only=*/false, /*mc_only=*/true);
            int rc = write_report(cfg, out_path, rows);
            if (rc != 0) return rc;
            if (rows.empty()) return 0;
            std::size_t passed = 0;
            for (const auto& r : rows) passed += r.pass;
            return passed * 100 >= rows.size() * 95 ? 0 : 1;
        }
        if (sample->parsed()) {
            auto kernel = std::make_shared<const soup::MarkovKernel>(soup::build_kernel(cfg.rates));
            soup::LoopMeasure measure(kernel, cfg.epsilon);
            soup::Rng rng(cfg.seed, 0x5A3ULL, 0);
            std::vector<soup::LoopSoup> soups;
            for (long i = 0; i < sample_count; ++i)
                soups.push_back(measure.sample(cfg.alphas.front(), rng));
            std::string path = out_path.empty() ? cfg.soup_path : out_path;
            std::ofstream os(path);
            if (!os) {
                std::cerr << "cannot write soups to " << path << "\n";
                return 2;
            }
            soup::write_soups(os, soups);
            return 0;
        }
        if (radial->parsed()) {
            if (!cfg.radial) throw soup::ConfigError("config has no 'radial' section");
            std::string csv_dir = out_path.empty() ? cfg.csv_dir : out_path;
            auto rows = soup::run_radial_suite(*cfg.radial, csv_dir);
            int rc = write_report(cfg, std::string(), rows);
            if (rc != 0) return rc;
            for (const auto& r : rows)
                if (!r.pass) return 1;
            return 0;
        }
    } catch (const soup::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const soup::UnsupportedDimension& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const soup::SingularGenerator& e) {
        std::cerr << "config error: SingularGenerator: " << e.what() << "\n";
        return 2;
    } catch (const soup::NegativeRate& e) {
        std::cerr << "config error: NegativeRate: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
