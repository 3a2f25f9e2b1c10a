#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "soup/loop_measure.hpp"
#include "soup/poisson_chaos.hpp"
#include "soup/util.hpp"

namespace soup {

// Running estimator with an optional known target.
struct Estimator {
    std::string name;
    Welford acc;
    std::optional<double> target;

    void add(double x) { acc.add(x); }
    double mean() const { return acc.mean(); }
    double stderror() const { return acc.stderror(); }
    std::uint64_t count() const { return acc.count(); }
    double z() const { return target ? (mean() - *target) / stderror() : 0.0; }
};

struct ComparisonRow {
    std::string name;
    std::string kind;
    std::optional<double> exact;
    std::optional<double> estimate;
    std::optional<double> stderror;
    std::optional<double> z;
    std::optional<double> residual;
    bool pass = false;
    std::uint64_t samples = 0;
    double seconds = 0.0;
    std::string note;
};

constexpr double kZThreshold = 4.0;

ComparisonRow make_z_row(const std::string& name, const std::string& kind, double exact,
                         const Welford& acc, double seconds);
ComparisonRow make_residual_row(const std::string& name, const std::string& kind, double residual,
                                double tol, std::uint64_t samples, double seconds);
ComparisonRow make_exact_row(const std::string& name, const std::string& kind, double expected,
                             double got, double rel_tol, double seconds);

// Runs `samples` draws of `body` split over `threads` shards with derived
// counter-based streams; per-shard Welfords merge in shard order so the
// result is independent of scheduling. `body` returns one sample value.
// A wall-clock cap stops early; the sample count actually used is recorded
// in the returned Welford's count.
Welford mc_run(std::uint64_t samples, int threads, std::uint64_t seed, std::uint64_t check_id,
               const std::function<double(Rng&)>& body, double time_cap_seconds = 60.0);

// As mc_run, but each draw produces `dim` values accumulated componentwise.
std::vector<Welford> mc_run_vec(std::uint64_t samples, int threads, std::uint64_t seed,
                                std::uint64_t check_id, std::size_t dim,
                                const std::function<void(Rng&, std::vector<double>&)>& body,
                                double time_cap_seconds = 60.0);

// Estimates mu(functional) by exact trivial-stratum Gamma moments plus
// importance sampling of the skeleton stratum. Independent of the
// circular-permutation formula by construction.
Estimator loop_stratum_oracle(const LoopMeasure& measure, const OccupationPolynomial& functional,
                              std::uint64_t budget, Rng& rng);

// chi-square p-value for observed counts against a Poisson(mean) law,
// pooling tail bins to expected counts >= 5
double poisson_chi2_pvalue(const std::vector<std::uint64_t>& histogram, double mean,
                           std::uint64_t total);

struct SuiteConfig;  // defined in config.hpp

// Executes the configured checks; rows of failed checks are marked rather
// than aborting the suite.
std::vector<ComparisonRow> run_suite(const SuiteConfig& config, bool exact_only, bool mc_only);

}  // namespace soup
