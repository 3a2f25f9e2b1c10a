#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soup/mc_engine.hpp"
#include "soup/point_measure.hpp"

namespace soup {

struct CheckSpec {
    std::string name;
    std::string kind;
    std::uint64_t budget = 100000;
    std::vector<std::pair<int, std::string>> blocks;  // (order, measure name)
    std::string rho, phi, nu;
    std::string test_function;  // const_one | inv_quadratic | cos
    std::map<std::string, double> params;
};

struct RadialSpec {
    int d = 1;
    double index = 0.9;
    int k_max = 3;
    double r_min = 1.0;
    double r_max = 1e4;
    int points_per_decade = 64;
    bool defaults_applied = false;
};

struct SuiteConfig {
    Eigen::MatrixXd rates;
    std::vector<double> alphas{1.0};
    double epsilon = 1e-8;
    std::uint64_t seed = 42;
    int threads = 1;
    std::map<std::string, PointMeasure> measures;
    std::vector<CheckSpec> checks;
    std::optional<RadialSpec> radial;
    std::string report_path = "report.json";
    std::string soup_path = "soups.txt";
    std::string csv_dir = ".";
};

// Strict JSON parsing: unknown keys are rejected with ConfigError.
SuiteConfig parse_config_text(const std::string& json_text);
SuiteConfig load_config(const std::string& path);
std::string serialize_config(const SuiteConfig& config);

std::string serialize_report(const std::vector<ComparisonRow>& rows);

// true when the check kind runs under `verify` (exact arithmetic), false
// for Monte Carlo kinds run under `estimate`
bool is_exact_check_kind(const std::string& kind);
bool is_known_check_kind(const std::string& kind);

}  // namespace soup
