#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soup/config.hpp"

using namespace soup;

namespace {

const char* kMinimal = R"({
  "kernel": {"rates": [[-1.0, 0.5], [0.25, -1.0]]},
  "alpha": [1.0, 2.5],
  "epsilon": 1e-6,
  "seed": 7,
  "threads": 3,
  "measures": {"d0": [1.0, 0.0]},
  "checks": [
    {"name": "k", "kind": "kernel_invariants"},
    {"name": "iso", "kind": "iso_one", "budget": 1000, "rho": "d0", "phi": "d0",
     "blocks": [[2, "d0"]], "F": "cos", "params": {"n": 2}}
  ],
  "radial": {"d": 2, "index": 1.6, "k_max": 2,
             "grid": {"r_min": 1.0, "r_max": 100.0, "points_per_decade": 64}},
  "output": {"report": "r.json", "soups": "s.txt", "csv_dir": "csv"}
})";

}  // namespace

TEST_CASE("config parses and round-trips through its canonical form") {
    SuiteConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.rates(0, 1) == doctest::Approx(0.5));
    CHECK(cfg.alphas.size() == 2);
    CHECK(cfg.epsilon == doctest::Approx(1e-6));
    CHECK(cfg.seed == 7);
    CHECK(cfg.threads == 3);
    CHECK(cfg.measures.count("d0") == 1);
    REQUIRE(cfg.checks.size() == 2);
    CHECK(cfg.checks[1].blocks.size() == 1);
    CHECK(cfg.checks[1].test_function == "cos");
    REQUIRE(cfg.radial.has_value());
    CHECK(cfg.radial->d == 2);

    std::string canon = serialize_config(cfg);
    SuiteConfig again = parse_config_text(canon);
    CHECK(serialize_config(again) == canon);
}

TEST_CASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(parse_config_text(R"({"kernel": {"rates": [[-1.0]]}, "bogus": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"kernel": {"rates": [[-1.0]], "extra": 2}})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"kernel": {"rates": [[-1.0]]}, "checks": [{"name": "a", "kind": "cycle_sum", "surprise": 3}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"kernel": {"rates": [[-1.0]]}, "checks": [{"name": "a", "kind": "nope"}]})"),
        ConfigError);
}

TEST_CASE("structural validation") {
    CHECK_THROWS_AS(parse_config_text(R"({"kernel": {"rates": [[-1.0, 0.5]]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({})"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"kernel": {"rates": [[-1.0]]}, "measures": {"m": [1.0, 2.0]}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"kernel": {"rates": [[-1.0]]}, "radial": {"d": 3}})"),
        UnsupportedDimension);
}

TEST_CASE("radial defaults are applied and noted when the grid is missing") {
    SuiteConfig cfg = parse_config_text(
        R"({"kernel": {"rates": [[-1.0]]}, "radial": {"d": 1, "index": 0.9, "k_max": 2}})");
    REQUIRE(cfg.radial.has_value());
    CHECK(cfg.radial->defaults_applied);
    CHECK(cfg.radial->r_min == doctest::Approx(1.0));
    CHECK(cfg.radial->points_per_decade == 64);
}

TEST_CASE("report serialization carries the full row schema") {
    ComparisonRow row;
    row.name = "x";
    row.kind = "k";
    row.exact = 1.0;
    row.estimate = 1.01;
    row.stderror = 0.01;
    row.z = 1.0;
    row.pass = true;
    row.samples = 10;
    row.seconds = 0.5;
    std::string s = serialize_report({row});
    for (const char* key : {"\"name\"", "\"kind\"", "\"exact\"", "\"estimate\"", "\"stderr\"",
                            "\"z\"", "\"residual\"", "\"pass\"", "\"samples\"", "\"seconds\""})
        CHECK(s.find(key) != std::string::npos);
    CHECK(s.find("\"residual\": null") != std::string::npos);
}
