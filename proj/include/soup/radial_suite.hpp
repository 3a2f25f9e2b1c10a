#pragma once

#include <vector>

#include "soup/config.hpp"
#include "soup/mc_engine.hpp"

namespace soup {

// Runs the regular-variation checks for the configured dimension/index and
// drops (radius, value, reference, ratio) CSV tables into csv_dir.
std::vector<ComparisonRow> run_radial_suite(const RadialSpec& spec, const std::string& csv_dir);

}  // namespace soup
