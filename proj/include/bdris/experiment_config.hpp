#pragma once

// Flat "key = value" experiment description. Lines starting with '#' are
// comments. Recognised keys:
//
//   mt, mr, n, nbar     integers
//   t                   integer or "min"
//   snr                 comma list of dB values and/or start:step:stop ranges
//   sweep               none | group_size | pilot_length | antennas | ris_elements
//   values              comma list; "MTxMR" pairs for the antennas axis
//   trials, seed        integers
//   out                 output CSV path
//   workers             worker threads, 0 = all cores
//   max_t               largest pilot length a cell may use
//
// Unknown keys are errors.

#include "bdris/harness.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bdris {

ExperimentSpec parse_experiment_config(std::string_view text);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

// Applies one key/value pair; shared by the file parser and CLI overrides.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

std::vector<double> parse_snr_list(std::string_view text);
SweepAxis parse_sweep_axis(std::string_view text);

}  // namespace bdris
