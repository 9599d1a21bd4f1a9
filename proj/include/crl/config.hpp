#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crl/notears.hpp"
#include "crl/runner.hpp"
#include "crl/scenarios.hpp"

namespace crl {

/// `key = value` lines; `#` starts a comment. Duplicate keys are an error.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies every key to `base`; unknown keys are rejected.
ExperimentConfig parse_experiment_config(std::string_view text, ExperimentConfig base = {});
/// Every field, one per line, in a fixed order. Parses back to the same config.
std::string experiment_config_text(const ExperimentConfig& cfg);

struct SweepConfig {
  std::string universe = "U2-linked";
  std::size_t extra_vars = 0;
  double flip_prob = 0.1;
  double root_prob = 0.5;
  std::vector<std::size_t> sizes;  // empty: the default grid
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  NotearsConfig notears;

  UniverseSpec universe_spec() const;
};

SweepConfig parse_sweep_config(std::string_view text, SweepConfig base = {});
std::string sweep_config_text(const SweepConfig& cfg);

std::vector<std::size_t> parse_size_list(std::string_view text);

}  // namespace crl
