#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qtflow/harness.hpp"

namespace qtflow {

/// Any problem with configuration text: syntax, unknown keys, missing keys,
/// values out of range. The message lists every problem found.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses sectioned key-value text into a validated ExperimentConfig.
///
///   preset = hole2d          # optional, supplies every value below
///   [mesh]    dim intervals length
///   [model]   a b c L1 L2 L3 kappa c_star eta
///   [scheme]  name backend cg_tol cg_max_iter
///   [time]    T tau adaptive tau_min tau_max alpha energy_tol
///   [initial] kind preset seed amplitude
///   [output]  snapshot_every format
///
/// Overrides have the form "section.key=value" (or "preset=name") and win
/// over the text. Without a preset, kappa defaults to kappa_min rounded up to
/// two significant figures and c_star to the bulk lower bound on the eta-ball.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Reads a file and parses it; unreadable files raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Smallest number with two significant figures that is >= x (x > 0).
double round_up_two_figures(double x);

}  // namespace qtflow
