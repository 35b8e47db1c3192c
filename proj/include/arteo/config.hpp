#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arteo/bids.hpp"
#include "arteo/confidence.hpp"
#include "arteo/motor.hpp"
#include "arteo/solver.hpp"

namespace arteo {

/// Config-file-facing bid settings; the runtime BidConfig is assembled from
/// these plus the shared solver/confidence blocks.
struct BidSettings {
  BidGenSettings gen;
  uint64_t data_seed = 7;
  std::string data_csv;  // when set, campaigns are ingested instead of generated
  double zeta = 100.0;
  double click_cost_weight = 1.0;
  std::optional<double> beta_override = 1.0;
  double price_noise_std = 1.0;
  double click_noise_std = 0.05;
  double price_gp_noise_variance = 1.0;
  double click_gp_noise_variance = 0.09;
  double price_length_scale = 3.0;
  double price_signal_std = 100.0;
  double click_length_scale = 16.0;
  double click_signal_std = 0.3;
  bool bid_augmented_clicks = false;

  bool operator==(const BidSettings&) const = default;
};

/// One experiment: which environment, which algorithms, how many repetitions.
/// Parsed from `key = value` text (one pair per line, # comments, dotted keys;
/// unknown or duplicate keys are errors naming the line).
struct ExperimentConfig {
  std::string scenario = "motor";   // motor | bid | toy
  std::string algorithm = "arteo";  // arteo | safe_ucb | both
  int horizon = 0;                  // 0 -> the scenario's own horizon
  std::vector<uint64_t> seeds = {1};
  double zeta = 25.0;
  std::optional<double> beta_override = 3.0;  // none -> the analytic width schedule
  ConfidenceParams confidence{1.0, 1.0, 0.05, 0.0};
  SolverSettings solver;
  std::string out_dir = "out";
  MotorScenarioOptions motor;
  BidSettings bid;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse, apply defaults, and validate. Syntax problems throw ConfigError with
/// the offending line; semantic problems name the field (line 0 when the value
/// came from a default). The returned config always serializes losslessly:
/// parse(serialize(parse(text))) == parse(text).
ExperimentConfig parse_config(const std::string& text);

/// Canonical echo of every effective setting, parseable by parse_config.
std::string serialize_config(const ExperimentConfig& config);

/// Semantic checks only (parse_config already runs them).
void validate_config(const ExperimentConfig& config);

}  // namespace arteo
