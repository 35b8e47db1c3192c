#pragma once

#include <string>
#include <vector>

#include "arteo/bids.hpp"
#include "arteo/config.hpp"
#include "arteo/core.hpp"

namespace arteo {

/// The environment a config describes (motor or toy; bid runs take the
/// campaign path instead).
TrackingScenario make_scenario(const ExperimentConfig& config);

/// Runtime bid settings assembled from the config's bid block plus the shared
/// solver and confidence blocks.
BidConfig make_bid_config(const ExperimentConfig& config);

/// The campaign stream a config describes: ingested when bid.data_csv is set,
/// synthetic otherwise.
BidDataset load_bid_dataset(const ExperimentConfig& config);

RunOptions make_run_options(const ExperimentConfig& config, uint64_t seed);

struct ExperimentResult {
  int exit_code = 0;  // 0 clean, 1 partial results, 2 setup failure
  std::vector<std::string> diagnostics;
};

/// Runs every (algorithm, seed) combination the config asks for, fanning seeds
/// over a worker pool, and writes into config.out_dir:
///   effective_config.txt — parseable echo of every setting
///   trace.csv, metrics.csv, summary.txt       (motor/toy)
///   campaigns.csv (first seed; campaigns_seed<k>.csv for others), summary.txt (bid)
/// Output order is fixed by (algorithm, seed), never by completion time; a
/// failed run is reported in summary.txt and the exit code without stopping
/// the others.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace arteo
