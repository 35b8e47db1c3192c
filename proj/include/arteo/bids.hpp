#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arteo/confidence.hpp"
#include "arteo/gp.hpp"
#include "arteo/rng.hpp"
#include "arteo/solver.hpp"

namespace arteo {

/// One biddable ad: price-model features (the click model reads a prefix),
/// plus the dataset's recorded price and click outcome.
struct Ad {
  int id = 0;
  Eigen::VectorXd features;
  double true_bid_price = 0.0;
  int true_click = 0;  // 0 or 1
};

struct Campaign {
  int index = 0;
  std::vector<Ad> ads;
  double roi_threshold = 0.0;  // h_t, must stay positive

  int size() const { return static_cast<int>(ads.size()); }
  double budget() const { return 180.0 * size(); }
  /// Recorded clicks per recorded spend, the dataset's own ROI.
  double benchmark_roi() const;
};

/// Campaign stream plus the historical sample pool that bootstraps the models.
struct BidDataset {
  std::vector<Ad> seed_pool;
  std::vector<Campaign> campaigns;
};

struct BidConfig {
  double click_cost_weight = 1.0;  // c in the spend term
  double zeta = 100.0;
  KernelSpec price_kernel;  // Matern32 over the full feature vector
  KernelSpec click_kernel;  // SquaredExponential over the click prefix
  int click_feature_dim = 8;
  bool bid_augmented_clicks = false;  // append the bid to the click-model input
  double roi_threshold_factor = 0.9;  // h_t as a fraction of the benchmark
  double price_noise_std = 1.0;
  double click_noise_std = 0.05;
  double price_gp_noise_variance = 1.0;
  double click_gp_noise_variance = 0.09;
  ConfidenceParams confidence;
  std::optional<double> beta_override = 1.0;
  SolverSettings solver;
  double positive_bid_threshold = 1e-9;

  BidConfig();
};

struct BidGenSettings {
  int ads_per_campaign = 10;
  int campaign_count = 25;
  int feature_dim = 16;
  int click_feature_dim = 8;
  int seed_pool_size = 30;
  double roi_threshold_factor = 0.9;

  bool operator==(const BidGenSettings&) const = default;
};

/// Deterministic synthetic campaigns: smooth latent price and click-probability
/// functions of the features, click probabilities inside (0.05, 0.5), at least
/// one click per campaign so every benchmark ROI is positive.
std::vector<Campaign> generate_campaigns(uint64_t seed, int ads_per_campaign, int count,
                                         const BidGenSettings& gen = {});

/// Campaigns plus a historical seed pool drawn from the same generator.
BidDataset generate_bid_dataset(uint64_t seed, const BidGenSettings& gen = {});

/// One row per ad: campaign_id,ad_id,bid_price,click,f0..fK. Rows with
/// campaign_id 0 are the historical seed pool.
void write_campaign_csv(std::ostream& out, const BidDataset& dataset);

/// Inverse of write_campaign_csv. Campaigns are grouped by campaign_id in
/// first-appearance order; malformed rows are rejected naming their line.
/// Thresholds are recomputed as roi_threshold_factor times each benchmark.
BidDataset ingest_campaign_csv(std::istream& in, double roi_threshold_factor = 0.9);

/// Posterior summaries for one ad at a candidate bid.
struct AdPrediction {
  double mu_click = 0.0;
  double sigma_click = 0.0;
  double mu_price = 0.0;
  double sigma_price = 0.0;
};

std::vector<AdPrediction> predict_ads(const GaussianProcess& click_model,
                                      const GaussianProcess& price_model,
                                      const Campaign& campaign, const BidConfig& cfg,
                                      const Eigen::VectorXd* bids = nullptr);

/// Spend-weighted click cost plus distance to predicted prices minus the
/// exploration bonus: sum_j c*x_j*mu_click + sum_j |x_j - mu_price|
/// - z * sum_j (sigma_click + sigma_price).
double bid_objective(const Eigen::VectorXd& bids, const std::vector<AdPrediction>& preds,
                     double click_cost_weight, double z);

/// h_t - (pessimistic click total) / (total spend); <= 0 feasible. A spend of
/// zero leaves ROI undefined and is treated as a large violation.
double roi_constraint(const Eigen::VectorXd& bids, const std::vector<AdPrediction>& preds,
                      double beta_t, double roi_threshold);

/// Total spend minus 180 per ad; <= 0 feasible.
double budget_constraint(const Eigen::VectorXd& bids, int ads_per_campaign);

/// 1 when mean_click clears the threshold (ties count as a click), else 0.
int click_threshold(double mean_click, double threshold);

struct CampaignOutcome {
  int campaign_id = 0;
  double spend = 0.0;
  double budget = 0.0;
  double realized_roi = 0.0;  // NaN when the campaign was skipped
  double threshold = 0.0;
  int n_positive_bids = 0;
  double z = 0.0;
  bool safety_hold = false;
  double predicted_price_sum = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  SolveStatus solver_status = SolveStatus::Converged;
  int solver_iterations = 0;
  Eigen::VectorXd bids;
};

struct BidState {
  std::vector<Observation> price_history;
  std::vector<Observation> click_history;  // same campaign feedback points
  ConfidenceParams confidence;
  Rng noise{0};
  uint64_t solver_seed_root = 0;
  int steps_taken = 0;
  std::vector<CampaignOutcome> outcomes;
};

/// Fresh state with the seed pool measured into both model histories.
BidState init_bid_state(const BidDataset& dataset, const BidConfig& cfg, uint64_t seed);

/// One campaign: gate z on the two preceding campaigns (spend below the
/// predicted price total and realized ROI at or above threshold in both),
/// re-condition both models, solve for bids under the budget and ROI
/// constraints, then append feedback for every ad with a strictly positive bid.
/// An infeasible solve skips the campaign with a safety-hold record.
CampaignOutcome bid_campaign_step(BidState& state, const Campaign& campaign,
                                  const BidConfig& cfg);

struct BidRunResult {
  std::vector<CampaignOutcome> outcomes;
  bool partial = false;
  std::string abort_reason;
};

BidRunResult run_bid_campaigns(const BidDataset& dataset, const BidConfig& cfg,
                               uint64_t seed);

}  // namespace arteo
