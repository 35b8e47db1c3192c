#include "arteo/bids.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "arteo/csv.hpp"
#include "arteo/errors.hpp"

namespace arteo {

namespace {

constexpr double kUndefinedRoiViolation = 1e6;

double parse_number(const std::string& tok, int line, const std::string& col) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("campaign csv line " + std::to_string(line) + ": column " + col +
                             ": not a number: '" + tok + "'");
  }
  if (used != tok.size())
    throw std::runtime_error("campaign csv line " + std::to_string(line) + ": column " + col +
                             ": trailing characters in '" + tok + "'");
  if (!std::isfinite(v))
    throw std::runtime_error("campaign csv line " + std::to_string(line) + ": column " + col +
                             ": non-finite value");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

BidConfig::BidConfig() {
  price_kernel.family = KernelFamily::Matern32;
  price_kernel.length_scale = 3.0;
  price_kernel.signal_variance = 100.0 * 100.0;
  click_kernel.family = KernelFamily::SquaredExponential;
  click_kernel.length_scale = 16.0;
  click_kernel.signal_variance = 0.3 * 0.3;
}

double Campaign::benchmark_roi() const {
  double clicks = 0.0, spend = 0.0;
  for (const Ad& ad : ads) {
    clicks += ad.true_click;
    spend += ad.true_bid_price;
  }
  if (spend <= 0.0) throw std::invalid_argument("campaign has no recorded spend");
  return clicks / spend;
}

namespace {

struct LatentModel {
  Eigen::VectorXd w_price_a, w_price_b;
  Eigen::VectorXd w_click;
  double phase = 0.0;
};

LatentModel draw_latent(uint64_t seed, int feature_dim, int click_dim) {
  Rng rng(derive_seed(seed, "latent"));
  LatentModel m;
  m.w_price_a.resize(feature_dim);
  m.w_price_b.resize(feature_dim);
  m.w_click.resize(click_dim);
  const double ps = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  const double cs = 1.0 / std::sqrt(static_cast<double>(click_dim));
  for (int i = 0; i < feature_dim; ++i) m.w_price_a[i] = rng.gaussian() * ps;
  for (int i = 0; i < feature_dim; ++i) m.w_price_b[i] = rng.gaussian() * ps;
  for (int i = 0; i < click_dim; ++i) m.w_click[i] = rng.gaussian() * cs;
  m.phase = rng.uniform(0.0, 6.283185307179586);
  return m;
}

// Click probability stays inside (0.08, 0.45), so empirical rates land inside
// the required [0.05, 0.5] with margin.
double click_probability(const LatentModel& m, const Eigen::VectorXd& f, int click_dim) {
  const double s = m.w_click.dot(f.head(click_dim));
  return 0.08 + 0.37 / (1.0 + std::exp(-2.0 * s));
}

// Fraction of each ad group recorded as clicked: the top ads by click
// probability (binary representation by thresholding at the group quantile).
// Keeps every group's click count pinned to its size — no realization luck —
// while the rate stays inside the required [0.05, 0.5] band.
constexpr double kClickQuota = 0.4;

void apply_click_quota(std::vector<Ad>& ads, const std::vector<double>& probs) {
  const int n = static_cast<int>(ads.size());
  const int k = std::max(1, static_cast<int>(std::lround(kClickQuota * n)));
  std::vector<int> order(ads.size());
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return probs[static_cast<size_t>(a)] > probs[static_cast<size_t>(b)];
  });
  for (int i = 0; i < n; ++i)
    ads[static_cast<size_t>(order[static_cast<size_t>(i)])].true_click = i < k ? 1 : 0;
}

double latent_price(const LatentModel& m, const Eigen::VectorXd& f, Rng& rng) {
  const double raw = 60.0 + 30.0 * std::sin(m.w_price_a.dot(f) + m.phase) +
                     20.0 * std::tanh(m.w_price_b.dot(f)) + rng.gaussian(0.0, 2.0);
  return std::max(5.0, raw);
}

Ad draw_ad(int id, const LatentModel& m, const BidGenSettings& gen, Rng& rng,
           double* prob_out) {
  Ad ad;
  ad.id = id;
  ad.features.resize(gen.feature_dim);
  for (int i = 0; i < gen.feature_dim; ++i) ad.features[i] = rng.uniform(-1.0, 1.0);
  ad.true_bid_price = latent_price(m, ad.features, rng);
  if (prob_out) *prob_out = click_probability(m, ad.features, gen.click_feature_dim);
  return ad;
}

}  // namespace

std::vector<Campaign> generate_campaigns(uint64_t seed, int ads_per_campaign, int count,
                                         const BidGenSettings& gen) {
  if (ads_per_campaign < 1) throw std::invalid_argument("ads_per_campaign must be >= 1");
  if (count < 1) throw std::invalid_argument("campaign count must be >= 1");
  if (gen.click_feature_dim < 1 || gen.click_feature_dim > gen.feature_dim)
    throw std::invalid_argument("click feature prefix must fit inside the feature vector");
  const LatentModel latent = draw_latent(seed, gen.feature_dim, gen.click_feature_dim);
  Rng rng(derive_seed(seed, "campaigns"));
  std::vector<Campaign> out;
  out.reserve(static_cast<size_t>(count));
  for (int c = 1; c <= count; ++c) {
    Campaign campaign;
    campaign.index = c;
    std::vector<double> probs;
    probs.reserve(static_cast<size_t>(ads_per_campaign));
    for (int j = 0; j < ads_per_campaign; ++j) {
      double prob = 0.0;
      campaign.ads.push_back(draw_ad(j + 1, latent, gen, rng, &prob));
      probs.push_back(prob);
    }
    apply_click_quota(campaign.ads, probs);
    campaign.roi_threshold = gen.roi_threshold_factor * campaign.benchmark_roi();
    out.push_back(std::move(campaign));
  }
  return out;
}

BidDataset generate_bid_dataset(uint64_t seed, const BidGenSettings& gen) {
  if (gen.seed_pool_size < 1) throw std::invalid_argument("seed_pool_size must be >= 1");
  BidDataset ds;
  const LatentModel latent = draw_latent(seed, gen.feature_dim, gen.click_feature_dim);
  Rng pool_rng(derive_seed(seed, "seed_pool"));
  ds.seed_pool.reserve(static_cast<size_t>(gen.seed_pool_size));
  std::vector<double> probs;
  probs.reserve(static_cast<size_t>(gen.seed_pool_size));
  for (int j = 0; j < gen.seed_pool_size; ++j) {
    double prob = 0.0;
    ds.seed_pool.push_back(draw_ad(j + 1, latent, gen, pool_rng, &prob));
    probs.push_back(prob);
  }
  apply_click_quota(ds.seed_pool, probs);
  ds.campaigns = generate_campaigns(seed, gen.ads_per_campaign, gen.campaign_count, gen);
  return ds;
}

void write_campaign_csv(std::ostream& out, const BidDataset& dataset) {
  int feature_dim = -1;
  const auto row = [&](int campaign_id, const Ad& ad) {
    if (feature_dim < 0) feature_dim = static_cast<int>(ad.features.size());
    if (feature_dim != static_cast<int>(ad.features.size()))
      throw std::invalid_argument("inconsistent feature dimensions in dataset");
    out << campaign_id << ',' << ad.id << ',' << format_double(ad.true_bid_price) << ','
        << ad.true_click;
    for (int i = 0; i < feature_dim; ++i) out << ',' << format_double(ad.features[i]);
    out << '\n';
  };
  // Header needs the dimension up front.
  const Ad* first = !dataset.seed_pool.empty()
                        ? &dataset.seed_pool.front()
                        : (!dataset.campaigns.empty() && !dataset.campaigns.front().ads.empty()
                               ? &dataset.campaigns.front().ads.front()
                               : nullptr);
  if (!first) throw std::invalid_argument("cannot serialize an empty dataset");
  out << "campaign_id,ad_id,bid_price,click";
  for (int i = 0; i < static_cast<int>(first->features.size()); ++i) out << ",f" << i;
  out << '\n';
  for (const Ad& ad : dataset.seed_pool) row(0, ad);
  for (const Campaign& c : dataset.campaigns)
    for (const Ad& ad : c.ads) row(c.index, ad);
}

BidDataset ingest_campaign_csv(std::istream& in, double roi_threshold_factor) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("campaign csv line 1: missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  const std::vector<std::string> fixed = {"campaign_id", "ad_id", "bid_price", "click"};
  if (header.size() < fixed.size() + 1)
    throw std::runtime_error("campaign csv line 1: expected columns campaign_id,ad_id,"
                             "bid_price,click,f0,... but found " +
                             std::to_string(header.size()) + " columns");
  for (size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      throw std::runtime_error("campaign csv line 1: column " + std::to_string(i + 1) +
                               " must be '" + fixed[i] + "', found '" + header[i] + "'");
  const int feature_dim = static_cast<int>(header.size() - fixed.size());
  for (int i = 0; i < feature_dim; ++i)
    if (header[fixed.size() + static_cast<size_t>(i)] != "f" + std::to_string(i))
      throw std::runtime_error("campaign csv line 1: feature column " + std::to_string(i) +
                               " must be named f" + std::to_string(i));

  BidDataset ds;
  std::vector<int> order;
  std::unordered_map<int, size_t> index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != header.size())
      throw std::runtime_error("campaign csv line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " columns, found " +
                               std::to_string(cols.size()));
    const double cid_raw = parse_number(cols[0], line_no, "campaign_id");
    const double aid_raw = parse_number(cols[1], line_no, "ad_id");
    if (cid_raw < 0 || cid_raw != std::floor(cid_raw))
      throw std::runtime_error("campaign csv line " + std::to_string(line_no) +
                               ": campaign_id must be a nonnegative integer");
    if (aid_raw != std::floor(aid_raw))
      throw std::runtime_error("campaign csv line " + std::to_string(line_no) +
                               ": ad_id must be an integer");
    Ad ad;
    ad.id = static_cast<int>(aid_raw);
    ad.true_bid_price = parse_number(cols[2], line_no, "bid_price");
    if (ad.true_bid_price < 0.0)
      throw std::runtime_error("campaign csv line " + std::to_string(line_no) +
                               ": bid_price must be nonnegative");
    const double click = parse_number(cols[3], line_no, "click");
    if (click != 0.0 && click != 1.0)
      throw std::runtime_error("campaign csv line " + std::to_string(line_no) +
                               ": click must be 0 or 1, found " + cols[3]);
    ad.true_click = static_cast<int>(click);
    ad.features.resize(feature_dim);
    for (int i = 0; i < feature_dim; ++i)
      ad.features[i] = parse_number(cols[4 + static_cast<size_t>(i)], line_no,
                                    "f" + std::to_string(i));
    const int cid = static_cast<int>(cid_raw);
    if (cid == 0) {
      ds.seed_pool.push_back(std::move(ad));
      continue;
    }
    auto it = index.find(cid);
    if (it == index.end()) {
      index.emplace(cid, ds.campaigns.size());
      ds.campaigns.push_back(Campaign{cid, {}, 0.0});
      it = index.find(cid);
    }
    ds.campaigns[it->second].ads.push_back(std::move(ad));
  }
  for (Campaign& c : ds.campaigns) {
    try {
      c.roi_threshold = roi_threshold_factor * c.benchmark_roi();
    } catch (const std::exception& e) {
      throw std::runtime_error("campaign " + std::to_string(c.index) + ": " + e.what());
    }
    if (c.roi_threshold <= 0.0)
      throw std::runtime_error("campaign " + std::to_string(c.index) +
                               ": ROI threshold must be positive (no recorded clicks?)");
  }
  return ds;
}

std::vector<AdPrediction> predict_ads(const GaussianProcess& click_model,
                                      const GaussianProcess& price_model,
                                      const Campaign& campaign, const BidConfig& cfg,
                                      const Eigen::VectorXd* bids) {
  if (cfg.bid_augmented_clicks && bids == nullptr)
    throw std::invalid_argument("bid-augmented click predictions need the bid vector");
  if (bids && bids->size() != campaign.size())
    throw DimensionError(campaign.size(), static_cast<int>(bids->size()), "predict_ads");
  std::vector<AdPrediction> preds(campaign.ads.size());
  for (size_t j = 0; j < campaign.ads.size(); ++j) {
    const Ad& ad = campaign.ads[j];
    if (static_cast<int>(ad.features.size()) < cfg.click_feature_dim)
      throw DimensionError(cfg.click_feature_dim, static_cast<int>(ad.features.size()),
                           "predict_ads click features");
    const Prediction price = price_model.predict(ad.features);
    Eigen::VectorXd cf;
    if (cfg.bid_augmented_clicks) {
      cf.resize(cfg.click_feature_dim + 1);
      cf.head(cfg.click_feature_dim) = ad.features.head(cfg.click_feature_dim);
      cf[cfg.click_feature_dim] = (*bids)[static_cast<Eigen::Index>(j)];
    } else {
      cf = ad.features.head(cfg.click_feature_dim);
    }
    const Prediction click = click_model.predict(cf);
    preds[j] = {click.mean, click.std, price.mean, price.std};
  }
  return preds;
}

double bid_objective(const Eigen::VectorXd& bids, const std::vector<AdPrediction>& preds,
                     double click_cost_weight, double z) {
  if (bids.size() != static_cast<Eigen::Index>(preds.size()))
    throw DimensionError(static_cast<int>(preds.size()), static_cast<int>(bids.size()),
                         "bid_objective");
  double total = 0.0;
  for (Eigen::Index j = 0; j < bids.size(); ++j) {
    const AdPrediction& p = preds[static_cast<size_t>(j)];
    total += click_cost_weight * bids[j] * p.mu_click + std::abs(bids[j] - p.mu_price) -
             z * (p.sigma_click + p.sigma_price);
  }
  return total;
}

double roi_constraint(const Eigen::VectorXd& bids, const std::vector<AdPrediction>& preds,
                      double beta_t, double roi_threshold) {
  if (bids.size() != static_cast<Eigen::Index>(preds.size()))
    throw DimensionError(static_cast<int>(preds.size()), static_cast<int>(bids.size()),
                         "roi_constraint");
  const double spend = bids.sum();
  if (spend <= 0.0) return kUndefinedRoiViolation;  // ROI undefined: treated as infeasible
  double pessimistic_clicks = 0.0;
  for (const AdPrediction& p : preds)
    pessimistic_clicks += p.mu_click - beta_t * p.sigma_click;
  return roi_threshold - pessimistic_clicks / spend;
}

double budget_constraint(const Eigen::VectorXd& bids, int ads_per_campaign) {
  return bids.sum() - 180.0 * ads_per_campaign;
}

int click_threshold(double mean_click, double threshold) {
  return mean_click >= threshold ? 1 : 0;
}

BidState init_bid_state(const BidDataset& dataset, const BidConfig& cfg, uint64_t seed) {
  if (dataset.seed_pool.empty())
    throw std::invalid_argument("bid dataset needs a nonempty seed pool");
  BidState state;
  state.confidence = cfg.confidence;
  state.noise = Rng(derive_seed(seed, "noise"));
  state.solver_seed_root = seed;
  Rng seed_noise(derive_seed(seed, "safe_seed"));
  for (const Ad& ad : dataset.seed_pool) {
    state.price_history.push_back(
        {ad.features, ad.true_bid_price + seed_noise.gaussian(0.0, cfg.price_noise_std)});
    Eigen::VectorXd cf;
    if (cfg.bid_augmented_clicks) {
      cf.resize(cfg.click_feature_dim + 1);
      cf.head(cfg.click_feature_dim) = ad.features.head(cfg.click_feature_dim);
      cf[cfg.click_feature_dim] = ad.true_bid_price;  // the recorded historical bid
    } else {
      cf = ad.features.head(cfg.click_feature_dim);
    }
    state.click_history.push_back(
        {cf, ad.true_click + seed_noise.gaussian(0.0, cfg.click_noise_std)});
  }
  return state;
}

CampaignOutcome bid_campaign_step(BidState& state, const Campaign& campaign,
                                  const BidConfig& cfg) {
  const int m = campaign.size();
  if (m < 1) throw std::invalid_argument("campaign has no ads");
  if (campaign.roi_threshold <= 0.0)
    throw std::invalid_argument("campaign ROI threshold must be positive");

  // Exploration opens only after two consecutive campaigns that both underspent
  // the model's predicted prices and still met their ROI thresholds.
  const auto earned_exploration = [&]() {
    if (state.outcomes.size() < 2) return false;
    for (size_t k = state.outcomes.size() - 2; k < state.outcomes.size(); ++k) {
      const CampaignOutcome& o = state.outcomes[k];
      if (o.safety_hold) return false;
      if (!(o.spend < o.predicted_price_sum)) return false;
      if (!(o.realized_roi >= o.threshold)) return false;  // NaN fails
    }
    return true;
  };
  const double z = earned_exploration() ? cfg.zeta : 0.0;

  const GaussianProcess price_model(cfg.price_kernel, cfg.price_gp_noise_variance,
                                    state.price_history);
  const GaussianProcess click_model(cfg.click_kernel, cfg.click_gp_noise_variance,
                                    state.click_history);
  const double gamma =
      std::max(information_gain(price_model.gram(), cfg.price_gp_noise_variance),
               information_gain(click_model.gram(), cfg.click_gp_noise_variance));
  state.confidence.gamma_running = gamma;
  const double beta_t = cfg.beta_override ? *cfg.beta_override : beta(state.confidence);

  // In the default feature-indexed mode the predictions are constants of the
  // bid, so hoist them out of the solver closures.
  std::vector<AdPrediction> fixed_preds;
  if (!cfg.bid_augmented_clicks) fixed_preds = predict_ads(click_model, price_model, campaign, cfg);

  DecisionProblem problem;
  problem.lower = Eigen::VectorXd::Zero(m);
  problem.upper = Eigen::VectorXd::Constant(m, campaign.budget());
  problem.objective = [&](const Eigen::VectorXd& x) {
    if (cfg.bid_augmented_clicks) {
      const auto preds = predict_ads(click_model, price_model, campaign, cfg, &x);
      return bid_objective(x, preds, cfg.click_cost_weight, z);
    }
    return bid_objective(x, fixed_preds, cfg.click_cost_weight, z);
  };
  problem.constraints.push_back(
      [&](const Eigen::VectorXd& x) { return budget_constraint(x, m); });
  problem.constraints.push_back([&](const Eigen::VectorXd& x) {
    if (cfg.bid_augmented_clicks) {
      const auto preds = predict_ads(click_model, price_model, campaign, cfg, &x);
      return roi_constraint(x, preds, beta_t, campaign.roi_threshold);
    }
    return roi_constraint(x, fixed_preds, beta_t, campaign.roi_threshold);
  });

  // Natural warm start: bid each ad its predicted price, inside the box.
  std::vector<AdPrediction> start_preds;
  if (cfg.bid_augmented_clicks) {
    const Eigen::VectorXd zero_bids = Eigen::VectorXd::Zero(m);
    start_preds = predict_ads(click_model, price_model, campaign, cfg, &zero_bids);
  } else {
    start_preds = fixed_preds;
  }
  Eigen::VectorXd x0(m);
  double predicted_price_sum = 0.0;
  for (int j = 0; j < m; ++j) {
    predicted_price_sum += start_preds[static_cast<size_t>(j)].mu_price;
    x0[j] = std::clamp(start_preds[static_cast<size_t>(j)].mu_price, 0.0, campaign.budget());
  }

  SolverSettings solver = cfg.solver;
  solver.seed =
      derive_seed(state.solver_seed_root, "solver", static_cast<uint64_t>(state.steps_taken));
  const SolveResult result = minimize(problem, x0, solver);

  CampaignOutcome outcome;
  outcome.campaign_id = campaign.index;
  outcome.budget = campaign.budget();
  outcome.threshold = campaign.roi_threshold;
  outcome.z = z;
  outcome.beta = beta_t;
  outcome.gamma = gamma;
  outcome.predicted_price_sum = predicted_price_sum;
  outcome.solver_status = result.status;
  outcome.solver_iterations = result.iterations;

  if (result.status == SolveStatus::Infeasible) {
    outcome.safety_hold = true;
    outcome.bids = Eigen::VectorXd::Zero(m);
    outcome.realized_roi = std::numeric_limits<double>::quiet_NaN();
  } else {
    outcome.bids = result.point;
    outcome.spend = result.point.sum();
    double clicks = 0.0;
    for (int j = 0; j < m; ++j) {
      if (outcome.bids[j] > cfg.positive_bid_threshold) {
        outcome.n_positive_bids += 1;
        clicks += campaign.ads[static_cast<size_t>(j)].true_click;
      }
    }
    outcome.realized_roi = outcome.spend > cfg.positive_bid_threshold
                               ? clicks / outcome.spend
                               : std::numeric_limits<double>::quiet_NaN();
    // Feedback arrives only for ads actually bid on.
    for (int j = 0; j < m; ++j) {
      if (outcome.bids[j] <= cfg.positive_bid_threshold) continue;
      const Ad& ad = campaign.ads[static_cast<size_t>(j)];
      state.price_history.push_back(
          {ad.features, ad.true_bid_price + state.noise.gaussian(0.0, cfg.price_noise_std)});
      Eigen::VectorXd cf;
      if (cfg.bid_augmented_clicks) {
        cf.resize(cfg.click_feature_dim + 1);
        cf.head(cfg.click_feature_dim) = ad.features.head(cfg.click_feature_dim);
        cf[cfg.click_feature_dim] = outcome.bids[j];
      } else {
        cf = ad.features.head(cfg.click_feature_dim);
      }
      state.click_history.push_back(
          {cf, ad.true_click + state.noise.gaussian(0.0, cfg.click_noise_std)});
    }
  }
  state.outcomes.push_back(outcome);
  state.steps_taken += 1;
  return outcome;
}

BidRunResult run_bid_campaigns(const BidDataset& dataset, const BidConfig& cfg,
                               uint64_t seed) {
  BidRunResult result;
  BidState state = init_bid_state(dataset, cfg, seed);
  for (const Campaign& campaign : dataset.campaigns) {
    try {
      bid_campaign_step(state, campaign, cfg);
    } catch (const std::exception& e) {
      result.partial = true;
      result.abort_reason = e.what();
      break;
    }
  }
  result.outcomes = std::move(state.outcomes);
  return result;
}

}  // namespace arteo
