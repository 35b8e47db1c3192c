#include "arteo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "arteo/csv.hpp"
#include "arteo/log.hpp"
#include "arteo/metrics.hpp"
#include "arteo/safe_ucb.hpp"

namespace arteo {

namespace {

// Runs tasks[0..n) on a bounded pool; slot i always receives task i's result.
void run_indexed(size_t n, const std::function<void(size_t)>& task) {
  const unsigned hw = std::thread::hardware_concurrency();
  const size_t workers = std::min<size_t>(n, hw > 0 ? hw : 4);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) task(i);
    });
  for (std::thread& t : pool) t.join();
}

struct Stats {
  double mean = 0.0, stddev = 0.0, median = 0.0;
};

Stats stats_of(std::vector<double> values) {
  Stats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(s.stddev / n);
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ExperimentResult run_tracking_experiment(const ExperimentConfig& config,
                                         const std::filesystem::path& out_dir) {
  const TrackingScenario scenario = make_scenario(config);
  std::vector<std::string> algorithms;
  if (config.algorithm == "both") {
    algorithms = {"arteo", "safe_ucb"};
  } else {
    algorithms = {config.algorithm};
  }

  struct Job {
    std::string algorithm;
    uint64_t seed = 0;
  };
  std::vector<Job> jobs;
  for (const std::string& algorithm : algorithms)
    for (uint64_t seed : config.seeds) jobs.push_back({algorithm, seed});

  std::vector<RunTrace> traces(jobs.size());
  run_indexed(jobs.size(), [&](size_t i) {
    const Job& job = jobs[i];
    log_debug("run " + job.algorithm + " seed " + std::to_string(job.seed));
    try {
      const RunOptions opts = make_run_options(config, job.seed);
      traces[i] = job.algorithm == "arteo" ? run_arteo(scenario, opts)
                                           : run_safe_ucb(scenario, opts);
    } catch (const std::exception& e) {
      traces[i].algorithm = job.algorithm;
      traces[i].seed = job.seed;
      traces[i].partial = true;
      traces[i].abort_reason = e.what();
    }
  });

  ExperimentResult result;
  {
    std::ostringstream trace_csv;
    std::vector<RunTrace> nonempty;
    for (const RunTrace& t : traces)
      if (!t.rows.empty()) nonempty.push_back(t);
    if (nonempty.empty()) {
      result.exit_code = 2;
      result.diagnostics.push_back("no run produced any steps");
      for (const RunTrace& t : traces)
        if (t.partial) result.diagnostics.push_back(t.algorithm + " seed " +
                                                    std::to_string(t.seed) + ": " +
                                                    t.abort_reason);
      return result;
    }
    write_trace_csv(trace_csv, nonempty);
    write_file(out_dir / "trace.csv", trace_csv.str());
    std::ostringstream metrics_csv;
    write_metrics_csv(metrics_csv, nonempty, scenario.safety_limit());
    write_file(out_dir / "metrics.csv", metrics_csv.str());
  }

  std::ostringstream summary;
  summary << "scenario: " << config.scenario << "\n";
  summary << "seeds: " << config.seeds.size() << "\n";
  summary << "safety limit: " << format_double(scenario.safety_limit()) << "\n";
  for (const std::string& algorithm : algorithms) {
    std::vector<double> terminal_regret, final_uncertainty, first_uncertainty;
    int violations = 0, holds = 0, zero_violation_runs = 0, completed = 0;
    for (const RunTrace& t : traces) {
      if (t.algorithm != algorithm || t.rows.empty()) continue;
      ++completed;
      terminal_regret.push_back(cumulative_regret(t).back());
      const auto u = total_uncertainty(t);
      first_uncertainty.push_back(u.front());
      final_uncertainty.push_back(u.back());
      const int v = violation_count(t, scenario.safety_limit());
      violations += v;
      if (v == 0) ++zero_violation_runs;
      for (const TraceRow& row : t.rows) holds += row.safety_hold ? 1 : 0;
    }
    if (completed == 0) continue;
    const Stats regret = stats_of(terminal_regret);
    summary << algorithm << ": runs " << completed << "\n";
    summary << algorithm << ": terminal cumulative regret mean "
            << format_double(regret.mean) << " std " << format_double(regret.stddev)
            << " median " << format_double(regret.median) << "\n";
    summary << algorithm << ": true-limit violations " << violations << " ("
            << zero_violation_runs << " runs clean)\n";
    summary << algorithm << ": safety holds " << holds << "\n";
    const Stats u0 = stats_of(first_uncertainty), u1 = stats_of(final_uncertainty);
    summary << algorithm << ": total uncertainty mean first "
            << format_double(u0.mean) << " -> last " << format_double(u1.mean) << "\n";
  }
  int partial = 0;
  for (const RunTrace& t : traces) {
    if (!t.partial) continue;
    ++partial;
    result.diagnostics.push_back(t.algorithm + " seed " + std::to_string(t.seed) + ": " +
                                 t.abort_reason);
  }
  summary << "partial runs: " << partial << "\n";
  for (const std::string& d : result.diagnostics) summary << "  " << d << "\n";
  write_file(out_dir / "summary.txt", summary.str());
  if (partial > 0) result.exit_code = 1;
  return result;
}

ExperimentResult run_bid_experiment(const ExperimentConfig& config,
                                    const std::filesystem::path& out_dir) {
  const BidDataset dataset = load_bid_dataset(config);
  const BidConfig bid_config = make_bid_config(config);

  std::vector<BidRunResult> runs(config.seeds.size());
  run_indexed(config.seeds.size(), [&](size_t i) {
    try {
      runs[i] = run_bid_campaigns(dataset, bid_config, config.seeds[i]);
    } catch (const std::exception& e) {
      runs[i].partial = true;
      runs[i].abort_reason = e.what();
    }
  });

  ExperimentResult result;
  double benchmark_spend = 0.0;
  int benchmark_ads = 0;
  for (const Campaign& c : dataset.campaigns) {
    for (const Ad& ad : c.ads) benchmark_spend += ad.true_bid_price;
    benchmark_ads += c.size();
  }

  std::ostringstream summary;
  summary << "scenario: bid\n";
  summary << "campaigns: " << dataset.campaigns.size() << ", ads per campaign: "
          << (dataset.campaigns.empty() ? 0 : dataset.campaigns.front().size()) << "\n";
  summary << "benchmark mean bid: "
          << format_double(benchmark_ads > 0 ? benchmark_spend / benchmark_ads : 0.0) << "\n";
  for (size_t i = 0; i < config.seeds.size(); ++i) {
    const uint64_t seed = config.seeds[i];
    const BidRunResult& run = runs[i];
    std::ostringstream campaigns_csv;
    write_campaigns_csv(campaigns_csv, run.outcomes);
    const std::string name =
        i == 0 ? "campaigns.csv" : "campaigns_seed" + std::to_string(seed) + ".csv";
    write_file(out_dir / name, campaigns_csv.str());

    int accepted = 0, roi_ok = 0, bid_count = 0;
    double spend = 0.0;
    for (const CampaignOutcome& o : run.outcomes) {
      if (o.safety_hold) continue;
      ++accepted;
      if (o.realized_roi >= o.threshold) ++roi_ok;
      spend += o.spend;
      bid_count += static_cast<int>(o.bids.size());
    }
    summary << "seed " << seed << ": accepted " << accepted << "/" << run.outcomes.size()
            << ", roi >= threshold in " << roi_ok << ", mean bid "
            << format_double(bid_count > 0 ? spend / bid_count : 0.0) << "\n";
    if (run.partial) {
      result.diagnostics.push_back("seed " + std::to_string(seed) + ": " + run.abort_reason);
      result.exit_code = 1;
    }
  }
  summary << "partial runs: " << result.diagnostics.size() << "\n";
  for (const std::string& d : result.diagnostics) summary << "  " << d << "\n";
  write_file(out_dir / "summary.txt", summary.str());
  return result;
}

}  // namespace

TrackingScenario make_scenario(const ExperimentConfig& config) {
  if (config.scenario == "motor") {
    MotorScenarioOptions opts = config.motor;
    return make_motor_scenario(opts);
  }
  if (config.scenario == "toy") return make_toy_scenario();
  throw std::invalid_argument("scenario '" + config.scenario +
                              "' does not run the tracking path");
}

BidConfig make_bid_config(const ExperimentConfig& config) {
  const BidSettings& b = config.bid;
  BidConfig out;
  out.click_cost_weight = b.click_cost_weight;
  out.zeta = b.zeta;
  out.price_kernel.family = KernelFamily::Matern32;
  out.price_kernel.length_scale = b.price_length_scale;
  out.price_kernel.signal_variance = b.price_signal_std * b.price_signal_std;
  out.click_kernel.family = KernelFamily::SquaredExponential;
  out.click_kernel.length_scale = b.click_length_scale;
  out.click_kernel.signal_variance = b.click_signal_std * b.click_signal_std;
  out.click_feature_dim = b.gen.click_feature_dim;
  out.bid_augmented_clicks = b.bid_augmented_clicks;
  out.roi_threshold_factor = b.gen.roi_threshold_factor;
  out.price_noise_std = b.price_noise_std;
  out.click_noise_std = b.click_noise_std;
  out.price_gp_noise_variance = b.price_gp_noise_variance;
  out.click_gp_noise_variance = b.click_gp_noise_variance;
  out.confidence = config.confidence;
  out.beta_override = b.beta_override;
  out.solver = config.solver;
  return out;
}

BidDataset load_bid_dataset(const ExperimentConfig& config) {
  if (!config.bid.data_csv.empty()) {
    std::ifstream in(config.bid.data_csv);
    if (!in) throw std::runtime_error("cannot open " + config.bid.data_csv);
    return ingest_campaign_csv(in, config.bid.gen.roi_threshold_factor);
  }
  return generate_bid_dataset(config.bid.data_seed, config.bid.gen);
}

RunOptions make_run_options(const ExperimentConfig& config, uint64_t seed) {
  RunOptions opts;
  opts.horizon = config.horizon;
  opts.zeta = config.zeta;
  opts.confidence = config.confidence;
  opts.beta_override = config.beta_override;
  opts.solver = config.solver;
  opts.seed = seed;
  return opts;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  try {
    validate_config(config);
    const std::filesystem::path out_dir(config.out_dir);
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "effective_config.txt", serialize_config(config));
    log_info("running scenario " + config.scenario + " into " + out_dir.string());
    if (config.scenario == "bid") return run_bid_experiment(config, out_dir);
    return run_tracking_experiment(config, out_dir);
  } catch (const std::exception& e) {
    log_error(e.what());
    return {2, {e.what()}};
  }
}

}  // namespace arteo
