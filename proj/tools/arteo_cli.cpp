#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arteo/csv.hpp"
#include "arteo/errors.hpp"
#include "arteo/experiment.hpp"
#include "arteo/hyperopt.hpp"
#include "arteo/log.hpp"

namespace {

arteo::ExperimentConfig load_config(const std::string& path, const std::string& out_override,
                                    int64_t seed_override) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  arteo::ExperimentConfig config = arteo::parse_config(text);
  if (!out_override.empty()) config.out_dir = out_override;
  if (seed_override >= 0) config.seeds = {static_cast<uint64_t>(seed_override)};
  return config;
}

std::filesystem::path ensure_out_dir(const arteo::ExperimentConfig& config) {
  std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int cmd_run(const arteo::ExperimentConfig& config) {
  const arteo::ExperimentResult result = arteo::run_experiment(config);
  for (const std::string& d : result.diagnostics) std::cerr << d << "\n";
  if (result.exit_code == 0)
    std::cout << "outputs written to " << config.out_dir << "\n";
  return result.exit_code;
}

int cmd_grid_z(const arteo::ExperimentConfig& config, const std::vector<double>& candidates) {
  const arteo::TrackingScenario scenario = arteo::make_scenario(config);
  const arteo::RunOptions base = arteo::make_run_options(config, config.seeds.front());
  const arteo::GridZResult result = arteo::grid_search_z(candidates, scenario, base);
  std::ostringstream csv;
  csv << "z,mean_terminal_regret";
  for (size_t s = 0; s < result.seeds.size(); ++s) csv << ",regret_" << s;
  csv << "\n";
  for (const arteo::GridZRow& row : result.table) {
    csv << arteo::format_double(row.z) << "," << arteo::format_double(row.mean_terminal_regret);
    for (double r : row.per_seed_regret) csv << "," << arteo::format_double(r);
    csv << "\n";
  }
  const auto dir = ensure_out_dir(config);
  write_file(dir / "grid_z.csv", csv.str());
  for (const arteo::GridZRow& row : result.table)
    std::cout << "z=" << row.z << "  mean terminal regret " << row.mean_terminal_regret << "\n";
  std::cout << "best z: " << result.best_z << "\n";
  return 0;
}

int cmd_bo_z(const arteo::ExperimentConfig& config, double lo, double hi, int budget) {
  const arteo::TrackingScenario scenario = arteo::make_scenario(config);
  const arteo::RunOptions base = arteo::make_run_options(config, config.seeds.front());
  const arteo::BayesOptResult result = arteo::bayesopt_z(lo, hi, budget, scenario, base);
  std::ostringstream points;
  points << "evaluation,z,regret,incumbent\n";
  for (size_t i = 0; i < result.evaluated.size(); ++i)
    points << i << "," << arteo::format_double(result.evaluated[i].x) << ","
           << arteo::format_double(result.evaluated[i].value) << ","
           << arteo::format_double(result.incumbent_values[i]) << "\n";
  std::ostringstream surrogate;
  surrogate << "z,mean,lower,upper\n";
  for (size_t i = 0; i < result.grid.size(); ++i)
    surrogate << arteo::format_double(result.grid[i]) << ","
              << arteo::format_double(result.surrogate_mean[i]) << ","
              << arteo::format_double(result.surrogate_lower[i]) << ","
              << arteo::format_double(result.surrogate_upper[i]) << "\n";
  const auto dir = ensure_out_dir(config);
  write_file(dir / "bo_z_points.csv", points.str());
  write_file(dir / "bo_z_surrogate.csv", surrogate.str());
  std::cout << "best z: " << result.best_x << " (mean terminal regret " << result.best_value
            << ", " << result.evaluated.size() << " evaluations)\n";
  return 0;
}

int cmd_probe_complexity(const arteo::ExperimentConfig& config,
                         const std::vector<int>& horizons) {
  const arteo::TrackingScenario scenario = arteo::make_scenario(config);
  const arteo::RunOptions base = arteo::make_run_options(config, config.seeds.front());
  const arteo::ComplexityResult result = arteo::complexity_probe(scenario, horizons, base);
  std::ostringstream csv;
  csv << "horizon,mean_step_seconds\n";
  for (const arteo::ComplexityRow& row : result.rows)
    csv << row.horizon << "," << arteo::format_double(row.mean_step_seconds) << "\n";
  const auto dir = ensure_out_dir(config);
  write_file(dir / "complexity.csv", csv.str());
  for (const arteo::ComplexityRow& row : result.rows)
    std::cout << "horizon " << row.horizon << ": " << row.mean_step_seconds << " s/step\n";
  if (result.slope_defined)
    std::cout << "log-log slope: " << result.slope << "\n";
  else
    std::cout << "log-log slope: undefined (need at least two horizons)\n";
  return 0;
}

int cmd_gen_bids(uint64_t seed, const arteo::BidGenSettings& gen, const std::string& out_path) {
  const arteo::BidDataset dataset = arteo::generate_bid_dataset(seed, gen);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  arteo::write_campaign_csv(out, dataset);
  std::cout << "wrote " << dataset.campaigns.size() << " campaigns ("
            << gen.ads_per_campaign << " ads each) + " << dataset.seed_pool.size()
            << " seed-pool rows to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe adaptive exploration-and-optimization experiments"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int64_t seed_override = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value lines)");
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "replace the config's seed list with one seed");
  };

  CLI::App* run = app.add_subcommand("run", "run the configured experiment");
  add_common(run);

  std::vector<double> candidates{5.0, 10.0, 25.0, 50.0, 100.0};
  CLI::App* grid = app.add_subcommand("grid-z", "grid search over the exploration weight");
  add_common(grid);
  grid->add_option("--candidates", candidates, "exploration weights to try")->delimiter(',');

  double bo_lo = 1.0, bo_hi = 100.0;
  int bo_budget = 35;
  CLI::App* bo = app.add_subcommand("bo-z", "surrogate search over the exploration weight");
  add_common(bo);
  bo->add_option("--lo", bo_lo, "lower bound");
  bo->add_option("--hi", bo_hi, "upper bound");
  bo->add_option("--budget", bo_budget, "evaluation budget (capped at 35)");

  std::vector<int> horizons{50, 100, 200};
  CLI::App* probe = app.add_subcommand("probe-complexity", "time per step across horizons");
  add_common(probe);
  probe->add_option("--horizons", horizons, "increasing run lengths")->delimiter(',');

  uint64_t gen_seed = 7;
  arteo::BidGenSettings gen;
  std::string gen_out = "campaigns_data.csv";
  CLI::App* gen_bids = app.add_subcommand("gen-bids", "emit a synthetic campaign CSV");
  gen_bids->add_option("--seed", gen_seed, "generator seed");
  gen_bids->add_option("--campaigns", gen.campaign_count, "number of campaigns");
  gen_bids->add_option("--ads", gen.ads_per_campaign, "ads per campaign");
  gen_bids->add_option("--features", gen.feature_dim, "feature vector length");
  gen_bids->add_option("--click-features", gen.click_feature_dim,
                       "leading features the click model sees");
  gen_bids->add_option("--pool", gen.seed_pool_size, "historical seed-pool size");
  gen_bids->add_option("--out", gen_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_bids->parsed()) return cmd_gen_bids(gen_seed, gen, gen_out);
    const arteo::ExperimentConfig config = load_config(config_path, out_override, seed_override);
    if (run->parsed()) return cmd_run(config);
    if (grid->parsed()) return cmd_grid_z(config, candidates);
    if (bo->parsed()) return cmd_bo_z(config, bo_lo, bo_hi, bo_budget);
    if (probe->parsed()) return cmd_probe_complexity(config, horizons);
  } catch (const arteo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
