#include "arteo/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "arteo/csv.hpp"
#include "arteo/errors.hpp"

namespace arteo {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// List items separate on commas and/or whitespace.
std::vector<std::string> tokens_of(const std::string& s) {
  std::string spaced = s;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::vector<std::string> out;
  std::istringstream in(spaced);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& v, int line, const std::string& key) {
  size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, key, "not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(line, key, "trailing characters in '" + v + "'");
  if (!std::isfinite(out)) throw ConfigError(line, key, "value must be finite");
  return out;
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, key, "not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(line, key, "trailing characters in '" + v + "'");
  return out;
}

uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  if (!v.empty() && v[0] == '-') throw ConfigError(line, key, "must be nonnegative");
  size_t used = 0;
  uint64_t out = 0;
  try {
    out = std::stoull(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(line, key, "not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(line, key, "trailing characters in '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, key, "expected true or false, found '" + v + "'");
}

std::optional<double> parse_optional_real(const std::string& v, int line,
                                          const std::string& key) {
  if (v == "none") return std::nullopt;
  return parse_real(v, line, key);
}

std::vector<uint64_t> parse_seed_list(const std::string& v, int line, const std::string& key) {
  std::vector<uint64_t> out;
  for (const std::string& tok : tokens_of(v)) {
    const auto dots = tok.find("..");
    if (dots != std::string::npos) {
      const uint64_t a = parse_u64(tok.substr(0, dots), line, key);
      const uint64_t b = parse_u64(tok.substr(dots + 2), line, key);
      if (b < a) throw ConfigError(line, key, "range " + tok + " runs backwards");
      if (b - a > 100000) throw ConfigError(line, key, "range " + tok + " is too large");
      for (uint64_t s = a; s <= b; ++s) out.push_back(s);
    } else {
      out.push_back(parse_u64(tok, line, key));
    }
  }
  if (out.empty()) throw ConfigError(line, key, "list is empty");
  return out;
}

ReferenceSignal parse_reference(const std::string& v, int line, const std::string& key) {
  std::vector<std::pair<int, double>> segments;
  for (const std::string& tok : tokens_of(v)) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw ConfigError(line, key, "segment '" + tok + "' is not duration:level");
    const long long duration = parse_int(tok.substr(0, colon), line, key);
    const double level = parse_real(tok.substr(colon + 1), line, key);
    if (duration < 1) throw ConfigError(line, key, "segment duration must be >= 1");
    if (level < 0.0) throw ConfigError(line, key, "segment level must be >= 0");
    segments.emplace_back(static_cast<int>(duration), level);
  }
  if (segments.empty()) throw ConfigError(line, key, "reference has no segments");
  return ReferenceSignal(std::move(segments));
}

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(0, field, message);
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  check(c.scenario == "motor" || c.scenario == "bid" || c.scenario == "toy", "scenario",
        "must be motor, bid, or toy (found '" + c.scenario + "')");
  check(c.algorithm == "arteo" || c.algorithm == "safe_ucb" || c.algorithm == "both",
        "algorithm", "must be arteo, safe_ucb, or both (found '" + c.algorithm + "')");
  check(c.horizon >= 0, "horizon", "must be >= 0");
  check(!c.seeds.empty(), "seeds", "need at least one seed");
  check(c.zeta >= 0.0, "zeta", "must be >= 0");
  if (c.beta_override) check(*c.beta_override > 0.0, "beta_override", "must be positive");
  check(c.confidence.rkhs_bound > 0.0, "confidence.rkhs_bound", "must be positive");
  check(c.confidence.noise_scale >= 0.0, "confidence.noise_scale", "must be >= 0");
  check(c.confidence.failure_prob > 0.0 && c.confidence.failure_prob < 1.0,
        "confidence.failure_prob", "must lie strictly between 0 and 1");
  check(c.solver.max_iterations >= 1, "solver.max_iterations", "must be >= 1");
  check(c.solver.tol_feasibility > 0.0, "solver.tol_feasibility", "must be positive");
  check(c.solver.tol_stationarity > 0.0, "solver.tol_stationarity", "must be positive");
  check(c.solver.multistarts >= 1, "solver.multistarts", "must be >= 1");
  check(c.solver.outer_rounds >= 1, "solver.outer_rounds", "must be >= 1");
  check(!c.out_dir.empty(), "out_dir", "must not be empty");

  const MotorScenarioOptions& m = c.motor;
  check(m.safety_limit > 0.0, "motor.safety_limit", "must be positive");
  check(m.goal_margin > 0.0, "motor.goal_margin", "must be positive");
  check(m.torque_lo < m.torque_hi, "motor.torque_lo", "needs torque_lo < torque_hi");
  check(m.noise_std >= 0.0, "motor.noise_std", "must be >= 0");
  check(m.gp_noise_variance > 0.0, "motor.gp_noise_variance", "must be positive");
  check(m.length_scale > 0.0, "motor.length_scale", "must be positive");
  check(m.signal_std > 0.0, "motor.signal_std", "must be positive");
  check(m.reference.horizon() > 0, "motor.reference", "reference must be nonempty");
  if (m.fixed_seed_inputs.empty()) {
    check(m.seed_lo < m.seed_hi, "motor.seed_lo", "needs seed_lo < seed_hi");
    check(m.seed_lo >= m.torque_lo && m.seed_hi <= m.torque_hi, "motor.seed_lo",
          "seed range must sit inside the torque bounds");
    check(m.seed_count >= 1, "motor.seed_count", "must be >= 1");
  } else {
    for (double x : m.fixed_seed_inputs)
      check(x >= m.torque_lo && x <= m.torque_hi, "motor.seed_inputs",
            "seed input " + format_double(x) + " is outside the torque bounds");
    check(static_cast<int>(m.fixed_seed_inputs.size()) == m.seed_count, "motor.seed_count",
          "must equal the number of seed inputs");
  }

  const BidSettings& b = c.bid;
  check(b.gen.ads_per_campaign >= 1, "bid.ads_per_campaign", "must be >= 1");
  check(b.gen.campaign_count >= 1, "bid.campaign_count", "must be >= 1");
  check(b.gen.feature_dim >= 1, "bid.feature_dim", "must be >= 1");
  check(b.gen.click_feature_dim >= 1 && b.gen.click_feature_dim <= b.gen.feature_dim,
        "bid.click_feature_dim", "must lie in [1, feature_dim]");
  check(b.gen.seed_pool_size >= 1, "bid.seed_pool_size", "must be >= 1");
  check(b.gen.roi_threshold_factor > 0.0, "bid.roi_threshold_factor", "must be positive");
  check(b.zeta >= 0.0, "bid.zeta", "must be >= 0");
  check(b.click_cost_weight >= 0.0, "bid.click_cost_weight", "must be >= 0");
  if (b.beta_override) check(*b.beta_override > 0.0, "bid.beta_override", "must be positive");
  check(b.price_noise_std >= 0.0, "bid.price_noise_std", "must be >= 0");
  check(b.click_noise_std >= 0.0, "bid.click_noise_std", "must be >= 0");
  check(b.price_gp_noise_variance > 0.0, "bid.price_gp_noise_variance", "must be positive");
  check(b.click_gp_noise_variance > 0.0, "bid.click_gp_noise_variance", "must be positive");
  check(b.price_length_scale > 0.0, "bid.price_length_scale", "must be positive");
  check(b.price_signal_std > 0.0, "bid.price_signal_std", "must be positive");
  check(b.click_length_scale > 0.0, "bid.click_length_scale", "must be positive");
  check(b.click_signal_std > 0.0, "bid.click_signal_std", "must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  c.motor.reference = ReferenceSignal();  // must know whether it was set explicitly
  std::map<std::string, int> key_lines;
  std::string reference_csv_path;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "", "expected 'key = value', found '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "", "missing key before '='");
    if (key_lines.count(key))
      throw ConfigError(line_no, key,
                        "duplicate key (first set on line " +
                            std::to_string(key_lines[key]) + ")");
    key_lines[key] = line_no;

    if (key == "scenario") {
      c.scenario = value;
    } else if (key == "algorithm") {
      c.algorithm = value;
    } else if (key == "horizon") {
      c.horizon = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "seeds") {
      c.seeds = parse_seed_list(value, line_no, key);
    } else if (key == "zeta") {
      c.zeta = parse_real(value, line_no, key);
    } else if (key == "beta_override") {
      c.beta_override = parse_optional_real(value, line_no, key);
    } else if (key == "out_dir") {
      if (value.empty()) throw ConfigError(line_no, key, "must not be empty");
      c.out_dir = value;
    } else if (key == "confidence.rkhs_bound") {
      c.confidence.rkhs_bound = parse_real(value, line_no, key);
    } else if (key == "confidence.noise_scale") {
      c.confidence.noise_scale = parse_real(value, line_no, key);
    } else if (key == "confidence.failure_prob") {
      c.confidence.failure_prob = parse_real(value, line_no, key);
    } else if (key == "solver.max_iterations") {
      c.solver.max_iterations = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "solver.tol_feasibility") {
      c.solver.tol_feasibility = parse_real(value, line_no, key);
    } else if (key == "solver.tol_stationarity") {
      c.solver.tol_stationarity = parse_real(value, line_no, key);
    } else if (key == "solver.multistarts") {
      c.solver.multistarts = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "solver.outer_rounds") {
      c.solver.outer_rounds = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "motor.safety_limit") {
      c.motor.safety_limit = parse_real(value, line_no, key);
    } else if (key == "motor.goal_margin") {
      c.motor.goal_margin = parse_real(value, line_no, key);
    } else if (key == "motor.torque_lo") {
      c.motor.torque_lo = parse_real(value, line_no, key);
    } else if (key == "motor.torque_hi") {
      c.motor.torque_hi = parse_real(value, line_no, key);
    } else if (key == "motor.noise_std") {
      c.motor.noise_std = parse_real(value, line_no, key);
    } else if (key == "motor.gp_noise_variance") {
      c.motor.gp_noise_variance = parse_real(value, line_no, key);
    } else if (key == "motor.length_scale") {
      c.motor.length_scale = parse_real(value, line_no, key);
    } else if (key == "motor.signal_std") {
      c.motor.signal_std = parse_real(value, line_no, key);
    } else if (key == "motor.reference") {
      c.motor.reference = parse_reference(value, line_no, key);
    } else if (key == "motor.reference_csv") {
      reference_csv_path = value;
    } else if (key == "motor.seed_inputs") {
      if (value == "random") {
        c.motor.fixed_seed_inputs.clear();
      } else {
        c.motor.fixed_seed_inputs.clear();
        for (const std::string& tok : tokens_of(value))
          c.motor.fixed_seed_inputs.push_back(parse_real(tok, line_no, key));
        if (c.motor.fixed_seed_inputs.empty())
          throw ConfigError(line_no, key, "need seed inputs or the word 'random'");
        c.motor.seed_count = static_cast<int>(c.motor.fixed_seed_inputs.size());
      }
    } else if (key == "motor.seed_lo") {
      c.motor.seed_lo = parse_real(value, line_no, key);
    } else if (key == "motor.seed_hi") {
      c.motor.seed_hi = parse_real(value, line_no, key);
    } else if (key == "motor.seed_count") {
      c.motor.seed_count = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.ads_per_campaign") {
      c.bid.gen.ads_per_campaign = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.campaign_count") {
      c.bid.gen.campaign_count = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.feature_dim") {
      c.bid.gen.feature_dim = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.click_feature_dim") {
      c.bid.gen.click_feature_dim = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.seed_pool_size") {
      c.bid.gen.seed_pool_size = static_cast<int>(parse_int(value, line_no, key));
    } else if (key == "bid.roi_threshold_factor") {
      c.bid.gen.roi_threshold_factor = parse_real(value, line_no, key);
    } else if (key == "bid.data_seed") {
      c.bid.data_seed = parse_u64(value, line_no, key);
    } else if (key == "bid.data_csv") {
      c.bid.data_csv = value;
    } else if (key == "bid.zeta") {
      c.bid.zeta = parse_real(value, line_no, key);
    } else if (key == "bid.click_cost_weight") {
      c.bid.click_cost_weight = parse_real(value, line_no, key);
    } else if (key == "bid.beta_override") {
      c.bid.beta_override = parse_optional_real(value, line_no, key);
    } else if (key == "bid.price_noise_std") {
      c.bid.price_noise_std = parse_real(value, line_no, key);
    } else if (key == "bid.click_noise_std") {
      c.bid.click_noise_std = parse_real(value, line_no, key);
    } else if (key == "bid.price_gp_noise_variance") {
      c.bid.price_gp_noise_variance = parse_real(value, line_no, key);
    } else if (key == "bid.click_gp_noise_variance") {
      c.bid.click_gp_noise_variance = parse_real(value, line_no, key);
    } else if (key == "bid.price_length_scale") {
      c.bid.price_length_scale = parse_real(value, line_no, key);
    } else if (key == "bid.price_signal_std") {
      c.bid.price_signal_std = parse_real(value, line_no, key);
    } else if (key == "bid.click_length_scale") {
      c.bid.click_length_scale = parse_real(value, line_no, key);
    } else if (key == "bid.click_signal_std") {
      c.bid.click_signal_std = parse_real(value, line_no, key);
    } else if (key == "bid.bid_augmented_clicks") {
      c.bid.bid_augmented_clicks = parse_bool(value, line_no, key);
    } else {
      throw ConfigError(line_no, key, "unknown key");
    }
  }

  if (!reference_csv_path.empty()) {
    if (key_lines.count("motor.reference"))
      throw ConfigError(key_lines["motor.reference_csv"], "motor.reference_csv",
                        "give either motor.reference or motor.reference_csv, not both");
    std::ifstream file(reference_csv_path);
    if (!file)
      throw ConfigError(key_lines["motor.reference_csv"], "motor.reference_csv",
                        "cannot open '" + reference_csv_path + "'");
    try {
      c.motor.reference = load_reference_csv(file);
    } catch (const std::exception& e) {
      throw ConfigError(key_lines["motor.reference_csv"], "motor.reference_csv", e.what());
    }
  }
  if (c.motor.reference.horizon() == 0) c.motor.reference = default_motor_reference();

  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    const auto it = key_lines.find(e.field());
    if (it != key_lines.end()) throw ConfigError(it->second, e.field(), e.message());
    throw;
  }
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "scenario = " << c.scenario << '\n';
  out << "algorithm = " << c.algorithm << '\n';
  out << "horizon = " << c.horizon << '\n';
  out << "seeds =";
  for (uint64_t s : c.seeds) out << ' ' << s;
  out << '\n';
  out << "zeta = " << format_double(c.zeta) << '\n';
  out << "beta_override = "
      << (c.beta_override ? format_double(*c.beta_override) : std::string("none")) << '\n';
  out << "out_dir = " << c.out_dir << '\n';
  out << "confidence.rkhs_bound = " << format_double(c.confidence.rkhs_bound) << '\n';
  out << "confidence.noise_scale = " << format_double(c.confidence.noise_scale) << '\n';
  out << "confidence.failure_prob = " << format_double(c.confidence.failure_prob) << '\n';
  out << "solver.max_iterations = " << c.solver.max_iterations << '\n';
  out << "solver.tol_feasibility = " << format_double(c.solver.tol_feasibility) << '\n';
  out << "solver.tol_stationarity = " << format_double(c.solver.tol_stationarity) << '\n';
  out << "solver.multistarts = " << c.solver.multistarts << '\n';
  out << "solver.outer_rounds = " << c.solver.outer_rounds << '\n';
  out << "motor.safety_limit = " << format_double(c.motor.safety_limit) << '\n';
  out << "motor.goal_margin = " << format_double(c.motor.goal_margin) << '\n';
  out << "motor.torque_lo = " << format_double(c.motor.torque_lo) << '\n';
  out << "motor.torque_hi = " << format_double(c.motor.torque_hi) << '\n';
  out << "motor.noise_std = " << format_double(c.motor.noise_std) << '\n';
  out << "motor.gp_noise_variance = " << format_double(c.motor.gp_noise_variance) << '\n';
  out << "motor.length_scale = " << format_double(c.motor.length_scale) << '\n';
  out << "motor.signal_std = " << format_double(c.motor.signal_std) << '\n';
  out << "motor.reference =";
  for (const auto& [duration, level] : c.motor.reference.segments())
    out << ' ' << duration << ':' << format_double(level);
  out << '\n';
  if (c.motor.fixed_seed_inputs.empty()) {
    out << "motor.seed_inputs = random\n";
    out << "motor.seed_lo = " << format_double(c.motor.seed_lo) << '\n';
    out << "motor.seed_hi = " << format_double(c.motor.seed_hi) << '\n';
    out << "motor.seed_count = " << c.motor.seed_count << '\n';
  } else {
    out << "motor.seed_inputs =";
    for (double x : c.motor.fixed_seed_inputs) out << ' ' << format_double(x);
    out << '\n';
    out << "motor.seed_lo = " << format_double(c.motor.seed_lo) << '\n';
    out << "motor.seed_hi = " << format_double(c.motor.seed_hi) << '\n';
  }
  out << "bid.ads_per_campaign = " << c.bid.gen.ads_per_campaign << '\n';
  out << "bid.campaign_count = " << c.bid.gen.campaign_count << '\n';
  out << "bid.feature_dim = " << c.bid.gen.feature_dim << '\n';
  out << "bid.click_feature_dim = " << c.bid.gen.click_feature_dim << '\n';
  out << "bid.seed_pool_size = " << c.bid.gen.seed_pool_size << '\n';
  out << "bid.roi_threshold_factor = " << format_double(c.bid.gen.roi_threshold_factor)
      << '\n';
  out << "bid.data_seed = " << c.bid.data_seed << '\n';
  if (!c.bid.data_csv.empty()) out << "bid.data_csv = " << c.bid.data_csv << '\n';
  out << "bid.zeta = " << format_double(c.bid.zeta) << '\n';
  out << "bid.click_cost_weight = " << format_double(c.bid.click_cost_weight) << '\n';
  out << "bid.beta_override = "
      << (c.bid.beta_override ? format_double(*c.bid.beta_override) : std::string("none"))
      << '\n';
  out << "bid.price_noise_std = " << format_double(c.bid.price_noise_std) << '\n';
  out << "bid.click_noise_std = " << format_double(c.bid.click_noise_std) << '\n';
  out << "bid.price_gp_noise_variance = " << format_double(c.bid.price_gp_noise_variance)
      << '\n';
  out << "bid.click_gp_noise_variance = " << format_double(c.bid.click_gp_noise_variance)
      << '\n';
  out << "bid.price_length_scale = " << format_double(c.bid.price_length_scale) << '\n';
  out << "bid.price_signal_std = " << format_double(c.bid.price_signal_std) << '\n';
  out << "bid.click_length_scale = " << format_double(c.bid.click_length_scale) << '\n';
  out << "bid.click_signal_std = " << format_double(c.bid.click_signal_std) << '\n';
  out << "bid.bid_augmented_clicks = " << (c.bid.bid_augmented_clicks ? "true" : "false")
      << '\n';
  return out.str();
}

}  // namespace arteo
