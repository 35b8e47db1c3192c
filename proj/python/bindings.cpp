#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "arteo/confidence.hpp"
#include "arteo/csv.hpp"
#include "arteo/experiment.hpp"
#include "arteo/gp.hpp"
#include "arteo/hyperopt.hpp"
#include "arteo/metrics.hpp"
#include "arteo/safe_ucb.hpp"

namespace py = pybind11;
using namespace arteo;

namespace {

GaussianProcess condition_xy(const KernelSpec& kernel, double noise_variance,
                             const Eigen::MatrixXd& inputs, const Eigen::VectorXd& values) {
  if (inputs.rows() != values.size())
    throw std::invalid_argument("inputs and values disagree on the number of observations");
  std::vector<Observation> data;
  data.reserve(static_cast<size_t>(inputs.rows()));
  for (Eigen::Index i = 0; i < inputs.rows(); ++i)
    data.push_back({inputs.row(i).transpose(), values[i]});
  return GaussianProcess(kernel, noise_variance, std::move(data));
}

py::dict trace_to_dict(const RunTrace& trace) {
  py::dict out;
  out["algorithm"] = trace.algorithm;
  out["seed"] = trace.seed;
  out["partial"] = trace.partial;
  out["abort_reason"] = trace.abort_reason;
  std::vector<int> t;
  std::vector<double> goal, produced_pred, produced_true, z, beta_t, gamma, margin, regret;
  std::vector<std::vector<double>> decisions;
  std::vector<bool> holds;
  for (const TraceRow& row : trace.rows) {
    t.push_back(row.t);
    goal.push_back(row.goal);
    decisions.emplace_back(row.decision.data(), row.decision.data() + row.decision.size());
    produced_pred.push_back(row.produced_pred);
    produced_true.push_back(row.produced_true);
    z.push_back(row.z);
    beta_t.push_back(row.beta);
    gamma.push_back(row.gamma);
    margin.push_back(row.constraint_margin);
    regret.push_back(row.regret);
    holds.push_back(row.safety_hold);
  }
  out["t"] = t;
  out["goal"] = goal;
  out["decision"] = decisions;
  out["produced_pred"] = produced_pred;
  out["produced_true"] = produced_true;
  out["z"] = z;
  out["beta"] = beta_t;
  out["gamma"] = gamma;
  out["constraint_margin"] = margin;
  out["regret"] = regret;
  out["safety_hold"] = holds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_arteo, m) {
  m.doc() = "Safe adaptive exploration-and-optimization core";

  py::enum_<KernelFamily>(m, "KernelFamily")
      .value("SquaredExponential", KernelFamily::SquaredExponential)
      .value("Matern32", KernelFamily::Matern32);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def(py::init([](KernelFamily family, double length_scale, double signal_variance) {
             KernelSpec spec{family, length_scale, signal_variance};
             spec.validate();
             return spec;
           }),
           py::arg("family") = KernelFamily::SquaredExponential, py::arg("length_scale") = 1.0,
           py::arg("signal_variance") = 1.0)
      .def_readwrite("family", &KernelSpec::family)
      .def_readwrite("length_scale", &KernelSpec::length_scale)
      .def_readwrite("signal_variance", &KernelSpec::signal_variance);

  m.def("kernel_eval", &kernel_eval, py::arg("spec"), py::arg("a"), py::arg("b"));
  m.def("gram_matrix", &gram_matrix, py::arg("spec"), py::arg("inputs"));

  py::class_<GaussianProcess>(m, "GaussianProcess")
      .def(py::init<KernelSpec, double>(), py::arg("kernel"), py::arg("noise_variance"))
      .def(py::init(&condition_xy), py::arg("kernel"), py::arg("noise_variance"),
           py::arg("inputs"), py::arg("values"))
      .def("predict",
           [](const GaussianProcess& model, const Eigen::VectorXd& x) {
             const Prediction p = model.predict(x);
             return py::make_tuple(p.mean, p.std);
           },
           py::arg("x"))
      .def_property_readonly("size", &GaussianProcess::size)
      .def_property_readonly("input_dim", &GaussianProcess::input_dim);

  m.def("information_gain", &information_gain, py::arg("gram"), py::arg("noise_variance"));
  m.def(
      "beta",
      [](double rkhs_bound, double noise_scale, double failure_prob, double gamma_running) {
        return beta(ConfidenceParams{rkhs_bound, noise_scale, failure_prob, gamma_running});
      },
      py::arg("rkhs_bound") = 1.0, py::arg("noise_scale") = 0.0, py::arg("failure_prob") = 0.05,
      py::arg("gamma_running") = 0.0);

  m.def(
      "run_tracking",
      [](const std::string& scenario_name, const std::string& algorithm, uint64_t seed,
         int horizon, double zeta, std::optional<double> beta_override) {
        ExperimentConfig config;
        config.scenario = scenario_name;
        config.horizon = horizon;
        config.zeta = zeta;
        config.beta_override = beta_override;
        const TrackingScenario scenario = make_scenario(config);
        const RunOptions opts = make_run_options(config, seed);
        const RunTrace trace =
            algorithm == "safe_ucb" ? run_safe_ucb(scenario, opts) : run_arteo(scenario, opts);
        return trace_to_dict(trace);
      },
      py::arg("scenario") = "motor", py::arg("algorithm") = "arteo", py::arg("seed") = 1,
      py::arg("horizon") = 0, py::arg("zeta") = 25.0, py::arg("beta_override") = 3.0,
      "One tracking run (motor or toy); returns the trace as column lists.");

  m.def(
      "run_config",
      [](const std::string& text) {
        const ExperimentConfig config = parse_config(text);
        const ExperimentResult result = run_experiment(config);
        return py::make_tuple(result.exit_code, result.diagnostics);
      },
      py::arg("text"), "Full experiment from config text; writes the configured out_dir.");

  m.def(
      "generate_campaign_csv",
      [](uint64_t seed, int campaigns, int ads) {
        BidGenSettings gen;
        gen.campaign_count = campaigns;
        gen.ads_per_campaign = ads;
        const BidDataset dataset = generate_bid_dataset(seed, gen);
        std::ostringstream out;
        write_campaign_csv(out, dataset);
        return out.str();
      },
      py::arg("seed") = 7, py::arg("campaigns") = 25, py::arg("ads") = 10);

  m.attr("trace_schema_version") = kTraceSchemaVersion;
}
