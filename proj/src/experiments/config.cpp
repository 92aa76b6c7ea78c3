#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "mor/errors.hpp"
#include "mor/experiments.hpp"

namespace mor::experiments {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidInput, "config: " + what); }

const char* output_mode_name(thermalblock::OutputMode mode) {
  return mode == thermalblock::OutputMode::kBlockAverages ? "block_averages" : "domain_average";
}

thermalblock::OutputMode output_mode_from(const std::string& s) {
  if (s == "block_averages") return thermalblock::OutputMode::kBlockAverages;
  if (s == "domain_average") return thermalblock::OutputMode::kDomainAverage;
  invalid("unknown output_mode '" + s + "'");
}

SolverKind solver_from(const std::string& s) {
  if (s == "dense") return SolverKind::kDense;
  if (s == "lowrank") return SolverKind::kLowRank;
  invalid("unknown solver '" + s + "'");
}

const char* h2_method_name(H2ErrorMethod m) { return m == H2ErrorMethod::kGramian ? "gramian" : "frequency"; }

H2ErrorMethod h2_method_from(const std::string& s) {
  if (s == "gramian") return H2ErrorMethod::kGramian;
  if (s == "frequency") return H2ErrorMethod::kFrequency;
  invalid("unknown h2_error_method '" + s + "'");
}

const char* estimator_name(GreedyEstimator e) { return e == GreedyEstimator::kTrueError ? "true_error" : "residual"; }

GreedyEstimator estimator_from(const std::string& s) {
  if (s == "true_error") return GreedyEstimator::kTrueError;
  if (s == "residual") return GreedyEstimator::kResidual;
  invalid("unknown rb estimator '" + s + "'");
}

void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) invalid(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) invalid("unknown key '" + where + item.key() + "'");
  }
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json sampling_json(const SamplingSpec& s) {
  return Json{{"training_count", s.training_count},
              {"test_count", s.test_count},
              {"exponent_range", {s.exponent_lo, s.exponent_hi}}};
}

void read_sampling(const Json& j, const std::string& where, SamplingSpec& s) {
  reject_unknown(j, where, {"training_count", "test_count", "exponent_range"});
  read(j, "training_count", s.training_count);
  read(j, "test_count", s.test_count);
  if (j.contains("exponent_range")) {
    std::vector<double> range;
    read(j, "exponent_range", range);
    if (range.size() != 2) invalid(where + "exponent_range needs two values");
    s.exponent_lo = range[0];
    s.exponent_hi = range[1];
  }
}

void check_sampling(const SamplingSpec& s, const std::string& where) {
  if (s.training_count < 1) invalid(where + ".training_count must be >= 1");
  if (s.test_count < 0) invalid(where + ".test_count must be >= 0");
  if (!(s.exponent_lo <= s.exponent_hi)) invalid(where + ".exponent_range must be ordered");
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kNonParametric: return "nonparam";
    case Experiment::kOneParam: return "one-param";
    case Experiment::kFourParam: return "four-param";
    case Experiment::kAll: return "all";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kBT: return "BT";
    case Method::kLQGBT: return "LQGBT";
    case Method::kIRKA: return "IRKA";
    case Method::kOSIRKA: return "OSIRKA";
    case Method::kPOD: return "POD";
    case Method::kRB: return "RB";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& name) {
  for (Experiment e : {Experiment::kNonParametric, Experiment::kOneParam, Experiment::kFourParam, Experiment::kAll}) {
    if (name == to_string(e)) return e;
  }
  invalid("unknown experiment '" + name + "'");
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::kBT, Method::kLQGBT, Method::kIRKA, Method::kOSIRKA, Method::kPOD, Method::kRB}) {
    if (name == to_string(m)) return m;
  }
  invalid("unknown method '" + name + "'");
}

bool Config::uses(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

std::filesystem::path Config::resolved_cache_dir() const {
  return cache_dir.empty() ? output_dir / "cache" : cache_dir;
}

unsigned Config::resolved_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void validate(const Config& cfg) {
  try {
    thermalblock::validate(cfg.fom);
  } catch (const Error& e) {
    invalid(std::string("fom: ") + e.what());
  }
  if (cfg.orders.empty()) invalid("orders must not be empty");
  for (std::size_t i = 0; i < cfg.orders.size(); ++i) {
    if (cfg.orders[i] < 1) invalid("orders must be positive");
    if (i > 0 && cfg.orders[i] <= cfg.orders[i - 1]) invalid("orders must be strictly increasing");
  }
  if (cfg.orders.back() > cfg.fom.order()) invalid("orders exceed the FOM order");
  if (cfg.local_order < 1 || cfg.local_order > cfg.fom.order()) invalid("local_order out of range");
  if (cfg.varying_block < 0 || cfg.varying_block >= cfg.fom.num_blocks()) invalid("varying_block out of range");
  if (cfg.methods.empty()) invalid("methods must not be empty");
  check_sampling(cfg.one_param, "one_param");
  check_sampling(cfg.four_param, "four_param");
  const Index midpoints = cfg.one_param.training_count - 1;
  if (cfg.one_param.test_count != 0 && cfg.one_param.test_count != midpoints) {
    invalid("one_param.test_count must be 0 or training_count - 1 (geometric midpoints)");
  }
  if (!(cfg.t_final > 0.0) || cfg.steps < 1) invalid("time grid needs t_final > 0 and steps >= 1");
  if (!(cfg.global_rtol >= 0.0 && cfg.global_rtol <= 1.0)) invalid("global_basis.rtol must lie in [0, 1]");
  if (cfg.irka.max_iter < 1 || !(cfg.irka.conv_tol > 0.0)) invalid("irka options out of range");
  if (cfg.adi.num_shifts < 1 || cfg.adi.max_iter < 1 || !(cfg.adi.res_tol > 0.0)) invalid("adi options out of range");
  if (cfg.h2.panels_per_decade < 1 || cfg.h2.nodes_per_panel < 2) invalid("h2 quadrature options out of range");
  const bool four = cfg.experiment == Experiment::kFourParam || cfg.experiment == Experiment::kAll;
  if (four && !cfg.seed) invalid("seed is mandatory for the four-parameter experiment");
}

Json to_json(const Config& cfg) {
  Json methods = Json::array();
  for (Method m : cfg.methods) methods.push_back(to_string(m));
  Json j;
  j["fom"] = {{"blocks_per_side", cfg.fom.blocks_per_side},
              {"grid_points_per_side", cfg.fom.grid_points_per_side},
              {"output_mode", output_mode_name(cfg.fom.output_mode)}};
  j["experiment"] = to_string(cfg.experiment);
  j["methods"] = methods;
  j["orders"] = cfg.orders;
  j["local_order"] = cfg.local_order;
  j["varying_block"] = cfg.varying_block;
  j["one_param"] = sampling_json(cfg.one_param);
  j["four_param"] = sampling_json(cfg.four_param);
  j["time"] = {{"t_final", cfg.t_final}, {"steps", cfg.steps}};
  j["solver"] = to_string(cfg.solver);
  j["h2_error"] = {{"method", h2_method_name(cfg.h2.method)},
                   {"panels_per_decade", cfg.h2.panels_per_decade},
                   {"nodes_per_panel", cfg.h2.nodes_per_panel}};
  j["adi"] = {{"num_shifts", cfg.adi.num_shifts},
              {"subspace_dim", cfg.adi.subspace_dim},
              {"res_tol", cfg.adi.res_tol},
              {"max_iter", cfg.adi.max_iter}};
  j["irka"] = {{"conv_tol", cfg.irka.conv_tol}, {"max_iter", cfg.irka.max_iter}, {"ritz_steps", cfg.irka.ritz_steps}};
  j["global_basis"] = {{"rtol", cfg.global_rtol}};
  j["rb"] = {{"estimator", estimator_name(cfg.rb_estimator)}};
  j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir.string();
  j["cache_dir"] = cfg.cache_dir.string();
  return j;
}

Config config_from_json(const Json& j) {
  Config cfg;
  reject_unknown(j, "",
                 {"fom", "experiment", "methods", "orders", "local_order", "varying_block", "one_param", "four_param",
                  "time", "solver", "h2_error", "adi", "irka", "global_basis", "rb", "seed", "threads", "output_dir",
                  "cache_dir"});
  if (j.contains("fom")) {
    const Json& f = j["fom"];
    reject_unknown(f, "fom.", {"blocks_per_side", "grid_points_per_side", "output_mode"});
    read(f, "blocks_per_side", cfg.fom.blocks_per_side);
    read(f, "grid_points_per_side", cfg.fom.grid_points_per_side);
    std::string mode = output_mode_name(cfg.fom.output_mode);
    read(f, "output_mode", mode);
    cfg.fom.output_mode = output_mode_from(mode);
  }
  if (j.contains("experiment")) {
    std::string name;
    read(j, "experiment", name);
    cfg.experiment = experiment_from_string(name);
  }
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names);
    cfg.methods.clear();
    for (const auto& n : names) {
      const Method m = method_from_string(n);
      if (!cfg.uses(m)) cfg.methods.push_back(m);
    }
  }
  read(j, "orders", cfg.orders);
  read(j, "local_order", cfg.local_order);
  read(j, "varying_block", cfg.varying_block);
  if (j.contains("one_param")) read_sampling(j["one_param"], "one_param.", cfg.one_param);
  if (j.contains("four_param")) read_sampling(j["four_param"], "four_param.", cfg.four_param);
  if (j.contains("time")) {
    reject_unknown(j["time"], "time.", {"t_final", "steps"});
    read(j["time"], "t_final", cfg.t_final);
    read(j["time"], "steps", cfg.steps);
  }
  if (j.contains("solver")) {
    std::string s;
    read(j, "solver", s);
    cfg.solver = solver_from(s);
  }
  if (j.contains("h2_error")) {
    const Json& h = j["h2_error"];
    reject_unknown(h, "h2_error.", {"method", "panels_per_decade", "nodes_per_panel"});
    std::string m = h2_method_name(cfg.h2.method);
    read(h, "method", m);
    cfg.h2.method = h2_method_from(m);
    read(h, "panels_per_decade", cfg.h2.panels_per_decade);
    read(h, "nodes_per_panel", cfg.h2.nodes_per_panel);
  }
  if (j.contains("adi")) {
    const Json& a = j["adi"];
    reject_unknown(a, "adi.", {"num_shifts", "subspace_dim", "res_tol", "max_iter"});
    read(a, "num_shifts", cfg.adi.num_shifts);
    read(a, "subspace_dim", cfg.adi.subspace_dim);
    read(a, "res_tol", cfg.adi.res_tol);
    read(a, "max_iter", cfg.adi.max_iter);
  }
  if (j.contains("irka")) {
    const Json& i = j["irka"];
    reject_unknown(i, "irka.", {"conv_tol", "max_iter", "ritz_steps"});
    read(i, "conv_tol", cfg.irka.conv_tol);
    read(i, "max_iter", cfg.irka.max_iter);
    read(i, "ritz_steps", cfg.irka.ritz_steps);
  }
  if (j.contains("global_basis")) {
    reject_unknown(j["global_basis"], "global_basis.", {"rtol"});
    read(j["global_basis"], "rtol", cfg.global_rtol);
  }
  if (j.contains("rb")) {
    reject_unknown(j["rb"], "rb.", {"estimator"});
    std::string e = estimator_name(cfg.rb_estimator);
    read(j["rb"], "estimator", e);
    cfg.rb_estimator = estimator_from(e);
  }
  if (j.contains("seed")) {
    if (j["seed"].is_null()) {
      cfg.seed.reset();
    } else {
      std::uint64_t seed = 0;
      read(j, "seed", seed);
      cfg.seed = seed;
    }
  }
  read(j, "threads", cfg.threads);
  if (j.contains("output_dir")) {
    std::string s;
    read(j, "output_dir", s);
    cfg.output_dir = s;
  }
  if (j.contains("cache_dir")) {
    std::string s;
    read(j, "cache_dir", s);
    cfg.cache_dir = s;
  }
  validate(cfg);
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string default_config_json() { return to_json(Config{}).dump(2) + "\n"; }

}  // namespace mor::experiments
