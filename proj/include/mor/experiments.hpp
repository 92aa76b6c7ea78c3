#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mor/mateq.hpp"
#include "mor/metrics.hpp"
#include "mor/reductors.hpp"
#include "mor/thermalblock.hpp"

namespace mor::experiments {

using Json = nlohmann::ordered_json;

enum class Experiment { kNonParametric, kOneParam, kFourParam, kAll };
enum class Method { kBT, kLQGBT, kIRKA, kOSIRKA, kPOD, kRB };

const char* to_string(Experiment e);
const char* to_string(Method m);
/// Accepts "nonparam", "one-param", "four-param" and "all".
Experiment experiment_from_string(const std::string& name);
Method method_from_string(const std::string& name);

struct SamplingSpec {
  Index training_count = 10;
  Index test_count = 9;
  double exponent_lo = -6.0;
  double exponent_hi = 2.0;
};

/// Everything an experiment run depends on. The JSON form is documented in
/// the README; `default_config_json` prints every key.
struct Config {
  thermalblock::Spec fom;
  Experiment experiment = Experiment::kAll;
  std::vector<Method> methods{Method::kBT, Method::kLQGBT, Method::kIRKA,
                              Method::kOSIRKA, Method::kPOD, Method::kRB};
  std::vector<Index> orders{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  Index local_order = 10;
  Index varying_block = 0;
  /// Training values are log-spaced; test values are geometric midpoints.
  SamplingSpec one_param{10, 9, -6.0, 2.0};
  /// Exponents drawn uniformly from [lo, hi]^d.
  SamplingSpec four_param{20, 20, -6.0, 2.0};
  double t_final = 1.0;
  Index steps = 100;
  SolverKind solver = SolverKind::kDense;
  H2ErrorOptions h2 = [] {
    H2ErrorOptions o;
    o.method = H2ErrorMethod::kFrequency;
    return o;
  }();
  AdiOptions adi;
  IrkaOptions irka;
  double global_rtol = 1e-7;
  GreedyEstimator rb_estimator = GreedyEstimator::kResidual;
  std::optional<std::uint64_t> seed = 42;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "results";
  /// Empty: <output_dir>/cache.
  std::filesystem::path cache_dir;

  bool uses(Method m) const;
  std::filesystem::path resolved_cache_dir() const;
  unsigned resolved_threads() const;
};

/// Throws kInvalidInput on any violated invariant.
void validate(const Config& cfg);

Json to_json(const Config& cfg);
/// Keys absent from `j` keep their defaults; unknown keys are rejected.
Config config_from_json(const Json& j);
Config load_config(const std::filesystem::path& path);
std::string default_config_json();

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header line, then one line per row; "%.15e" (16 significant digits), NaN
/// written as "nan".
std::string format_csv(const Table& table);
void write_text(const std::filesystem::path& path, const std::string& text);

struct SoftCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Galerkin ROM pole checks made while evaluating errors.
struct StabilityTally {
  Index checked = 0;
  Index unstable = 0;
  std::vector<std::string> failures;
};

struct RunResult {
  Experiment experiment = Experiment::kNonParametric;
  std::map<std::string, Table> tables;  // file stem -> table
  Json metadata = Json::object();
  std::vector<SoftCheck> soft_checks;
  std::map<std::string, StabilityTally> stability;  // method -> tally
  std::vector<std::string> failures;
  double wall_seconds = 0.0;
};

using Logger = std::function<void(const std::string&)>;

struct CachedFom {
  LtiModel model;
  std::filesystem::path path;
  std::string checksum;
  bool rebuilt = false;
  std::vector<std::string> warnings;
};

/// Loads the FOM archive for `cfg.fom` (seed-independent name), building and
/// saving it when missing or unreadable.
CachedFom fom_cache(const Config& cfg, bool one_parameter, const Logger& log = {});

RunResult run_nonparametric(const Config& cfg, const Logger& log = {});
RunResult run_one_param(const Config& cfg, const Logger& log = {});
RunResult run_four_param(const Config& cfg, const Logger& log = {});

/// Writes every table as <stem>.csv plus <stem>.meta.json into
/// cfg.output_dir.
void write_outputs(const Config& cfg, const RunResult& result);

/// Training values then test values for the one-parameter study.
std::vector<double> one_param_values(const SamplingSpec& spec);
/// Training rows then test rows, each a parameter vector of length d.
std::vector<Parameter> four_param_values(const SamplingSpec& spec, Index d, std::uint64_t seed);

/// Runs `task(i)` for i in [0, count) on `threads` workers. The first
/// exception is rethrown after all workers finish.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& task);

}  // namespace mor::experiments
