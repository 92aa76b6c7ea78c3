#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "mor/archive.hpp"
#include "mor/errors.hpp"
#include "mor/experiments.hpp"

namespace mor::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const Logger& log, const std::string& line) {
  if (log) log(line);
}

/// Collects NaN-and-continue failures from worker tasks; emitted in a fixed
/// order once the workers are done.
struct Outcome {
  double value = kNaN;
  std::string failure;
  bool unstable = false;
  std::vector<std::string> notes;
};

void absorb(RunResult& res, const Logger& log, const std::string& method, const std::string& where,
            const Outcome& o) {
  for (const auto& n : o.notes) {
    std::string line = method + " " + where + ": " + n;
    res.metadata["notes"].push_back(line);
  }
  StabilityTally& tally = res.stability[method];
  if (o.failure.empty() || o.unstable) tally.checked += 1;
  if (o.unstable) {
    tally.unstable += 1;
    tally.failures.push_back(where);
  }
  if (!o.failure.empty()) {
    std::string line = method + " " + where + ": " + o.failure;
    res.failures.push_back(line);
    emit(log, "failure: " + line);
  }
}

template <class F>
void guarded(Outcome& o, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    o.value = kNaN;
    o.failure = e.what();
    o.unstable = e.code() == ErrorCode::kUnstable;
  } catch (const std::exception& e) {
    o.value = kNaN;
    o.failure = e.what();
  }
}

Outcome evaluate(const H2ErrorEvaluator* evaluator, const LtiModel* rom) {
  Outcome o;
  if (evaluator == nullptr || rom == nullptr) {
    o.failure = "skipped: prerequisite step failed";
    return o;
  }
  guarded(o, [&] { o.value = evaluator->error(*rom).value; });
  return o;
}

std::string describe_mu(const Parameter& mu) {
  std::ostringstream s;
  s.precision(6);
  s << "mu=(";
  for (Index i = 0; i < mu.size(); ++i) s << (i ? "," : "") << mu[i];
  s << ")";
  return s.str();
}

H2ErrorOptions h2_options(const Config& cfg) {
  H2ErrorOptions o = cfg.h2;
  o.solver = cfg.solver;
  o.adi = cfg.adi;
  return o;
}

double count_fraction(Index hits, Index total) {
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string archive_name(const Config& cfg, bool one_parameter) {
  const auto& f = cfg.fom;
  std::string name = one_parameter ? "thermalblock1p" : "thermalblock";
  name += "_k" + std::to_string(f.blocks_per_side) + "_g" + std::to_string(f.grid_points_per_side);
  if (one_parameter) name += "_b" + std::to_string(cfg.varying_block);
  name += f.output_mode == thermalblock::OutputMode::kBlockAverages ? "_blockavg" : "_domainavg";
  return name + ".mor";
}

std::map<std::string, std::string> archive_metadata(const Config& cfg, bool one_parameter) {
  return {{"kind", one_parameter ? "thermalblock-one-parameter" : "thermalblock"},
          {"blocks_per_side", std::to_string(cfg.fom.blocks_per_side)},
          {"grid_points_per_side", std::to_string(cfg.fom.grid_points_per_side)},
          {"varying_block", one_parameter ? std::to_string(cfg.varying_block) : "-"},
          {"output_mode",
           cfg.fom.output_mode == thermalblock::OutputMode::kBlockAverages ? "block_averages" : "domain_average"}};
}

Json fom_json(const CachedFom& fom) {
  return Json{{"archive", fom.path.string()},
              {"checksum", fom.checksum},
              {"order", fom.model.order()},
              {"inputs", fom.model.num_inputs()},
              {"outputs", fom.model.num_outputs()},
              {"parameters", fom.model.num_parameters()}};
}

const char* kOneParamStructure =
    "k=2 thermal block with A(mu) = A_bg + mu * A_var; A_var is the stencil term of the varying block, A_bg the other "
    "blocks at unit conductivity";

// --- parametric studies --------------------------------------------------------

struct PointResult {
  std::optional<H2ErrorEvaluator> evaluator;
  Outcome norm;
  std::optional<BasisPair> bt_basis;
  std::optional<BasisPair> os_basis;
  Outcome bt_local;
  Outcome os_local;
  Outcome bt_global;
  Outcome os_global;
  Outcome bt_matched;
  Outcome rb;
};

struct GlobalModels {
  std::optional<LtiModel> bt_global;
  std::optional<LtiModel> os_global;
  std::optional<LtiModel> bt_matched;
  std::optional<LtiModel> rb;
  Json orders = Json::object();
};

void local_phase(const Config& cfg, const LtiModel& fom, const Parameter& mu, PointResult& p) {
  guarded(p.norm, [&] {
    p.evaluator.emplace(fom, mu, h2_options(cfg));
    p.norm.value = p.evaluator->fom_norm().value;
  });
  if (!p.evaluator) {
    p.bt_local = p.norm;
    p.os_local = p.norm;
    return;
  }
  if (cfg.uses(Method::kBT)) {
    guarded(p.bt_local, [&] {
      ReductionResult r = balanced_truncation(fom, mu, cfg.local_order, bt_factors(fom, mu, cfg.solver, cfg.adi));
      p.bt_local.notes = r.diagnostics.notes;
      p.bt_local.value = p.evaluator->error(r.rom).value;
      p.bt_basis = std::move(r.basis);
    });
  }
  if (cfg.uses(Method::kOSIRKA)) {
    guarded(p.os_local, [&] {
      ReductionResult r = os_irka(fom, mu, cfg.local_order, cfg.irka);
      p.os_local.notes = r.diagnostics.notes;
      p.os_local.value = p.evaluator->error(r.rom).value;
      p.os_basis = std::move(r.basis);
    });
  }
}

std::vector<BasisPair> training_bases(const std::vector<PointResult>& points, Index n_train, bool bt) {
  std::vector<BasisPair> out;
  for (Index i = 0; i < n_train; ++i) {
    const auto& basis = bt ? points[i].bt_basis : points[i].os_basis;
    if (basis) out.push_back(*basis);
  }
  return out;
}

GlobalModels global_phase(const Config& cfg, const LtiModel& fom, const std::vector<Parameter>& params,
                          const std::vector<PointResult>& points, Index n_train, RunResult& res,
                          const Logger& log) {
  GlobalModels g;
  const InnerProduct& m = fom.energy_product();
  const Index n = fom.order();
  auto attempt = [&](const std::string& what, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      const std::string line = what + ": " + e.what();
      res.failures.push_back(line);
      emit(log, "failure: " + line);
    }
  };

  const std::vector<BasisPair> bt_locals = training_bases(points, n_train, true);
  const std::vector<BasisPair> os_locals = training_bases(points, n_train, false);
  std::optional<Index> matched;
  if (cfg.uses(Method::kOSIRKA)) {
    attempt("OSIRKA global basis", [&] {
      const BasisPair basis = global_basis(os_locals, m, cfg.global_rtol, n);
      g.orders["OSIRKA_global"] = basis.order();
      g.orders["OSIRKA_locals_used"] = os_locals.size();
      matched = basis.order();
      g.os_global.emplace(project(fom, basis));
    });
  }
  if (cfg.uses(Method::kBT)) {
    attempt("BT global basis", [&] {
      const BasisPair basis = global_basis(bt_locals, m, cfg.global_rtol, n);
      g.orders["BT_global"] = basis.order();
      g.orders["BT_locals_used"] = bt_locals.size();
      if (!matched) matched = basis.order();
      g.bt_global.emplace(project(fom, basis));
    });
    if (matched) {
      attempt("BT matched basis", [&] {
        const BasisPair basis = global_basis(bt_locals, m, cfg.global_rtol, *matched);
        g.orders["BT_matched"] = basis.order();
        g.bt_matched.emplace(project(fom, basis));
      });
    }
  }
  if (matched) g.orders["matched"] = *matched;
  if (cfg.uses(Method::kRB)) {
    attempt("RB greedy", [&] {
      GreedyOptions options;
      options.modes_per_iter = 1;
      options.max_basis = matched.value_or(cfg.local_order);
      options.target = 0.0;
      options.estimator = cfg.rb_estimator;
      options.record_bases = false;
      const std::vector<Parameter> training(params.begin(), params.begin() + n_train);
      GreedyResult r = pod_greedy(fom, training, StepInput{1.0}, cfg.t_final, cfg.steps, options);
      g.orders["RB"] = r.result.basis.order();
      Json selected = Json::array();
      for (Index s : r.trace.selected) selected.push_back(s + 1);
      res.metadata["rb_selected_training_indices"] = selected;
      for (const auto& note : r.result.diagnostics.notes) res.metadata["notes"].push_back("RB: " + note);
      g.rb.emplace(std::move(r.result.rom));
    });
  }
  return g;
}

std::vector<std::string> parameter_columns(Index d) {
  if (d == 1) return {"mu"};
  std::vector<std::string> cols;
  for (Index i = 0; i < d; ++i) cols.push_back("mu_" + std::to_string(i + 1));
  return cols;
}

RunResult run_parametric(const Config& cfg, Experiment which, const CachedFom& cached,
                         const std::vector<Parameter>& params, Index n_train, const std::string& prefix,
                         const Logger& log) {
  Stopwatch total;
  RunResult res;
  res.experiment = which;
  res.metadata["fom"] = fom_json(cached);
  res.metadata["notes"] = Json::array();
  res.metadata["training_count"] = n_train;
  res.metadata["test_count"] = static_cast<Index>(params.size()) - n_train;
  const LtiModel& fom = cached.model;
  const Index count = static_cast<Index>(params.size());
  const unsigned threads = cfg.resolved_threads();

  std::vector<PointResult> points(count);
  Stopwatch local_clock;
  emit(log, prefix + ": local reductions at " + std::to_string(count) + " parameters");
  parallel_for(count, threads, [&](Index i) { local_phase(cfg, fom, params[i], points[i]); });
  const double local_seconds = local_clock.seconds();

  Stopwatch global_clock;
  emit(log, prefix + ": global bases");
  GlobalModels g = global_phase(cfg, fom, params, points, n_train, res, log);
  const double global_seconds = global_clock.seconds();
  res.metadata["global_orders"] = g.orders;

  Stopwatch error_clock;
  emit(log, prefix + ": global errors");
  auto ptr = [](const std::optional<LtiModel>& m) { return m ? &*m : nullptr; };
  parallel_for(count, threads, [&](Index i) {
    PointResult& p = points[i];
    const H2ErrorEvaluator* ev = p.evaluator ? &*p.evaluator : nullptr;
    if (cfg.uses(Method::kBT)) {
      p.bt_global = evaluate(ev, ptr(g.bt_global));
      p.bt_matched = evaluate(ev, ptr(g.bt_matched));
    }
    if (cfg.uses(Method::kOSIRKA)) p.os_global = evaluate(ev, ptr(g.os_global));
    if (cfg.uses(Method::kRB)) p.rb = evaluate(ev, ptr(g.rb));
  });
  const double error_seconds = error_clock.seconds();

  const Index d = fom.num_parameters();
  const std::vector<std::string> mu_cols = parameter_columns(d);
  auto head = [&](std::vector<std::string> extra) {
    std::vector<std::string> cols{"index", "training"};
    cols.insert(cols.end(), mu_cols.begin(), mu_cols.end());
    cols.insert(cols.end(), extra.begin(), extra.end());
    return cols;
  };
  auto row_start = [&](Index i) {
    std::vector<double> row{static_cast<double>(i + 1), i < n_train ? 1.0 : 0.0};
    for (Index k = 0; k < d; ++k) row.push_back(params[i][k]);
    return row;
  };

  Table norms{head({"h2_norm"}), {}};
  std::vector<std::string> lg_cols, matched_cols;
  if (cfg.uses(Method::kBT)) lg_cols.insert(lg_cols.end(), {"BT_local", "BT_global"});
  if (cfg.uses(Method::kOSIRKA)) lg_cols.insert(lg_cols.end(), {"OSIRKA_local", "OSIRKA_global"});
  if (cfg.uses(Method::kBT)) matched_cols.push_back("BT");
  if (cfg.uses(Method::kOSIRKA)) matched_cols.push_back("OSIRKA");
  if (cfg.uses(Method::kRB)) matched_cols.push_back("RB");
  Table local_global{head(lg_cols), {}};
  Table matched{head(matched_cols), {}};

  Index improved = 0;
  for (Index i = 0; i < count; ++i) {
    const PointResult& p = points[i];
    const std::string where = "#" + std::to_string(i + 1) + " " + describe_mu(params[i]);
    absorb(res, log, "FOM", where, p.norm);
    std::vector<double> row = row_start(i);
    row.push_back(p.norm.value);
    norms.rows.push_back(row);

    std::vector<double> lg = row_start(i);
    std::vector<double> mt = row_start(i);
    if (cfg.uses(Method::kBT)) {
      absorb(res, log, "BT_local", where, p.bt_local);
      absorb(res, log, "BT_global", where, p.bt_global);
      absorb(res, log, "BT_matched", where, p.bt_matched);
      lg.insert(lg.end(), {p.bt_local.value, p.bt_global.value});
      mt.push_back(p.bt_matched.value);
    }
    if (cfg.uses(Method::kOSIRKA)) {
      absorb(res, log, "OSIRKA_local", where, p.os_local);
      absorb(res, log, "OSIRKA_global", where, p.os_global);
      lg.insert(lg.end(), {p.os_local.value, p.os_global.value});
      mt.push_back(p.os_global.value);
      if (p.os_global.value <= p.os_local.value) ++improved;
    }
    if (cfg.uses(Method::kRB)) {
      absorb(res, log, "RB", where, p.rb);
      mt.push_back(p.rb.value);
    }
    local_global.rows.push_back(std::move(lg));
    matched.rows.push_back(std::move(mt));
  }
  res.tables[prefix + "_norms"] = std::move(norms);
  if (!lg_cols.empty()) res.tables[prefix + "_local_global"] = std::move(local_global);
  if (!matched_cols.empty()) res.tables[prefix + "_matched"] = std::move(matched);

  if (cfg.uses(Method::kOSIRKA)) {
    const double fraction = count_fraction(improved, count);
    SoftCheck c;
    c.name = prefix + ": global OS-IRKA error <= local OS-IRKA error at >= 60% of evaluation points";
    c.passed = fraction >= 0.6;
    c.detail = std::to_string(improved) + " of " + std::to_string(count) + " points";
    res.soft_checks.push_back(c);
    res.metadata["osirka_global_improves_fraction"] = fraction;
  }
  res.wall_seconds = total.seconds();
  res.metadata["wall_seconds"] = {{"local", local_seconds}, {"global", global_seconds}, {"errors", error_seconds},
                                  {"total", res.wall_seconds}};
  return res;
}

}  // namespace

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& task) {
  if (count <= 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<Index>(std::max(1u, threads), count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<Index> next{0};
  auto work = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> one_param_values(const SamplingSpec& spec) {
  const Index n = spec.training_count;
  std::vector<double> exponents(n);
  for (Index i = 0; i < n; ++i) {
    exponents[i] = n == 1 ? spec.exponent_lo
                          : spec.exponent_lo + (spec.exponent_hi - spec.exponent_lo) * static_cast<double>(i) /
                                                   static_cast<double>(n - 1);
  }
  std::vector<double> values;
  for (double e : exponents) values.push_back(std::pow(10.0, e));
  if (spec.test_count > 0) {
    for (Index i = 0; i + 1 < n; ++i) values.push_back(std::pow(10.0, 0.5 * (exponents[i] + exponents[i + 1])));
  }
  return values;
}

std::vector<Parameter> four_param_values(const SamplingSpec& spec, Index d, std::uint64_t seed) {
  // splitmix64 keeps the stream identical across standard libraries.
  std::uint64_t state = seed;
  auto next = [&state] {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  const Index total = spec.training_count + spec.test_count;
  std::vector<Parameter> out;
  out.reserve(total);
  for (Index i = 0; i < total; ++i) {
    DenseVector mu(d);
    for (Index k = 0; k < d; ++k) {
      const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
      mu(k) = std::pow(10.0, spec.exponent_lo + (spec.exponent_hi - spec.exponent_lo) * u);
    }
    out.emplace_back(std::move(mu));
  }
  return out;
}

CachedFom fom_cache(const Config& cfg, bool one_parameter, const Logger& log) {
  const std::filesystem::path path = cfg.resolved_cache_dir() / archive_name(cfg, one_parameter);
  const auto expected = archive_metadata(cfg, one_parameter);
  std::vector<std::string> warnings;
  if (std::filesystem::exists(path)) {
    try {
      ArchivedModel a = load_model(path);
      if (a.metadata == expected) {
        return CachedFom{std::move(a.model), path, std::move(a.checksum), false, {}};
      }
      warnings.push_back("archive " + path.string() + " describes a different model; rebuilding");
    } catch (const Error& e) {
      warnings.push_back("archive " + path.string() + " unusable (" + e.what() + "); rebuilding");
    }
    for (const auto& w : warnings) emit(log, "warning: " + w);
  }
  const LtiModel built = one_parameter ? thermalblock::build_one_parameter(cfg.fom, cfg.varying_block)
                                       : thermalblock::build(cfg.fom);
  std::filesystem::create_directories(path.parent_path());
  save_model(path, built, expected);
  // Reload so a fresh build and a cached run see the same operators.
  ArchivedModel a = load_model(path);
  return CachedFom{std::move(a.model), path, std::move(a.checksum), true, std::move(warnings)};
}

RunResult run_nonparametric(const Config& cfg, const Logger& log) {
  validate(cfg);
  Stopwatch total;
  RunResult res;
  res.experiment = Experiment::kNonParametric;
  res.metadata["notes"] = Json::array();
  const CachedFom cached = fom_cache(cfg, false, log);
  for (const auto& w : cached.warnings) res.metadata["notes"].push_back(w);
  const LtiModel& fom = cached.model;
  const Parameter mu = Parameter::ones(fom.num_parameters());
  res.metadata["fom"] = fom_json(cached);
  res.metadata["mu"] = std::vector<double>(mu.values.data(), mu.values.data() + mu.size());

  std::vector<Method> methods;
  for (Method m : {Method::kBT, Method::kLQGBT, Method::kIRKA, Method::kOSIRKA, Method::kPOD}) {
    if (cfg.uses(m)) methods.push_back(m);
  }
  const unsigned threads = cfg.resolved_threads();

  std::optional<H2ErrorEvaluator> evaluator;
  std::optional<BalancingFactors> bt_f;
  std::optional<BalancingFactors> lqg_f;
  std::vector<Outcome> setup(3);
  Stopwatch setup_clock;
  emit(log, "nonparam: Gramians and FOM samples");
  parallel_for(3, threads, [&](Index t) {
    guarded(setup[t], [&] {
      if (t == 0) evaluator.emplace(fom, mu, h2_options(cfg));
      if (t == 1 && cfg.uses(Method::kBT)) bt_f = bt_factors(fom, mu, cfg.solver, cfg.adi);
      if (t == 2 && cfg.uses(Method::kLQGBT)) lqg_f = lqgbt_factors(fom, mu);
    });
  });
  if (!evaluator) throw Error(ErrorCode::kInternalConsistency, "nonparam: FOM H2 data failed: " + setup[0].failure);
  const double setup_seconds = setup_clock.seconds();
  res.metadata["fom_h2_norm"] = evaluator->fom_norm().value;

  const Index n_orders = static_cast<Index>(cfg.orders.size());
  const Index n_methods = static_cast<Index>(methods.size());
  std::vector<Outcome> cells(n_orders * n_methods);
  std::vector<double> hsv;
  Stopwatch reduce_clock;
  emit(log, "nonparam: " + std::to_string(cells.size()) + " reductions");
  parallel_for(static_cast<Index>(cells.size()), threads, [&](Index task) {
    const Method method = methods[task / n_orders];
    const Index r = cfg.orders[task % n_orders];
    Outcome& o = cells[task];
    guarded(o, [&] {
      std::optional<ReductionResult> red;
      switch (method) {
        case Method::kBT:
          if (!bt_f) throw Error(ErrorCode::kDegenerateGramian, "BT factors unavailable: " + setup[1].failure);
          red.emplace(balanced_truncation(fom, mu, r, *bt_f));
          break;
        case Method::kLQGBT:
          if (!lqg_f) throw Error(ErrorCode::kDegenerateGramian, "LQGBT factors unavailable: " + setup[2].failure);
          red.emplace(balanced_truncation(fom, mu, r, *lqg_f));
          break;
        case Method::kIRKA: red.emplace(irka(fom, mu, r, cfg.irka)); break;
        case Method::kOSIRKA: red.emplace(os_irka(fom, mu, r, cfg.irka)); break;
        case Method::kPOD: red.emplace(pod_reduce(fom, mu, StepInput{1.0}, cfg.t_final, cfg.steps, r)); break;
        case Method::kRB: break;
      }
      o.notes = red->diagnostics.notes;
      o.value = evaluator->error(red->rom).value;
    });
  });
  const double reduce_seconds = reduce_clock.seconds();

  Table table;
  table.columns.push_back("order");
  for (Method m : methods) table.columns.push_back(to_string(m));
  for (Index k = 0; k < n_orders; ++k) {
    std::vector<double> row{static_cast<double>(cfg.orders[k])};
    for (Index j = 0; j < n_methods; ++j) {
      const Outcome& o = cells[j * n_orders + k];
      absorb(res, log, to_string(methods[j]), "r=" + std::to_string(cfg.orders[k]), o);
      row.push_back(o.value);
    }
    table.rows.push_back(std::move(row));
  }
  res.tables["zero_param_all"] = table;

  if (bt_f) {
    const DenseMatrix coupling = bt_f->zq.transpose() * fom.e().apply<double>(bt_f->zp);
    const DenseVector sigma = Eigen::JacobiSVD<DenseMatrix>(coupling).singularValues();
    hsv.assign(sigma.data(), sigma.data() + sigma.size());
    Table hsv_table{{"index", "hsv", "bt_bound"}, {}};
    for (std::size_t k = 0; k < hsv.size(); ++k) {
      hsv_table.rows.push_back({static_cast<double>(k + 1), hsv[k], bt_error_bound(hsv, static_cast<Index>(k + 1))});
    }
    res.tables["zero_param_hsv"] = std::move(hsv_table);
  }

  auto column = [&](Method m) -> std::optional<Index> {
    const auto it = std::find(methods.begin(), methods.end(), m);
    if (it == methods.end()) return std::nullopt;
    return static_cast<Index>(it - methods.begin());
  };
  const auto at10 = std::find(cfg.orders.begin(), cfg.orders.end(), Index{10});
  const auto bt_col = column(Method::kBT);
  if (at10 != cfg.orders.end()) {
    const Index k = at10 - cfg.orders.begin();
    auto value = [&](Index col) { return cells[col * n_orders + k].value; };
    const auto lqg_col = column(Method::kLQGBT);
    const auto irka_col = column(Method::kIRKA);
    if (bt_col && lqg_col && irka_col) {
      const double a = value(*bt_col), b = value(*lqg_col), c = value(*irka_col);
      const double hi = std::max({a, b, c}), lo = std::min({a, b, c});
      SoftCheck s;
      s.name = "nonparam: BT, LQGBT and IRKA errors within one order of magnitude at r=10";
      s.passed = std::isfinite(hi) && lo > 0.0 && hi <= 10.0 * lo;
      s.detail = "BT " + format_value(a) + ", LQGBT " + format_value(b) + ", IRKA " + format_value(c);
      res.soft_checks.push_back(s);
    }
    const auto pod_col = column(Method::kPOD);
    if (bt_col && pod_col) {
      SoftCheck s;
      s.name = "nonparam: BT error <= POD error at r=10";
      s.passed = value(*bt_col) <= value(*pod_col);
      s.detail = "BT " + format_value(value(*bt_col)) + ", POD " + format_value(value(*pod_col));
      res.soft_checks.push_back(s);
    }
  }
  if (bt_col && n_orders > 1) {
    SoftCheck s;
    s.name = "nonparam: BT error decreases with order (10% tolerance)";
    s.passed = true;
    for (Index k = 1; k < n_orders; ++k) {
      const double prev = cells[*bt_col * n_orders + k - 1].value;
      const double cur = cells[*bt_col * n_orders + k].value;
      if (!(cur <= 1.1 * prev)) {
        s.passed = false;
        s.detail += "r=" + std::to_string(cfg.orders[k]) + " " + format_value(cur) + " > 1.1 * " +
                    format_value(prev) + "; ";
      }
    }
    res.soft_checks.push_back(s);
  }

  res.wall_seconds = total.seconds();
  res.metadata["wall_seconds"] = {{"setup", setup_seconds}, {"reductions", reduce_seconds},
                                  {"total", res.wall_seconds}};
  return res;
}

RunResult run_one_param(const Config& cfg, const Logger& log) {
  validate(cfg);
  const CachedFom cached = fom_cache(cfg, true, log);
  std::vector<Parameter> params;
  for (double v : one_param_values(cfg.one_param)) params.push_back(Parameter{v});
  RunResult res = run_parametric(cfg, Experiment::kOneParam, cached, params, cfg.one_param.training_count,
                                 "one_param", log);
  res.metadata["one_param_structure"] = kOneParamStructure;
  res.metadata["varying_block"] = cfg.varying_block;
  for (const auto& w : cached.warnings) res.metadata["notes"].push_back(w);
  return res;
}

RunResult run_four_param(const Config& cfg, const Logger& log) {
  validate(cfg);
  if (!cfg.seed) throw Error(ErrorCode::kInvalidInput, "four-param: seed is mandatory");
  const CachedFom cached = fom_cache(cfg, false, log);
  const std::vector<Parameter> params =
      four_param_values(cfg.four_param, cached.model.num_parameters(), *cfg.seed);
  RunResult res = run_parametric(cfg, Experiment::kFourParam, cached, params, cfg.four_param.training_count,
                                 "four_param", log);
  res.metadata["seed"] = *cfg.seed;
  for (const auto& w : cached.warnings) res.metadata["notes"].push_back(w);
  return res;
}

}  // namespace mor::experiments
