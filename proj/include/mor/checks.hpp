#pragma once

#include <string>
#include <vector>

#include "mor/experiments.hpp"

/// Numbered acceptance checks shared by `mor selftest` and the acceptance
/// binary. Each returns a verdict with a one-line detail; none throws.
namespace mor::checks {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool soft = false;
  std::string detail;
  double seconds = 0.0;
};

/// Poles of the BT ROMs built by bt_bound, for the stability check.
struct BtSweep {
  Index roms = 0;
  Index unstable = 0;
  std::string detail;
};

CheckResult lyapunov_oracle();
CheckResult adi_equivalence();
CheckResult riccati_scalar();
CheckResult h2_quadrature();
CheckResult bt_bound(BtSweep* sweep = nullptr);
/// BT poles from the sweep plus every Galerkin ROM in `runs`. Without runs,
/// POD and OS-IRKA on the default block and global bases on a small
/// four-parameter sample are checked directly.
CheckResult stability(const BtSweep& sweep, const std::vector<const experiments::RunResult*>& runs);
CheckResult irka_certificate();
CheckResult greedy_degeneracy();
CheckResult nonparam_shape(const experiments::RunResult& nonparam);
CheckResult parametric_shape(const experiments::RunResult& one_param, const experiments::RunResult& four_param);
/// Runs reduced nonparam and four-param configs twice each with different
/// thread counts and compares the CSV bytes.
CheckResult determinism(const std::filesystem::path& scratch);
CheckResult runtime(double seconds, double limit_seconds);

/// Checks 1 to 8.
std::vector<CheckResult> oracle_suite();

/// "[PASS] 3 name: detail (1.2 s)".
std::string format_line(const CheckResult& r);

}  // namespace mor::checks
