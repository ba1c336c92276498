#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace omfisher {

struct CheckResult {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool informational = false;  // printed, never affects the exit status
  std::string detail;
};

struct ValidateOptions {
  std::vector<std::string> only;  // empty: every suite
  double tolerance_scale = 1.0;   // 0 turns every check into a failure
};

struct ValidateReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

// kernels, lyapunov, transient, output, qfi, cfi, factor2
std::vector<std::string> validate_suites();

// Runs the oracle suite on the reference parameter set. Unknown suite
// names raise ConfigError.
ValidateReport run_validation(const ValidateOptions& opt = {});

void print_report(std::ostream& out, const ValidateReport& report);

}  // namespace omfisher
