#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace l2ext {

/// Exit codes of `l2ext`.
enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitCertFailure = 2, kExitCritical = 3 };

struct RunConfig {
  std::string subcommand;

  // Denominator: a family, or an expression with parameters.
  std::string family;
  std::string g_expr;
  std::vector<std::string> params;  // "k=v"
  double s = 0.5;
  int N = 3;

  /// Empty means auto: the default δ grid plus optimizer refinement.
  std::optional<double> delta;

  std::string kappa = "0";
  std::string R = "zero";
  bool ohsawa = false;
  std::vector<double> gammas{1.05, 1.2, 1.5, 2.0};
  std::vector<double> eps{0.01, 0.05, 0.1};
  int grid = 32;
  int degree = 4;
  std::vector<std::vector<double>> f_list;
  std::string objective = "generic";
  std::size_t points = 200;
  double xmax = 100.0;

  double quad_tol = 1e-10;
  double cert_tol = 1e-6;

  std::string format = "csv";
  std::string out;
  int jobs = 1;
};

/// Parses argv into `cfg`. Returns an exit code when the process should stop
/// right away (help, or a usage error already reported to `err`).
std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& cfg, std::ostream& out,
                              std::ostream& err);

/// Runs one subcommand, writing the report to cfg.out (or `out`) and a one-line
/// summary to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace l2ext
