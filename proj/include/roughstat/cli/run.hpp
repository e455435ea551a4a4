#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "roughstat/common.hpp"

namespace roughstat::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kDsl = 3,
  kConfig = 4,
};

/// Flag or usage problem (exit 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string command;
  // program source: exactly one of these for function-sequence commands
  std::string builtin;
  std::string program_path;
  std::string expr;
  std::string set_expr;  // density
  std::string target = "0";
  std::string grid = "0:1:0.1";
  double r = 0.0;
  double eps = 0.01;
  std::string checkpoints = "1000,10000,100000,1000000";
  double zero_tol = 0.01;
  int window = 2;
  double positive_tol = 0.02;
  double delta = 0.01;
  std::string candidates;
  int m_max = 20;
  double eps_classical = 0.01;
  Index k = 1;
  double x = 0.0;
  std::string format = "json";
  std::string out;
  int jobs = 1;
  Index max_index = 10'000'000;
};

/// "start:stop:step" or an explicit comma list; strictly increasing, nonempty.
std::vector<double> expand_grid(const std::string& text);

/// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);

/// argv (without the program name) to a validated RunConfig. Throws UsageError.
/// Returns std::nullopt-like empty command when help was requested.
RunConfig parse_flags(const std::vector<std::string>& args, std::ostream& out);

/// Runs one command; the report goes to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace roughstat::cli
