#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fracdiff/harness.hpp"

namespace fracdiff::cli {

enum class Command { Solve, Table, TwoMesh, Growth, Verify };
enum class Format { Csv, Markdown };

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitNumerical = 4;

struct RunConfig {
  Command command = Command::Table;
  std::vector<double> alphas{0.5};
  std::vector<SchemeKind> schemes{SchemeKind::Fitted};
  GradingChoice grading;
  std::vector<int> Ns{64};
  /// Empty means M = N.
  std::vector<int> Ms;
  /// Empty means the problem's own final time.
  std::vector<double> Ts;
  std::optional<ExampleId> example;
  std::string problem_path;
  std::string out_path;
  Format format = Format::Csv;
  unsigned jobs = 1;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  std::vector<int> resolved_Ms() const;
};

/// "1.855E-2": three mantissa decimals, exponent without padding.
std::string format_error(double value);
/// "0.101"
std::string format_rate(double value);

/// "64,128,256" or the doubling range "64..1024".
std::vector<int> parse_n_list(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);
std::vector<SchemeKind> parse_schemes(std::string_view text);

/// Executes a parsed configuration, writing results to `out` (or cfg.out_path)
/// and diagnostics to `err`. Returns one of the kExit* codes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and runs; the whole command-line surface.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracdiff::cli
