#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracdiff/problems.hpp"
#include "fracdiff/solver.hpp"

namespace fracdiff {

enum class MetricKind { ExactError, TwoMesh };
enum class Regularity { Typical, Smooth };

/// Errors (or two-mesh differences) below this are treated as rounding noise.
inline constexpr double kRateFloor = 1e-13;

/// One (N, M) cell of a convergence table.
struct ErrorSample {
  int N = 0;
  int M = 0;
  double value = 0.0;
};

/// An observed rate; empty when both neighbouring errors sit below kRateFloor.
using Rate = std::optional<double>;

struct ConvergenceReport {
  std::string problem;
  SchemeKind kind = SchemeKind::Fitted;
  double alpha = 0.5;
  double grading = 1.0;
  double final_time = 1.0;
  MetricKind metric = MetricKind::ExactError;
  double toc = 0.0;
  std::vector<ErrorSample> cells;
  /// rates[i] = log2(cells[i].value / cells[i+1].value)
  std::vector<Rate> rates;
};

/// max |u(x_m, t_n) - u^n_m| over all nodes, including t = 0 and the boundary.
double max_nodal_error(const SolutionGrid& grid, const SpaceTimeFn& exact);

/// max |u^n_m - z^{2n}_{2m}| between a solution and its solution on the doubled mesh.
double two_mesh_difference(const SolutionGrid& coarse, const SolutionGrid& fine);

/// log2 ratios of consecutive errors; the sequence is assumed to double N and M.
std::vector<Rate> observed_rates(std::span<const double> errors);
/// Same, checking that consecutive samples double both N and M.
std::vector<Rate> observed_rates(std::span<const ErrorSample> samples);

/// log10(E_{T=10} / E_{T=1}).
double growth_rate(double error_t10, double error_t1);

/// min{2-alpha, 2 r alpha} for the fitted scheme, min{2-alpha, r alpha} for L1, and
/// 2-alpha for either scheme when the solution is smooth.
double theoretical_order(double alpha, double grading, SchemeKind kind,
                         Regularity regularity = Regularity::Typical);

/// How the grading exponent of an experiment is chosen.
struct GradingChoice {
  enum class Mode { Numeric, Optimal, Uniform };
  Mode mode = Mode::Uniform;
  double value = 1.0;

  double resolve(double alpha, SchemeKind kind) const;
  std::string label() const;
  /// "optimal", "uniform" or a number >= 1. Throws ConfigError.
  static GradingChoice parse(std::string_view text);
};

/// A convergence experiment over a doubling (N, M) chain.
struct Experiment {
  /// Builds the problem for a given (alpha, T).
  std::function<ProblemSpec(double alpha, double final_time)> problem;
  Regularity regularity = Regularity::Typical;
  SchemeKind kind = SchemeKind::Fitted;
  double alpha = 0.5;
  GradingChoice grading;
  std::vector<int> Ns;
  std::vector<int> Ms;
  double final_time = 1.0;
  /// Independent cells run on up to this many threads; assembly order is fixed.
  unsigned jobs = 1;
};

/// Exact-error table when the problem has an exact solution, two-mesh table otherwise.
ConvergenceReport run_convergence(const Experiment& experiment);
ConvergenceReport run_exact_error(const Experiment& experiment);
ConvergenceReport run_two_mesh(const Experiment& experiment);

Experiment example_experiment(ExampleId id, SchemeKind kind, double alpha, GradingChoice grading,
                              std::vector<int> Ns, std::vector<int> Ms, double final_time);

/// Growth rates cell by cell from the same chain run at T = 1 and T = 10.
std::vector<double> growth_rates(const ConvergenceReport& t10, const ConvergenceReport& t1);

const char* to_string(MetricKind metric);

}  // namespace fracdiff
