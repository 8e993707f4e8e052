#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracdiff/caputo.hpp"
#include "fracdiff/mesh.hpp"

namespace fracdiff {

using SpaceFn = std::function<double(double x)>;
using TimeFn = std::function<double(double t)>;
using SpaceTimeFn = std::function<double(double x, double t)>;

/// D_t^alpha u - p u_xx + c(x) u = f(x, t) on (0, l) x (0, T], u(x, 0) = phi(x),
/// u(0, t) = g_left(t), u(l, t) = g_right(t). Empty boundary functions mean zero data.
struct ProblemSpec {
  std::string name;
  double p = 1.0;
  SpaceFn c;
  SpaceTimeFn f;
  SpaceFn phi;
  double length = 1.0;
  double final_time = 1.0;
  /// Exact solution when known; empty otherwise.
  SpaceTimeFn exact;
  TimeFn left_boundary;
  TimeFn right_boundary;

  double left(double t) const { return left_boundary ? left_boundary(t) : 0.0; }
  double right(double t) const { return right_boundary ? right_boundary(t) : 0.0; }

  /// Checks p > 0, finite l and T, that c, f and phi are set, c >= 0 at `sample_points`
  /// spread over [0, l], and phi(0), phi(l) matching the boundary data at t = 0.
  void validate(int sample_points = 65) const;
};

/// Nodal values u^n_m on an (N+1) x (M+1) grid, stored level by level.
struct SolutionGrid {
  std::shared_ptr<const GradedTemporalMesh> temporal;
  UniformSpatialGrid spatial{1.0, 1};
  double alpha = 0.5;
  SchemeKind kind = SchemeKind::Fitted;
  std::string problem;
  std::vector<double> values;

  int levels() const { return temporal->intervals(); }
  int intervals() const { return spatial.intervals(); }
  double operator()(int n, int m) const {
    return values[static_cast<std::size_t>(n) * static_cast<std::size_t>(intervals() + 1) +
                  static_cast<std::size_t>(m)];
  }
  std::span<const double> level(int n) const {
    const auto w = static_cast<std::size_t>(intervals() + 1);
    return std::span<const double>(values).subspan(static_cast<std::size_t>(n) * w, w);
  }
};

/// -p (u_{m+1} - 2u_m + u_{m-1}) / h^2 at the interior points m = 1..M-1.
std::vector<double> discrete_laplacian(std::span<const double> row, double h, double p);

struct SolveStats {
  /// Multiply-adds spent on the history sums sum_{k<n} Theta_nk u^k_m.
  std::uint64_t history_flops = 0;
  std::uint64_t inc_beta_evaluations = 0;
};

struct SolveOptions {
  /// Worker threads for the weight table rows.
  unsigned threads = 1;
  SolveStats* stats = nullptr;
};

/// Marches the discrete problem level by level; each level is a tridiagonal solve
///   (Theta_nn + 2p/h^2 + c_m) u^n_m - p/h^2 (u^n_{m+1} + u^n_{m-1})
///       = f(x_m, t_n) - sum_{k<n} Theta_nk u^k_m.
/// Throws NumericalFailure on a non-positive pivot.
SolutionGrid solve(const ProblemSpec& problem, const UniformSpatialGrid& spatial,
                   std::shared_ptr<const GradedTemporalMesh> temporal, double alpha,
                   SchemeKind kind, const SolveOptions& options = {});

/// Same, with a prebuilt weight table (its mesh is the temporal mesh).
SolutionGrid solve(const ProblemSpec& problem, const UniformSpatialGrid& spatial,
                   const CaputoWeightTable& table, const SolveOptions& options = {});

/// Largest |L u - f| over interior nodes, each divided by the sum of the magnitudes
/// of the terms entering that row.
double max_scaled_residual(const ProblemSpec& problem, const SolutionGrid& grid,
                           const CaputoWeightTable& table);

enum class MMatrixDefect { DiagonalNotPositive, OffDiagonalNotNegative, NotDiagonallyDominant };

struct MMatrixViolation {
  MMatrixDefect defect;
  int n;      // time level
  int index;  // history index k for weight defects, spatial index m for dominance defects
  double value;
};

struct MMatrixReport {
  bool pass = true;
  std::optional<MMatrixViolation> first_violation;
  std::size_t violations = 0;
  std::size_t checks = 0;

  std::string summary() const;
};

/// Checks the sign structure behind the discrete maximum principle at every level:
/// Theta_nn > 0, Theta_nk < 0 for k < n, and strict diagonal dominance of each
/// spatial row (Theta_nn + c(x_m) > 0).
MMatrixReport verify_m_matrix(const CaputoWeightTable& table, const UniformSpatialGrid& spatial,
                              const SpaceFn& c, double p = 1.0);

MMatrixReport verify_m_matrix(const UniformSpatialGrid& spatial,
                              std::shared_ptr<const GradedTemporalMesh> temporal, double alpha,
                              SchemeKind kind, const SpaceFn& c, double p = 1.0);

const char* to_string(MMatrixDefect defect);

}  // namespace fracdiff
