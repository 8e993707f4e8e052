#pragma once

#include <span>
#include <vector>

namespace fracdiff {

enum class SchemeKind { Fitted, L1 };

/// Temporal grid t_n = T (n/N)^r, n = 0..N, with steps tau_n = t_n - t_{n-1}.
/// Immutable once built.
class GradedTemporalMesh {
 public:
  /// Throws DomainError unless T > 0, N >= 1 and r >= 1.
  GradedTemporalMesh(double final_time, int intervals, double grading);

  double final_time() const { return final_time_; }
  int intervals() const { return intervals_; }
  double grading() const { return grading_; }

  /// Node times t_0 .. t_N.
  std::span<const double> nodes() const { return nodes_; }
  double t(int n) const { return nodes_[static_cast<std::size_t>(n)]; }
  /// Step tau_n for n = 1..N.
  double tau(int n) const { return steps_[static_cast<std::size_t>(n - 1)]; }
  std::span<const double> steps() const { return steps_; }

  /// ln(t_j / t_n) = r (ln j - ln n) for 1 <= j, n.
  double log_ratio(int j, int n) const;

 private:
  double final_time_;
  int intervals_;
  double grading_;
  std::vector<double> nodes_;
  std::vector<double> steps_;
};

/// Uniform grid x_m = m h on [0, l], h = l/M.
class UniformSpatialGrid {
 public:
  /// Throws DomainError unless l > 0 and M >= 1.
  UniformSpatialGrid(double length, int intervals);

  double length() const { return length_; }
  int intervals() const { return intervals_; }
  double h() const { return h_; }
  std::span<const double> nodes() const { return nodes_; }
  double x(int m) const { return nodes_[static_cast<std::size_t>(m)]; }

 private:
  double length_;
  int intervals_;
  double h_;
  std::vector<double> nodes_;
};

GradedTemporalMesh graded_mesh(double final_time, int intervals, double grading);

/// Grading exponent that balances the temporal error against the initial singularity:
/// max{1, (2-alpha)/(2 alpha)} for the fitted scheme, max{1, (2-alpha)/alpha} for L1.
double optimal_grading(double alpha, SchemeKind kind);

const char* to_string(SchemeKind kind);

}  // namespace fracdiff
