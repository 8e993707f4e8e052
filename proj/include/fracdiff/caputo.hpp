#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fracdiff/mesh.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff {

/// History weights of a discrete Caputo operator on a graded mesh.
///
/// The operator at level n is written in difference form
///
///     D_N u^n = sum_{k=0}^{n-1} d[n][k] (u^{k+1} - u^k),
///
/// and equivalently in nodal form D_N u^n = sum_{k=0}^{n} Theta[n][k] u^k with
/// Theta[n][n] = d[n][n-1], Theta[n][j] = d[n][j-1] - d[n][j] and Theta[n][0] = -d[n][0].
/// The table is immutable and owns a shared reference to its mesh.
class CaputoWeightTable {
 public:
  /// Wraps precomputed rows; rows[n-1] must hold d[n][0..n-1] for n = 1..N. `theta`, if
  /// given, holds Theta[n][0..n] per level; otherwise the nodal form is differenced from d.
  CaputoWeightTable(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha, SchemeKind kind,
                    std::vector<std::vector<double>> rows, std::uint64_t inc_beta_evaluations = 0,
                    std::vector<std::vector<double>> theta = {});

  double alpha() const { return alpha_; }
  SchemeKind kind() const { return kind_; }
  const GradedTemporalMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const GradedTemporalMesh> mesh_ptr() const { return mesh_; }
  int levels() const { return mesh_->intervals(); }

  /// d[n][0..n-1], 1 <= n <= N.
  std::span<const double> row(int n) const;

  /// Stored Theta[n][0..n], or an empty span when none was supplied.
  std::span<const double> theta_row(int n) const;

  /// Incomplete-Beta evaluations spent building the table (zero for L1).
  std::uint64_t inc_beta_evaluations() const { return inc_beta_evaluations_; }

 private:
  std::shared_ptr<const GradedTemporalMesh> mesh_;
  double alpha_;
  SchemeKind kind_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::vector<double>> theta_;
  std::uint64_t inc_beta_evaluations_;
};

/// Weights of the fitted operator, exact on the functions 1 and t^alpha:
///   d[n][k] = alpha/Gamma(1-alpha) * [B(t_{k+1}/t_n) - B(t_k/t_n)] / (t_{k+1}^alpha - t_k^alpha)
/// with B(.) = B(.; alpha, 1-alpha). Rows are built in parallel when `threads` > 1.
CaputoWeightTable fitted_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha,
                                 const SpecFunConfig& cfg = {}, unsigned threads = 1);

/// Weights of the classical L1 operator, exact on piecewise-linear histories:
///   d[n][k] = [(t_n-t_k)^{1-alpha} - (t_n-t_{k+1})^{1-alpha}] / (Gamma(2-alpha) tau_{k+1}).
CaputoWeightTable l1_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha);

CaputoWeightTable make_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha,
                               SchemeKind kind, unsigned threads = 1);

/// D_N u^n for a single spatial point; history holds u^0..u^n.
double apply(const CaputoWeightTable& table, std::span<const double> history, int n);

/// Theta[n][0..n].
std::vector<double> nodal_weights(const CaputoWeightTable& table, int n);

}  // namespace fracdiff
