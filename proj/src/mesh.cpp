#include "fracdiff/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "fracdiff/errors.hpp"

namespace fracdiff {

GradedTemporalMesh::GradedTemporalMesh(double final_time, int intervals, double grading)
    : final_time_(final_time), intervals_(intervals), grading_(grading) {
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw DomainError("graded_mesh: final time must be positive");
  if (intervals < 1) throw DomainError("graded_mesh: need at least one time interval");
  if (!(grading >= 1.0) || !std::isfinite(grading))
    throw DomainError("graded_mesh: grading exponent must be >= 1");

  const auto n_nodes = static_cast<std::size_t>(intervals) + 1;
  nodes_.resize(n_nodes);
  // (n/N) first, then the power, then the scale: nested meshes then share nodes bitwise.
  for (int n = 0; n < intervals; ++n) {
    const double frac = double(n) / double(intervals);
    nodes_[static_cast<std::size_t>(n)] = final_time * std::pow(frac, grading);
  }
  nodes_.back() = final_time;

  steps_.resize(n_nodes - 1);
  for (std::size_t n = 1; n < n_nodes; ++n) steps_[n - 1] = nodes_[n] - nodes_[n - 1];
}

double GradedTemporalMesh::log_ratio(int j, int n) const {
  return grading_ * (std::log(double(j)) - std::log(double(n)));
}

UniformSpatialGrid::UniformSpatialGrid(double length, int intervals)
    : length_(length), intervals_(intervals) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw DomainError("spatial grid: length must be positive");
  if (intervals < 1) throw DomainError("spatial grid: need at least one interval");
  h_ = length / intervals;
  nodes_.resize(static_cast<std::size_t>(intervals) + 1);
  for (int m = 0; m < intervals; ++m) nodes_[static_cast<std::size_t>(m)] = m * h_;
  nodes_.back() = length;
}

GradedTemporalMesh graded_mesh(double final_time, int intervals, double grading) {
  return GradedTemporalMesh(final_time, intervals, grading);
}

double optimal_grading(double alpha, SchemeKind kind) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("optimal_grading: alpha must lie in (0, 1)");
  const double r = kind == SchemeKind::Fitted ? (2.0 - alpha) / (2.0 * alpha) : (2.0 - alpha) / alpha;
  return std::max(1.0, r);
}

const char* to_string(SchemeKind kind) { return kind == SchemeKind::Fitted ? "fitted" : "l1"; }

}  // namespace fracdiff
