#include "fracdiff/solver.hpp"

#include <cmath>
#include <sstream>

#include "fracdiff/errors.hpp"

namespace fracdiff {

void ProblemSpec::validate(int sample_points) const {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError(name + ": diffusion coefficient must be positive");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError(name + ": domain length must be positive");
  if (!(final_time > 0.0) || !std::isfinite(final_time))
    throw DomainError(name + ": final time must be positive");
  if (!c || !f || !phi) throw DomainError(name + ": c, f and phi must all be provided");
  for (int i = 0; i <= sample_points; ++i) {
    const double x = length * i / sample_points;
    if (!(c(x) >= 0.0)) throw DomainError(name + ": reaction coefficient must be non-negative");
  }
  const double tol = 1e-12 * (1.0 + std::abs(phi(0.5 * length)));
  if (std::abs(phi(0.0) - left(0.0)) > tol || std::abs(phi(length) - right(0.0)) > tol)
    throw DomainError(name + ": initial data incompatible with the boundary data");
}

std::vector<double> discrete_laplacian(std::span<const double> row, double h, double p) {
  if (row.size() < 3) throw DomainError("discrete_laplacian: need at least M = 2 intervals");
  const double s = p / (h * h);
  std::vector<double> out(row.size() - 2);
  for (std::size_t m = 1; m + 1 < row.size(); ++m)
    out[m - 1] = -s * (row[m + 1] - 2.0 * row[m] + row[m - 1]);
  return out;
}

SolutionGrid solve(const ProblemSpec& problem, const UniformSpatialGrid& spatial,
                   std::shared_ptr<const GradedTemporalMesh> temporal, double alpha,
                   SchemeKind kind, const SolveOptions& options) {
  const CaputoWeightTable table = make_weights(std::move(temporal), alpha, kind, options.threads);
  return solve(problem, spatial, table, options);
}

SolutionGrid solve(const ProblemSpec& problem, const UniformSpatialGrid& spatial,
                   const CaputoWeightTable& table, const SolveOptions& options) {
  problem.validate();
  const int M = spatial.intervals();
  const int N = table.levels();
  if (M < 2) throw DomainError("solve: need at least M = 2 spatial intervals");
  if (std::abs(spatial.length() - problem.length) > 1e-14 * problem.length)
    throw DomainError("solve: spatial grid does not match the problem domain");

  const GradedTemporalMesh& tm = table.mesh();
  const auto width = static_cast<std::size_t>(M) + 1;
  const std::size_t interior = width - 2;

  SolutionGrid grid;
  grid.temporal = table.mesh_ptr();
  grid.spatial = spatial;
  grid.alpha = table.alpha();
  grid.kind = table.kind();
  grid.problem = problem.name;
  grid.values.assign(width * (static_cast<std::size_t>(N) + 1), 0.0);
  for (int m = 0; m <= M; ++m) grid.values[static_cast<std::size_t>(m)] = problem.phi(spatial.x(m));

  const double h = spatial.h();
  const double coupling = problem.p / (h * h);
  std::vector<double> reaction(interior);
  for (std::size_t i = 0; i < interior; ++i) reaction[i] = problem.c(spatial.x(static_cast<int>(i + 1)));

  std::vector<double> rhs(interior);
  std::vector<double> cprime(interior);
  std::uint64_t flops = 0;

  for (int n = 1; n <= N; ++n) {
    const double tn = tm.t(n);
    const std::vector<double> theta = nodal_weights(table, n);
    double* un = grid.values.data() + static_cast<std::size_t>(n) * width;

    for (std::size_t i = 0; i < interior; ++i) rhs[i] = 0.0;
    // History: ascending k for every m keeps the sum order fixed.
    for (int k = 0; k < n; ++k) {
      const double w = theta[static_cast<std::size_t>(k)];
      const double* uk = grid.values.data() + static_cast<std::size_t>(k) * width + 1;
      for (std::size_t i = 0; i < interior; ++i) rhs[i] += w * uk[i];
    }
    flops += static_cast<std::uint64_t>(n) * interior;

    for (std::size_t i = 0; i < interior; ++i)
      rhs[i] = problem.f(spatial.x(static_cast<int>(i + 1)), tn) - rhs[i];
    un[0] = problem.left(tn);
    un[M] = problem.right(tn);
    rhs.front() += coupling * un[0];
    rhs.back() += coupling * un[M];

    // Thomas elimination; sub- and super-diagonal are both -coupling.
    const double theta_nn = theta.back();
    double prev_c = 0.0;
    double prev_d = 0.0;
    for (std::size_t i = 0; i < interior; ++i) {
      const double diag = theta_nn + 2.0 * coupling + reaction[i];
      const double pivot = diag + coupling * prev_c;
      if (!(pivot > 0.0)) {
        std::ostringstream msg;
        msg << "solve: non-positive pivot " << pivot << " at level n=" << n << ", m=" << i + 1;
        throw NumericalFailure(msg.str());
      }
      cprime[i] = -coupling / pivot;
      prev_d = (rhs[i] + coupling * prev_d) / pivot;
      rhs[i] = prev_d;
      prev_c = cprime[i];
    }
    un[interior] = rhs[interior - 1];
    for (std::size_t i = interior - 1; i-- > 0;) un[i + 1] = rhs[i] - cprime[i] * un[i + 2];
  }

  if (options.stats) {
    options.stats->history_flops += flops;
    options.stats->inc_beta_evaluations += table.inc_beta_evaluations();
  }
  return grid;
}

double max_scaled_residual(const ProblemSpec& problem, const SolutionGrid& grid,
                           const CaputoWeightTable& table) {
  const int M = grid.intervals();
  const int N = grid.levels();
  const double h = grid.spatial.h();
  const double coupling = problem.p / (h * h);
  double worst = 0.0;
  for (int n = 1; n <= N; ++n) {
    const std::vector<double> theta = nodal_weights(table, n);
    for (int m = 1; m < M; ++m) {
      const double x = grid.spatial.x(m);
      double lhs = 0.0;
      double scale = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double term = theta[static_cast<std::size_t>(k)] * grid(k, m);
        lhs += term;
        scale += std::abs(term);
      }
      const double lap = coupling * (2.0 * grid(n, m) - grid(n, m + 1) - grid(n, m - 1));
      const double react = problem.c(x) * grid(n, m);
      const double src = problem.f(x, grid.temporal->t(n));
      lhs += lap + react;
      scale += coupling * (2.0 * std::abs(grid(n, m)) + std::abs(grid(n, m + 1)) +
                           std::abs(grid(n, m - 1))) +
               std::abs(react) + std::abs(src);
      if (scale > 0.0) worst = std::max(worst, std::abs(lhs - src) / scale);
    }
  }
  return worst;
}

const char* to_string(MMatrixDefect defect) {
  switch (defect) {
    case MMatrixDefect::DiagonalNotPositive: return "diagonal weight not positive";
    case MMatrixDefect::OffDiagonalNotNegative: return "history weight not negative";
    case MMatrixDefect::NotDiagonallyDominant: return "spatial row not diagonally dominant";
  }
  return "unknown";
}

std::string MMatrixReport::summary() const {
  std::ostringstream out;
  if (pass) {
    out << "M-matrix structure: pass (" << checks << " checks)";
  } else {
    out << "M-matrix structure: FAIL, " << violations << " of " << checks << " checks violated";
    if (first_violation) {
      out << "; first at n=" << first_violation->n << ", index=" << first_violation->index << " ("
          << to_string(first_violation->defect) << ", value " << first_violation->value << ")";
    }
  }
  return out.str();
}

MMatrixReport verify_m_matrix(const CaputoWeightTable& table, const UniformSpatialGrid& spatial,
                              const SpaceFn& c, double p) {
  MMatrixReport report;
  auto record = [&](bool ok, MMatrixDefect defect, int n, int index, double value) {
    ++report.checks;
    if (ok) return;
    ++report.violations;
    report.pass = false;
    if (!report.first_violation) report.first_violation = MMatrixViolation{defect, n, index, value};
  };
  const double coupling = p / (spatial.h() * spatial.h());
  for (int n = 1; n <= table.levels(); ++n) {
    const std::vector<double> theta = nodal_weights(table, n);
    const double diag = theta.back();
    record(diag > 0.0, MMatrixDefect::DiagonalNotPositive, n, n, diag);
    for (int k = 0; k < n; ++k) {
      const double v = theta[static_cast<std::size_t>(k)];
      record(v < 0.0, MMatrixDefect::OffDiagonalNotNegative, n, k, v);
    }
    for (int m = 1; m < spatial.intervals(); ++m) {
      const double cm = c ? c(spatial.x(m)) : 0.0;
      const double row_diag = diag + 2.0 * coupling + cm;
      const double excess = row_diag - 2.0 * coupling;
      record(excess > 0.0 && cm >= 0.0, MMatrixDefect::NotDiagonallyDominant, n, m, excess);
    }
  }
  return report;
}

MMatrixReport verify_m_matrix(const UniformSpatialGrid& spatial,
                              std::shared_ptr<const GradedTemporalMesh> temporal, double alpha,
                              SchemeKind kind, const SpaceFn& c, double p) {
  const CaputoWeightTable table = make_weights(std::move(temporal), alpha, kind);
  return verify_m_matrix(table, spatial, c, p);
}

}  // namespace fracdiff
