#include "fracdiff/caputo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("Caputo weights: alpha must lie in (0, 1)");
}

// Builds rows [first, last) with `fill(n, row)` on up to `threads` workers.
template <class Fill>
void build_rows(std::vector<std::vector<double>>& rows, unsigned threads, Fill fill) {
  const int levels = static_cast<int>(rows.size());
  auto work = [&](int worker, int stride) {
    for (int n = levels - worker; n >= 1; n -= stride) fill(n, rows[static_cast<std::size_t>(n - 1)]);
  };
  threads = std::clamp(threads, 1u, static_cast<unsigned>(std::max(levels, 1)));
  if (threads == 1) {
    work(0, 1);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(static_cast<int>(w), static_cast<int>(threads));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Near t = 0 every weight is C (1 + h_k) with C = t_n^-alpha / Gamma(1 - alpha), where h_k is
// the cell average of (1 - x)^-alpha - 1 = sum_m c_m x^m, x = s / t_n. The fitted scheme
// averages in the measure d(x^alpha), L1 in dx. On [a, b] with L = ln(a / b) the m-th moment is
//   w_m b^m expm1(p_m L) / expm1(q L),  fitted: p = m + alpha, q = alpha, w = alpha / (m + alpha)
//                                       L1:     p = m + 1,     q = 1,     w = 1 / (m + 1).
constexpr double kPlateau = 0.25;

double plateau_excess(double alpha, SchemeKind kind, double b, double L) {
  const double q = kind == SchemeKind::Fitted ? alpha : 1.0;
  const double den = std::isinf(L) ? -1.0 : std::expm1(q * L);
  double c = 1.0;
  double bm = 1.0;
  double h = 0.0;
  for (int m = 1; m < 200; ++m) {
    c *= (alpha + m - 1.0) / m;
    bm *= b;
    const double p = kind == SchemeKind::Fitted ? m + alpha : m + 1.0;
    const double w = kind == SchemeKind::Fitted ? alpha / p : 1.0 / p;
    const double num = std::isinf(L) ? -1.0 : std::expm1(p * L);
    const double term = c * w * bm * num / den;
    h += term;
    if (term <= 1e-18 * h) break;
  }
  return h;
}

std::vector<double> nodal_row(const GradedTemporalMesh& tm, double alpha, SchemeKind kind, int n,
                              std::span<const double> d) {
  std::vector<double> theta(static_cast<std::size_t>(n) + 1);
  theta[0] = -d[0];
  for (int j = 1; j < n; ++j)
    theta[static_cast<std::size_t>(j)] = d[static_cast<std::size_t>(j - 1)] - d[static_cast<std::size_t>(j)];
  theta[static_cast<std::size_t>(n)] = d[static_cast<std::size_t>(n - 1)];

  const double C = std::pow(tm.t(n), -alpha) * reciprocal_gamma(1.0 - alpha);
  double h_prev = 0.0;
  for (int k = 0; k + 1 < n && tm.t(k + 1) / tm.t(n) <= kPlateau; ++k) {
    const double L = k == 0 ? -std::numeric_limits<double>::infinity() : tm.log_ratio(k, k + 1);
    const double h = plateau_excess(alpha, kind, tm.t(k + 1) / tm.t(n), L);
    if (k > 0) theta[static_cast<std::size_t>(k)] = C * (h_prev - h);
    h_prev = h;
  }
  return theta;
}

}  // namespace

CaputoWeightTable::CaputoWeightTable(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha,
                                     SchemeKind kind, std::vector<std::vector<double>> rows,
                                     std::uint64_t inc_beta_evaluations,
                                     std::vector<std::vector<double>> theta)
    : mesh_(std::move(mesh)),
      alpha_(alpha),
      kind_(kind),
      rows_(std::move(rows)),
      theta_(std::move(theta)),
      inc_beta_evaluations_(inc_beta_evaluations) {
  if (!mesh_) throw DomainError("CaputoWeightTable: null mesh");
  check_alpha(alpha);
  if (rows_.size() != static_cast<std::size_t>(mesh_->intervals()))
    throw DomainError("CaputoWeightTable: need one row per time level");
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (rows_[i].size() != i + 1) throw DomainError("CaputoWeightTable: row n must hold n entries");
  if (!theta_.empty()) {
    if (theta_.size() != rows_.size()) throw DomainError("CaputoWeightTable: need one Theta row per level");
    for (std::size_t i = 0; i < theta_.size(); ++i)
      if (theta_[i].size() != i + 2) throw DomainError("CaputoWeightTable: Theta row n must hold n + 1 entries");
  }
}

std::span<const double> CaputoWeightTable::theta_row(int n) const {
  if (n < 1 || n > levels()) throw DomainError("CaputoWeightTable: level out of range");
  if (theta_.empty()) return {};
  return theta_[static_cast<std::size_t>(n - 1)];
}

std::span<const double> CaputoWeightTable::row(int n) const {
  if (n < 1 || n > levels()) throw DomainError("CaputoWeightTable: level out of range");
  return rows_[static_cast<std::size_t>(n - 1)];
}

CaputoWeightTable fitted_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha,
                                 const SpecFunConfig& cfg, unsigned threads) {
  check_alpha(alpha);
  cfg.validate();
  const GradedTemporalMesh& tm = *mesh;
  const int levels = tm.intervals();
  const double a = alpha;
  const double b = 1.0 - alpha;
  const double complete = beta_fn(a, b);
  const double scale = alpha * reciprocal_gamma(1.0 - alpha);
  const double r = tm.grading();

  // t_{k+1}^alpha - t_k^alpha, shared by every row.
  std::vector<double> dpow(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) {
    const double hi = std::exp(alpha * std::log(tm.t(k + 1)));
    dpow[static_cast<std::size_t>(k)] =
        k == 0 ? hi : hi * -std::expm1(-alpha * r * std::log1p(1.0 / k));
  }

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(levels));
  std::vector<std::vector<double>> theta(static_cast<std::size_t>(levels));
  build_rows(rows, threads, [&](int n, std::vector<double>& row) {
    row.resize(static_cast<std::size_t>(n));
    // B(t_j/t_n) for j = 0..n in split form; j = 0 and j = n are exact.
    IncBetaSplit prev{false, 0.0};
    for (int k = 0; k < n; ++k) {
      IncBetaSplit next{true, 0.0};
      if (k + 1 < n) {
        const double lz = tm.log_ratio(k + 1, n);
        next = inc_beta_split(lz, std::log(-std::expm1(lz)), a, b, cfg);
      }
      double diff;
      if (!prev.upper && !next.upper) diff = next.value - prev.value;
      else if (prev.upper && next.upper) diff = prev.value - next.value;
      else diff = (complete - next.value) - prev.value;
      row[static_cast<std::size_t>(k)] = scale * diff / dpow[static_cast<std::size_t>(k)];
      prev = next;
    }
    theta[static_cast<std::size_t>(n - 1)] = nodal_row(tm, alpha, SchemeKind::Fitted, n, row);
  });

  const auto evals = static_cast<std::uint64_t>(levels) * static_cast<std::uint64_t>(levels - 1) / 2;
  return CaputoWeightTable(std::move(mesh), alpha, SchemeKind::Fitted, std::move(rows), evals,
                           std::move(theta));
}

CaputoWeightTable l1_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha) {
  check_alpha(alpha);
  const GradedTemporalMesh& tm = *mesh;
  const int levels = tm.intervals();
  const double inv_g = reciprocal_gamma(2.0 - alpha);
  const double e = 1.0 - alpha;

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(levels));
  std::vector<std::vector<double>> theta(static_cast<std::size_t>(levels));
  for (int n = 1; n <= levels; ++n) {
    auto& row = rows[static_cast<std::size_t>(n - 1)];
    row.resize(static_cast<std::size_t>(n));
    const double tn = tm.t(n);
    for (int k = 0; k < n; ++k) {
      const double tau = tm.tau(k + 1);
      const double far = tn - tm.t(k);
      double num;
      if (k + 1 == n) {
        num = std::pow(tau, e);
      } else {
        // far^e - (far - tau)^e without cancellation
        num = -std::pow(far, e) * std::expm1(e * std::log1p(-tau / far));
      }
      row[static_cast<std::size_t>(k)] = num * inv_g / tau;
    }
    theta[static_cast<std::size_t>(n - 1)] = nodal_row(tm, alpha, SchemeKind::L1, n, row);
  }
  return CaputoWeightTable(std::move(mesh), alpha, SchemeKind::L1, std::move(rows), 0, std::move(theta));
}

CaputoWeightTable make_weights(std::shared_ptr<const GradedTemporalMesh> mesh, double alpha,
                               SchemeKind kind, unsigned threads) {
  return kind == SchemeKind::Fitted ? fitted_weights(std::move(mesh), alpha, {}, threads)
                                    : l1_weights(std::move(mesh), alpha);
}

double apply(const CaputoWeightTable& table, std::span<const double> history, int n) {
  if (history.size() != static_cast<std::size_t>(n) + 1) {
    std::ostringstream msg;
    msg << "apply: history has " << history.size() << " entries, level " << n << " needs " << n + 1;
    throw DomainError(msg.str());
  }
  const auto d = table.row(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) acc += d[k] * (history[k + 1] - history[k]);
  return acc;
}

std::vector<double> nodal_weights(const CaputoWeightTable& table, int n) {
  const auto stored = table.theta_row(n);
  if (!stored.empty()) return {stored.begin(), stored.end()};
  const auto d = table.row(n);
  std::vector<double> theta(static_cast<std::size_t>(n) + 1);
  theta[0] = -d[0];
  for (std::size_t j = 1; j < d.size(); ++j) theta[j] = d[j - 1] - d[j];
  theta.back() = d.back();
  return theta;
}

}  // namespace fracdiff
