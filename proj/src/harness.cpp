#include "fracdiff/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <thread>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads; results land at their index.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, unsigned jobs, Fn fn) {
  std::vector<T> out(count);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void check_chain(const Experiment& e) {
  if (!e.problem) throw ConfigError("experiment: no problem factory");
  if (e.Ns.empty()) throw ConfigError("experiment: empty N list");
  if (e.Ns.size() != e.Ms.size()) throw ConfigError("experiment: N and M lists differ in length");
  for (std::size_t i = 0; i < e.Ns.size(); ++i) {
    if (e.Ns[i] < 1 || e.Ms[i] < 2) throw ConfigError("experiment: need N >= 1 and M >= 2");
  }
}

std::vector<ErrorSample> samples_of(const Experiment& e, const std::vector<double>& values) {
  std::vector<ErrorSample> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({e.Ns[i], e.Ms[i], values[i]});
  return out;
}

ConvergenceReport report_header(const Experiment& e, const ProblemSpec& problem, MetricKind metric) {
  ConvergenceReport rep;
  rep.problem = problem.name;
  rep.kind = e.kind;
  rep.alpha = e.alpha;
  rep.grading = e.grading.resolve(e.alpha, e.kind);
  rep.final_time = e.final_time;
  rep.metric = metric;
  rep.toc = theoretical_order(e.alpha, rep.grading, e.kind, e.regularity);
  return rep;
}

SolutionGrid solve_cell(const ProblemSpec& problem, const Experiment& e, double r, int N, int M) {
  auto mesh = std::make_shared<const GradedTemporalMesh>(e.final_time, N, r);
  return solve(problem, UniformSpatialGrid(problem.length, M), std::move(mesh), e.alpha, e.kind);
}

}  // namespace

double max_nodal_error(const SolutionGrid& grid, const SpaceTimeFn& exact) {
  if (!exact) throw DomainError("max_nodal_error: problem has no exact solution");
  double worst = 0.0;
  for (int n = 0; n <= grid.levels(); ++n) {
    const double t = grid.temporal->t(n);
    for (int m = 0; m <= grid.intervals(); ++m)
      worst = std::max(worst, std::abs(exact(grid.spatial.x(m), t) - grid(n, m)));
  }
  return worst;
}

double two_mesh_difference(const SolutionGrid& coarse, const SolutionGrid& fine) {
  const auto& tc = *coarse.temporal;
  const auto& tf = *fine.temporal;
  const bool compatible = fine.levels() == 2 * coarse.levels() &&
                          fine.intervals() == 2 * coarse.intervals() &&
                          tf.final_time() == tc.final_time() && tf.grading() == tc.grading() &&
                          fine.alpha == coarse.alpha && fine.kind == coarse.kind &&
                          fine.spatial.length() == coarse.spatial.length();
  if (!compatible) throw DomainError("two_mesh_difference: grids are not a nested pair");
  for (int n = 0; n <= coarse.levels(); ++n)
    if (tf.t(2 * n) != tc.t(n)) throw DomainError("two_mesh_difference: temporal nodes do not nest");
  double worst = 0.0;
  for (int n = 0; n <= coarse.levels(); ++n)
    for (int m = 0; m <= coarse.intervals(); ++m)
      worst = std::max(worst, std::abs(coarse(n, m) - fine(2 * n, 2 * m)));
  return worst;
}

std::vector<Rate> observed_rates(std::span<const double> errors) {
  if (errors.size() < 2) throw DomainError("observed_rates: need at least two errors");
  std::vector<Rate> rates;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double a = errors[i];
    const double b = errors[i + 1];
    if (a < kRateFloor && b < kRateFloor) {
      rates.emplace_back(std::nullopt);
    } else {
      rates.emplace_back(std::log2(a / b));
    }
  }
  return rates;
}

std::vector<Rate> observed_rates(std::span<const ErrorSample> samples) {
  std::vector<double> values;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i > 0 && (samples[i].N != 2 * samples[i - 1].N || samples[i].M != 2 * samples[i - 1].M)) {
      std::ostringstream msg;
      msg << "observed_rates: (N, M) = (" << samples[i].N << ", " << samples[i].M
          << ") does not double (" << samples[i - 1].N << ", " << samples[i - 1].M << ")";
      throw ConfigError(msg.str());
    }
    values.push_back(samples[i].value);
  }
  return observed_rates(values);
}

double growth_rate(double error_t10, double error_t1) {
  if (!(error_t10 > 0.0 && error_t1 > 0.0)) throw DomainError("growth_rate: errors must be positive");
  return std::log10(error_t10 / error_t1);
}

double theoretical_order(double alpha, double grading, SchemeKind kind, Regularity regularity) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("theoretical_order: alpha must lie in (0, 1)");
  if (!(grading >= 1.0)) throw DomainError("theoretical_order: grading must be >= 1");
  if (regularity == Regularity::Smooth) return 2.0 - alpha;
  const double mesh_order = kind == SchemeKind::Fitted ? 2.0 * grading * alpha : grading * alpha;
  return std::min(2.0 - alpha, mesh_order);
}

double GradingChoice::resolve(double alpha, SchemeKind kind) const {
  switch (mode) {
    case Mode::Numeric: return value;
    case Mode::Optimal: return optimal_grading(alpha, kind);
    case Mode::Uniform: return 1.0;
  }
  return 1.0;
}

std::string GradingChoice::label() const {
  switch (mode) {
    case Mode::Optimal: return "optimal";
    case Mode::Uniform: return "uniform";
    case Mode::Numeric: break;
  }
  std::ostringstream out;
  out << value;
  return out.str();
}

GradingChoice GradingChoice::parse(std::string_view text) {
  if (text == "optimal") return {Mode::Optimal, 0.0};
  if (text == "uniform") return {Mode::Uniform, 1.0};
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 1.0))
    throw ConfigError("grading must be 'optimal', 'uniform' or a number >= 1, got '" +
                      std::string(text) + "'");
  return {Mode::Numeric, v};
}

ConvergenceReport run_exact_error(const Experiment& e) {
  check_chain(e);
  const ProblemSpec problem = e.problem(e.alpha, e.final_time);
  if (!problem.exact) throw ConfigError("experiment: problem '" + problem.name + "' has no exact solution");
  ConvergenceReport rep = report_header(e, problem, MetricKind::ExactError);
  const double r = rep.grading;
  const auto values = parallel_map<double>(e.Ns.size(), e.jobs, [&](std::size_t i) {
    const SolutionGrid grid = solve_cell(problem, e, r, e.Ns[i], e.Ms[i]);
    return max_nodal_error(grid, problem.exact);
  });
  rep.cells = samples_of(e, values);
  if (rep.cells.size() > 1) rep.rates = observed_rates(std::span<const ErrorSample>(rep.cells));
  return rep;
}

ConvergenceReport run_two_mesh(const Experiment& e) {
  check_chain(e);
  const ProblemSpec problem = e.problem(e.alpha, e.final_time);
  ConvergenceReport rep = report_header(e, problem, MetricKind::TwoMesh);
  const double r = rep.grading;

  // Every (N, M) and its doubling, each solved once.
  std::map<std::pair<int, int>, std::size_t> index;
  std::vector<std::pair<int, int>> needed;
  auto want = [&](int N, int M) {
    if (index.emplace(std::pair{N, M}, needed.size()).second) needed.emplace_back(N, M);
  };
  for (std::size_t i = 0; i < e.Ns.size(); ++i) {
    want(e.Ns[i], e.Ms[i]);
    want(2 * e.Ns[i], 2 * e.Ms[i]);
  }
  const auto grids = parallel_map<SolutionGrid>(needed.size(), e.jobs, [&](std::size_t i) {
    return solve_cell(problem, e, r, needed[i].first, needed[i].second);
  });
  std::vector<double> values;
  for (std::size_t i = 0; i < e.Ns.size(); ++i) {
    const auto& coarse = grids[index.at({e.Ns[i], e.Ms[i]})];
    const auto& fine = grids[index.at({2 * e.Ns[i], 2 * e.Ms[i]})];
    values.push_back(two_mesh_difference(coarse, fine));
  }
  rep.cells = samples_of(e, values);
  if (rep.cells.size() > 1) rep.rates = observed_rates(std::span<const ErrorSample>(rep.cells));
  return rep;
}

ConvergenceReport run_convergence(const Experiment& e) {
  check_chain(e);
  const bool exact = static_cast<bool>(e.problem(e.alpha, e.final_time).exact);
  return exact ? run_exact_error(e) : run_two_mesh(e);
}

Experiment example_experiment(ExampleId id, SchemeKind kind, double alpha, GradingChoice grading,
                              std::vector<int> Ns, std::vector<int> Ms, double final_time) {
  Experiment e;
  e.problem = [id](double a, double T) { return make_example(id, a, T); };
  e.regularity = has_smooth_solution(id) ? Regularity::Smooth : Regularity::Typical;
  e.kind = kind;
  e.alpha = alpha;
  e.grading = grading;
  e.Ns = std::move(Ns);
  e.Ms = std::move(Ms);
  e.final_time = final_time;
  return e;
}

std::vector<double> growth_rates(const ConvergenceReport& t10, const ConvergenceReport& t1) {
  if (t10.cells.size() != t1.cells.size())
    throw DomainError("growth_rates: reports cover different (N, M) chains");
  std::vector<double> out;
  for (std::size_t i = 0; i < t1.cells.size(); ++i) {
    if (t10.cells[i].N != t1.cells[i].N || t10.cells[i].M != t1.cells[i].M)
      throw DomainError("growth_rates: reports cover different (N, M) chains");
    out.push_back(growth_rate(t10.cells[i].value, t1.cells[i].value));
  }
  return out;
}

const char* to_string(MetricKind metric) {
  return metric == MetricKind::ExactError ? "exact-error" : "two-mesh";
}

}  // namespace fracdiff
