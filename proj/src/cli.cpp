#include "fracdiff/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "fracdiff/errors.hpp"
#include "fracdiff/specfun.hpp"

namespace fracdiff::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(',');
    parts.push_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

template <class T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError(std::string("cannot parse ") + what + " '" + std::string(s) + "'");
  return v;
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool doubles(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] != 2 * v[i - 1]) return false;
  return true;
}

// Everything one table needs, independent of the output format.
struct TableBlock {
  SchemeKind kind;
  double T;
  std::vector<ConvergenceReport> reports;  // one per alpha
};

struct ProblemSource {
  std::optional<ExampleId> example;
  std::optional<ProblemConfig> config;
  std::string config_name;

  ProblemSpec make(double alpha, double T) const {
    if (example) return make_example(*example, alpha, T);
    ProblemConfig c = *config;
    c.final_time = T;
    return c.to_problem(config_name);
  }
  Regularity regularity() const {
    return example && has_smooth_solution(*example) ? Regularity::Smooth : Regularity::Typical;
  }
  double default_T() const { return config ? config->final_time : 1.0; }
};

ProblemSource load_source(const RunConfig& cfg) {
  ProblemSource src;
  if (cfg.example) {
    src.example = cfg.example;
  } else {
    src.config = load_problem_config(cfg.problem_path);
    src.config_name = std::filesystem::path(cfg.problem_path).stem().string();
  }
  return src;
}

std::vector<double> resolved_Ts(const RunConfig& cfg, const ProblemSource& src) {
  if (cfg.Ts.empty()) return {src.default_T()};
  if (src.example == ExampleId::Example3) {
    for (double T : cfg.Ts)
      if (T != 1.0) throw ConfigError("example 3 is posed on the fixed time interval (0, 1]");
  }
  return cfg.Ts;
}

Experiment experiment_for(const RunConfig& cfg, const ProblemSource& src, SchemeKind kind,
                          double alpha, double T) {
  Experiment e;
  e.problem = [src](double a, double t) { return src.make(a, t); };
  e.regularity = src.regularity();
  e.kind = kind;
  e.alpha = alpha;
  e.grading = cfg.grading;
  e.Ns = cfg.Ns;
  e.Ms = cfg.resolved_Ms();
  e.final_time = T;
  e.jobs = cfg.jobs;
  return e;
}

std::vector<TableBlock> run_tables(const RunConfig& cfg, const ProblemSource& src,
                                   bool force_two_mesh) {
  std::vector<TableBlock> blocks;
  for (SchemeKind kind : cfg.schemes) {
    for (double T : resolved_Ts(cfg, src)) {
      TableBlock block{kind, T, {}};
      for (double alpha : cfg.alphas) {
        const Experiment e = experiment_for(cfg, src, kind, alpha, T);
        block.reports.push_back(force_two_mesh ? run_two_mesh(e) : run_convergence(e));
      }
      blocks.push_back(std::move(block));
    }
  }
  return blocks;
}

std::string rate_cell(const ConvergenceReport& rep, std::size_t i) {
  if (i >= rep.rates.size()) return "";
  return rep.rates[i] ? format_rate(*rep.rates[i]) : "exact";
}

std::string column_label(int N, int M) {
  return N == M ? "N=M=" + std::to_string(N)
                : "N=" + std::to_string(N) + ", M=" + std::to_string(M);
}

void write_tables_csv(std::ostream& out, const std::vector<TableBlock>& blocks) {
  out << "alpha,scheme,r,T,N,M,error,rate,toc\n";
  for (const auto& b : blocks)
    for (const auto& rep : b.reports)
      for (std::size_t i = 0; i < rep.cells.size(); ++i)
        out << fmt_g(rep.alpha) << ',' << to_string(rep.kind) << ',' << fmt_g(rep.grading) << ','
            << fmt_g(rep.final_time) << ',' << rep.cells[i].N << ',' << rep.cells[i].M << ','
            << format_error(rep.cells[i].value) << ',' << rate_cell(rep, i) << ','
            << format_rate(rep.toc) << '\n';
}

void write_tables_md(std::ostream& out, const std::vector<TableBlock>& blocks) {
  bool first = true;
  for (const auto& b : blocks) {
    if (b.reports.empty()) continue;
    const auto& head = b.reports.front();
    if (!first) out << '\n';
    first = false;
    out << "### " << head.problem << ", " << to_string(b.kind) << " scheme, T = " << fmt_g(b.T)
        << ", " << (head.metric == MetricKind::ExactError ? "maximum nodal errors"
                                                          : "two-mesh differences")
        << "\n\n";
    out << "| | r | TOC |";
    for (const auto& c : head.cells) out << ' ' << column_label(c.N, c.M) << " |";
    out << "\n|---|---|---|";
    for (std::size_t i = 0; i < head.cells.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& rep : b.reports) {
      out << "| alpha=" << fmt_g(rep.alpha) << " | " << fmt_g(rep.grading) << " | "
          << fmt_g(rep.toc) << " |";
      for (const auto& c : rep.cells) out << ' ' << format_error(c.value) << " |";
      out << "\n| | | |";
      for (std::size_t i = 0; i < rep.cells.size(); ++i) {
        const std::string r = rate_cell(rep, i);
        out << (r.empty() ? "" : " " + r) << " |";
      }
      out << '\n';
    }
  }
}

int cmd_table(const RunConfig& cfg, const ProblemSource& src, std::ostream& out,
              bool force_two_mesh) {
  const auto blocks = run_tables(cfg, src, force_two_mesh);
  if (cfg.format == Format::Csv) {
    write_tables_csv(out, blocks);
  } else {
    write_tables_md(out, blocks);
  }
  return kExitOk;
}

int cmd_growth(const RunConfig& cfg, const ProblemSource& src, std::ostream& out) {
  const auto Ts = resolved_Ts(cfg, src);
  if (Ts.size() != 2 || !(Ts[1] > Ts[0]))
    throw ConfigError("growth needs two increasing final times, e.g. --T 1,10");
  const double span = std::log10(Ts[1] / Ts[0]);
  const auto Ms = cfg.resolved_Ms();

  struct Row {
    SchemeKind kind;
    ConvergenceReport lo, hi;
    std::vector<double> growth;
  };
  std::vector<Row> rows;
  for (SchemeKind kind : cfg.schemes) {
    for (double alpha : cfg.alphas) {
      Row row{kind, run_convergence(experiment_for(cfg, src, kind, alpha, Ts[0])),
              run_convergence(experiment_for(cfg, src, kind, alpha, Ts[1])), {}};
      for (std::size_t i = 0; i < row.lo.cells.size(); ++i)
        row.growth.push_back(std::log10(row.hi.cells[i].value / row.lo.cells[i].value) / span);
      rows.push_back(std::move(row));
    }
  }

  if (cfg.format == Format::Csv) {
    out << "alpha,scheme,r,N,M,T1,T2,error1,error2,growth\n";
    for (const auto& row : rows)
      for (std::size_t i = 0; i < row.growth.size(); ++i)
        out << fmt_g(row.lo.alpha) << ',' << to_string(row.kind) << ',' << fmt_g(row.lo.grading)
            << ',' << row.lo.cells[i].N << ',' << row.lo.cells[i].M << ',' << fmt_g(Ts[0]) << ','
            << fmt_g(Ts[1]) << ',' << format_error(row.lo.cells[i].value) << ','
            << format_error(row.hi.cells[i].value) << ',' << format_rate(row.growth[i]) << '\n';
    return kExitOk;
  }
  bool first = true;
  for (SchemeKind kind : cfg.schemes) {
    if (!first) out << '\n';
    first = false;
    out << "### growth rates, " << to_string(kind) << " scheme, T = " << fmt_g(Ts[0]) << " vs "
        << fmt_g(Ts[1]) << "\n\n| | r |";
    for (std::size_t i = 0; i < cfg.Ns.size(); ++i) out << ' ' << column_label(cfg.Ns[i], Ms[i]) << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < cfg.Ns.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& row : rows) {
      if (row.kind != kind) continue;
      out << "| alpha=" << fmt_g(row.lo.alpha) << " | " << fmt_g(row.lo.grading) << " |";
      for (double g : row.growth) out << ' ' << format_rate(g) << " |";
      out << '\n';
    }
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, const ProblemSource& src, std::ostream& out) {
  const auto Ms = cfg.resolved_Ms();
  const bool csv = cfg.format == Format::Csv;
  if (csv) out << "alpha,scheme,r,T,N,M,x,u,exact\n";
  for (SchemeKind kind : cfg.schemes) {
    for (double T : resolved_Ts(cfg, src)) {
      for (double alpha : cfg.alphas) {
        const ProblemSpec problem = src.make(alpha, T);
        const double r = cfg.grading.resolve(alpha, kind);
        for (std::size_t i = 0; i < cfg.Ns.size(); ++i) {
          auto mesh = std::make_shared<const GradedTemporalMesh>(T, cfg.Ns[i], r);
          SolveOptions opts;
          opts.threads = cfg.jobs;
          const SolutionGrid grid =
              solve(problem, UniformSpatialGrid(problem.length, Ms[i]), mesh, alpha, kind, opts);
          const int N = grid.levels();
          if (!csv) {
            out << "### " << problem.name << ", " << to_string(kind) << " scheme, alpha = "
                << fmt_g(alpha) << ", r = " << fmt_g(r) << ", T = " << fmt_g(T) << ", "
                << column_label(cfg.Ns[i], Ms[i]) << "\n\n| x | u(x, T) | exact |\n|---|---|---|\n";
          }
          for (int m = 0; m <= grid.intervals(); ++m) {
            const double x = grid.spatial.x(m);
            const std::string ex = problem.exact ? fmt_g(problem.exact(x, T)) : "";
            if (csv) {
              out << fmt_g(alpha) << ',' << to_string(kind) << ',' << fmt_g(r) << ',' << fmt_g(T)
                  << ',' << cfg.Ns[i] << ',' << Ms[i] << ',' << fmt_g(x) << ','
                  << fmt_g(grid(N, m)) << ',' << ex << '\n';
            } else {
              out << "| " << fmt_g(x) << " | " << fmt_g(grid(N, m)) << " | " << ex << " |\n";
            }
          }
          if (!csv) out << '\n';
        }
      }
    }
  }
  return kExitOk;
}

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

// Identity the weights reproduce exactly: t^alpha for fitted, t for L1.
double exactness_defect(const CaputoWeightTable& table) {
  const auto& mesh = table.mesh();
  const double a = table.alpha();
  double worst = 0.0;
  for (int n = 1; n <= table.levels(); ++n) {
    const auto d = table.row(n);
    double sum = 0.0;
    double target = 0.0;
    if (table.kind() == SchemeKind::Fitted) {
      for (int k = 0; k < n; ++k) sum += d[k] * (std::pow(mesh.t(k + 1), a) - std::pow(mesh.t(k), a));
      target = std::exp(log_gamma(1.0 + a));
    } else {
      for (int k = 0; k < n; ++k) sum += d[k] * mesh.tau(k + 1);
      target = std::pow(mesh.t(n), 1.0 - a) / std::exp(log_gamma(2.0 - a));
    }
    worst = std::max(worst, std::abs(sum - target) / target);
  }
  return worst;
}

std::vector<CheckResult> invariant_checks(const CaputoWeightTable& table) {
  double worst_sum = 0.0;
  int non_monotone = 0;
  for (int n = 1; n <= table.levels(); ++n) {
    const auto theta = nodal_weights(table, n);
    double sum = 0.0;
    double scale = 0.0;
    for (double w : theta) {
      sum += w;
      scale += std::abs(w);
    }
    worst_sum = std::max(worst_sum, std::abs(sum) / scale);
    const auto d = table.row(n);
    for (int k = 1; k < n; ++k)
      if (!(d[k] > d[k - 1])) ++non_monotone;
  }
  const double defect = exactness_defect(table);
  std::vector<CheckResult> out;
  out.push_back({"nodal rows sum to zero", worst_sum <= 1e-12, "max relative sum " + fmt_g(worst_sum)});
  out.push_back({"weights increase towards the current level", non_monotone == 0,
                 std::to_string(non_monotone) + " decreasing pairs"});
  out.push_back({table.kind() == SchemeKind::Fitted ? "exact on t^alpha" : "exact on t",
                 defect <= 1e-10, "max relative defect " + fmt_g(defect)});
  return out;
}

int cmd_verify(const RunConfig& cfg, const ProblemSource& src, std::ostream& out) {
  const auto Ms = cfg.resolved_Ms();
  bool all = true;
  for (SchemeKind kind : cfg.schemes) {
    for (double T : resolved_Ts(cfg, src)) {
      for (double alpha : cfg.alphas) {
        const ProblemSpec problem = src.make(alpha, T);
        problem.validate();
        const double r = cfg.grading.resolve(alpha, kind);
        for (std::size_t i = 0; i < cfg.Ns.size(); ++i) {
          auto mesh = std::make_shared<const GradedTemporalMesh>(T, cfg.Ns[i], r);
          const auto table = make_weights(mesh, alpha, kind, cfg.jobs);
          const UniformSpatialGrid spatial(problem.length, Ms[i]);
          std::vector<CheckResult> checks;
          const auto report = verify_m_matrix(table, spatial, problem.c, problem.p);
          checks.push_back({"M-matrix structure", report.pass, report.summary()});
          for (auto& c : invariant_checks(table)) checks.push_back(std::move(c));
          for (const auto& c : checks) {
            all = all && c.pass;
            out << (c.pass ? "PASS" : "FAIL") << "  " << to_string(kind) << " alpha=" << fmt_g(alpha)
                << " r=" << fmt_g(r) << " T=" << fmt_g(T) << ' ' << column_label(cfg.Ns[i], Ms[i])
                << "  " << c.name << " (" << c.detail << ")\n";
          }
        }
      }
    }
  }
  out << (all ? "verify: all checks passed\n" : "verify: FAILED\n");
  return all ? kExitOk : kExitVerification;
}

}  // namespace

void RunConfig::validate() const {
  if (alphas.empty()) throw ConfigError("no alpha values given");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha must lie in (0, 1), got " + fmt_g(a));
  if (schemes.empty()) throw ConfigError("no scheme given");
  if (Ns.empty()) throw ConfigError("no N values given");
  for (int n : Ns)
    if (n < 1) throw ConfigError("N must be >= 1");
  if (!Ms.empty() && Ms.size() != Ns.size())
    throw ConfigError("--m must list as many values as --n");
  for (int m : resolved_Ms())
    if (m < (command == Command::Solve || command == Command::Verify ? 1 : 2))
      throw ConfigError("M too small");
  for (double T : Ts)
    if (!(T > 0.0 && std::isfinite(T))) throw ConfigError("final times must be positive");
  if (example.has_value() == !problem_path.empty())
    throw ConfigError("give exactly one of --example and --problem");
  if (grading.mode == GradingChoice::Mode::Numeric && !(grading.value >= 1.0))
    throw ConfigError("grading must be >= 1");
  const bool rates = command == Command::Table || command == Command::TwoMesh;
  if (rates && Ns.size() > 1 && (!doubles(Ns) || !doubles(resolved_Ms())))
    throw ConfigError("N and M must double along the chain to estimate rates");
  if (command == Command::Growth && Ns.size() > 1 && (!doubles(Ns) || !doubles(resolved_Ms())))
    throw ConfigError("N and M must double along the chain");
}

std::vector<int> RunConfig::resolved_Ms() const { return Ms.empty() ? Ns : Ms; }

std::string format_error(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3E", value);
  std::string s = buf;
  const auto e = s.find('E');
  if (e == std::string::npos || e + 2 >= s.size()) return s;
  std::size_t digits = e + 2;
  while (digits + 1 < s.size() && s[digits] == '0') s.erase(digits, 1);
  return s;
}

std::string format_rate(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3f", value);
  return buf;
}

std::vector<int> parse_n_list(std::string_view text) {
  text = trim(text);
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int lo = parse_number<int>(trim(text.substr(0, dots)), "N range start");
    const int hi = parse_number<int>(trim(text.substr(dots + 2)), "N range end");
    if (lo < 1 || hi < lo) throw ConfigError("bad N range '" + std::string(text) + "'");
    std::vector<int> out;
    for (long long n = lo; n <= hi; n *= 2) out.push_back(static_cast<int>(n));
    if (out.back() != hi) throw ConfigError("N range end is not a doubling of its start");
    return out;
  }
  std::vector<int> out;
  for (auto part : split_commas(text)) out.push_back(parse_number<int>(part, "N"));
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (auto part : split_commas(trim(text))) out.push_back(parse_number<double>(part, "number"));
  return out;
}

std::vector<SchemeKind> parse_schemes(std::string_view text) {
  text = trim(text);
  if (text == "fitted") return {SchemeKind::Fitted};
  if (text == "l1" || text == "L1") return {SchemeKind::L1};
  if (text == "both") return {SchemeKind::Fitted, SchemeKind::L1};
  throw ConfigError("scheme must be fitted, l1 or both, got '" + std::string(text) + "'");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const ProblemSource src = load_source(cfg);
    std::ofstream file;
    std::ostringstream buffer;
    // Buffer so that a failing run leaves no partial output file behind.
    std::ostream& sink = cfg.out_path.empty() ? out : static_cast<std::ostream&>(buffer);
    int code = kExitOk;
    switch (cfg.command) {
      case Command::Solve: code = cmd_solve(cfg, src, sink); break;
      case Command::Table: code = cmd_table(cfg, src, sink, false); break;
      case Command::TwoMesh: code = cmd_table(cfg, src, sink, true); break;
      case Command::Growth: code = cmd_growth(cfg, src, sink); break;
      case Command::Verify: code = cmd_verify(cfg, src, sink); break;
    }
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot write '" + cfg.out_path + "'");
      file << buffer.str();
    }
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const AccuracyLossError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Caputo time-fractional reaction-diffusion solver"};
  app.require_subcommand(1);

  std::string alpha = "0.5", scheme = "fitted", r = "uniform", n = "64", m, T, example, problem,
              out_path, format = "csv";
  bool m_eq_n = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  const std::pair<const char*, Command> commands[] = {
      {"solve", Command::Solve},   {"table", Command::Table},   {"two-mesh", Command::TwoMesh},
      {"growth", Command::Growth}, {"verify", Command::Verify},
  };
  const char* help[] = {"solve and print the profile at the final time",
                        "convergence table (exact errors, or two-mesh differences)",
                        "two-mesh differences and estimated rates",
                        "growth rates between two final times",
                        "check M-matrix structure and weight invariants"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    sub->add_option("--alpha", alpha, "fractional order(s), comma separated");
    sub->add_option("--scheme", scheme, "fitted, l1 or both");
    sub->add_option("--r", r, "grading exponent: number >= 1, optimal or uniform");
    sub->add_option("--n", n, "temporal intervals: 64,128,256 or 64..1024");
    auto* mo = sub->add_option("--m", m, "spatial intervals, one per N");
    auto* meq = sub->add_flag("--m-eq-n", m_eq_n, "use M = N (the default)");
    mo->excludes(meq);
    sub->add_option("--T", T, "final time(s), comma separated");
    auto* ex = sub->add_option("--example", example, "1, 2, 3 or exactness");
    auto* pr = sub->add_option("--problem", problem, "problem configuration file");
    ex->excludes(pr);
    sub->add_option("--out", out_path, "write output here instead of stdout");
    sub->add_option("--format", format, "csv or md");
    sub->add_option("--jobs", jobs, "worker threads");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig cfg;
  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) cfg.command = commands[i].second;
    cfg.alphas = parse_real_list(alpha);
    cfg.schemes = parse_schemes(scheme);
    cfg.grading = GradingChoice::parse(r);
    cfg.Ns = parse_n_list(n);
    if (!m.empty()) cfg.Ms = parse_n_list(m);
    if (!T.empty()) cfg.Ts = parse_real_list(T);
    if (!example.empty()) cfg.example = parse_example_id(example);
    cfg.problem_path = problem;
    if (cfg.problem_path.empty() && !cfg.example) cfg.example = ExampleId::Example1;
    cfg.out_path = out_path;
    if (format == "csv") {
      cfg.format = Format::Csv;
    } else if (format == "md" || format == "markdown") {
      cfg.format = Format::Markdown;
    } else {
      throw ConfigError("format must be csv or md");
    }
    cfg.jobs = std::max(1u, jobs);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run(cfg, out, err);
}

}  // namespace fracdiff::cli
