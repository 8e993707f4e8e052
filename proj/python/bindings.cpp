#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracdiff/harness.hpp"

namespace py = pybind11;
using namespace fracdiff;

namespace {

SchemeKind scheme_of(const std::string& name) {
  if (name == "fitted") return SchemeKind::Fitted;
  if (name == "l1" || name == "L1") return SchemeKind::L1;
  throw ConfigError("scheme must be 'fitted' or 'l1', got '" + name + "'");
}

GradingChoice grading_of(const py::object& r) {
  if (py::isinstance<py::str>(r)) return GradingChoice::parse(r.cast<std::string>());
  const double v = r.cast<double>();
  if (!(v >= 1.0)) throw ConfigError("grading must be >= 1");
  return {GradingChoice::Mode::Numeric, v};
}

py::dict report_dict(const ConvergenceReport& rep) {
  py::dict d;
  d["problem"] = rep.problem;
  d["scheme"] = to_string(rep.kind);
  d["alpha"] = rep.alpha;
  d["r"] = rep.grading;
  d["T"] = rep.final_time;
  d["metric"] = to_string(rep.metric);
  d["toc"] = rep.toc;
  py::list N, M, err;
  for (const auto& c : rep.cells) {
    N.append(c.N);
    M.append(c.M);
    err.append(c.value);
  }
  d["N"] = N;
  d["M"] = M;
  d["errors"] = err;
  d["rates"] = rep.rates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fracdiff, m) {
  m.doc() = "Caputo time-fractional reaction-diffusion solvers";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AccuracyLossError>(m, "AccuracyLossError", PyExc_ArithmeticError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("Fitted", SchemeKind::Fitted)
      .value("L1", SchemeKind::L1);

  py::class_<SpecFunConfig>(m, "SpecFunConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &SpecFunConfig::rel_tol)
      .def_readwrite("max_terms", &SpecFunConfig::max_terms)
      .def_readwrite("ml_crossover", &SpecFunConfig::ml_crossover)
      .def_readwrite("ml_certify_tol", &SpecFunConfig::ml_certify_tol);

  m.def("log_gamma", &log_gamma, py::arg("x"));
  m.def("gamma", &gamma_fn, py::arg("x"));
  m.def("beta", &beta_fn, py::arg("a"), py::arg("b"));
  m.def("inc_beta", &inc_beta, py::arg("z"), py::arg("a"), py::arg("b"),
        py::arg("config") = SpecFunConfig{});
  m.def("mittag_leffler", &mittag_leffler, py::arg("gamma"), py::arg("delta"), py::arg("z"),
        py::arg("config") = SpecFunConfig{});

  py::class_<GradedTemporalMesh, std::shared_ptr<GradedTemporalMesh>>(m, "GradedTemporalMesh")
      .def(py::init<double, int, double>(), py::arg("T"), py::arg("N"), py::arg("r") = 1.0)
      .def_property_readonly("final_time", &GradedTemporalMesh::final_time)
      .def_property_readonly("intervals", &GradedTemporalMesh::intervals)
      .def_property_readonly("grading", &GradedTemporalMesh::grading)
      .def_property_readonly("nodes", [](const GradedTemporalMesh& g) {
        return std::vector<double>(g.nodes().begin(), g.nodes().end());
      });
  m.def("optimal_grading",
        [](double alpha, const std::string& scheme) { return optimal_grading(alpha, scheme_of(scheme)); },
        py::arg("alpha"), py::arg("scheme") = "fitted");

  py::class_<CaputoWeightTable>(m, "CaputoWeightTable")
      .def_property_readonly("alpha", &CaputoWeightTable::alpha)
      .def_property_readonly("levels", &CaputoWeightTable::levels)
      .def_property_readonly("inc_beta_evaluations", &CaputoWeightTable::inc_beta_evaluations)
      .def("row", [](const CaputoWeightTable& t, int n) {
        if (n < 1 || n > t.levels()) throw py::index_error("row index out of range");
        const auto r = t.row(n);
        return std::vector<double>(r.begin(), r.end());
      });
  m.def("fitted_weights",
        [](double T, int N, double r, double alpha, unsigned threads) {
          return fitted_weights(std::make_shared<const GradedTemporalMesh>(T, N, r), alpha, {}, threads);
        },
        py::arg("T"), py::arg("N"), py::arg("r"), py::arg("alpha"), py::arg("threads") = 1);
  m.def("l1_weights",
        [](double T, int N, double r, double alpha) {
          return l1_weights(std::make_shared<const GradedTemporalMesh>(T, N, r), alpha);
        },
        py::arg("T"), py::arg("N"), py::arg("r"), py::arg("alpha"));
  m.def("nodal_weights", &nodal_weights, py::arg("table"), py::arg("n"));

  m.def("solve_example",
        [](const std::string& example, double alpha, int N, int M, const std::string& scheme,
           const py::object& r, double T) {
          const ExampleId id = parse_example_id(example);
          const SchemeKind kind = scheme_of(scheme);
          const ProblemSpec problem = make_example(id, alpha, T);
          const double grading = grading_of(r).resolve(alpha, kind);
          auto mesh = std::make_shared<const GradedTemporalMesh>(problem.final_time, N, grading);
          SolutionGrid grid;
          {
            py::gil_scoped_release release;
            grid = solve(problem, UniformSpatialGrid(problem.length, M), mesh, alpha, kind);
          }
          py::array_t<double> u({N + 1, M + 1});
          std::copy(grid.values.begin(), grid.values.end(), u.mutable_data());
          py::dict out;
          out["u"] = u;
          out["t"] = std::vector<double>(mesh->nodes().begin(), mesh->nodes().end());
          out["x"] = std::vector<double>(grid.spatial.nodes().begin(), grid.spatial.nodes().end());
          out["max_error"] = problem.exact ? py::cast(max_nodal_error(grid, problem.exact)) : py::none();
          return out;
        },
        py::arg("example"), py::arg("alpha"), py::arg("N"), py::arg("M"),
        py::arg("scheme") = "fitted", py::arg("r") = py::str("uniform"), py::arg("T") = 1.0);

  m.def("verify_m_matrix",
        [](const std::string& example, double alpha, int N, int M, const std::string& scheme,
           const py::object& r, double T) {
          const SchemeKind kind = scheme_of(scheme);
          const ProblemSpec problem = make_example(parse_example_id(example), alpha, T);
          auto mesh = std::make_shared<const GradedTemporalMesh>(
              problem.final_time, N, grading_of(r).resolve(alpha, kind));
          const auto rep = verify_m_matrix(UniformSpatialGrid(problem.length, M), mesh, alpha, kind,
                                           problem.c, problem.p);
          return py::make_tuple(rep.pass, rep.summary());
        },
        py::arg("example"), py::arg("alpha"), py::arg("N"), py::arg("M"),
        py::arg("scheme") = "fitted", py::arg("r") = py::str("uniform"), py::arg("T") = 1.0);

  m.def("convergence_table",
        [](const std::string& example, double alpha, std::vector<int> Ns, std::optional<std::vector<int>> Ms,
           const std::string& scheme, const py::object& r, double T, unsigned jobs) {
          Experiment e = example_experiment(parse_example_id(example), scheme_of(scheme), alpha,
                                            grading_of(r), Ns, Ms ? *Ms : Ns, T);
          e.jobs = jobs;
          ConvergenceReport rep;
          {
            py::gil_scoped_release release;
            rep = run_convergence(e);
          }
          return report_dict(rep);
        },
        py::arg("example"), py::arg("alpha"), py::arg("Ns"), py::arg("Ms") = py::none(),
        py::arg("scheme") = "fitted", py::arg("r") = py::str("uniform"), py::arg("T") = 1.0,
        py::arg("jobs") = 1);

  m.def("observed_rates",
        [](const std::vector<double>& errors) { return observed_rates(std::span<const double>(errors)); },
        py::arg("errors"));
  m.def("growth_rates",
        [](const std::vector<double>& t10, const std::vector<double>& t1) {
          if (t10.size() != t1.size()) throw DomainError("growth_rates: lengths differ");
          std::vector<double> out;
          for (std::size_t i = 0; i < t1.size(); ++i) out.push_back(growth_rate(t10[i], t1[i]));
          return out;
        },
        py::arg("errors_t10"), py::arg("errors_t1"));
  m.def("theoretical_order",
        [](double alpha, double r, const std::string& scheme, bool smooth) {
          return theoretical_order(alpha, r, scheme_of(scheme),
                                   smooth ? Regularity::Smooth : Regularity::Typical);
        },
        py::arg("alpha"), py::arg("r"), py::arg("scheme") = "fitted", py::arg("smooth") = false);
}
