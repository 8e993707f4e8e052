#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "fracdiff/solver.hpp"

namespace fracdiff {

enum class ExampleId { Example1, Example2, Example3, FittedExactness };

/// Parses "1", "2", "3" or "exactness"; throws ConfigError otherwise.
ExampleId parse_example_id(std::string_view text);
const char* to_string(ExampleId id);

/// C_alpha(t) = D_t^alpha cos(omega t)
///            = sum_{k>=1} (-1)^k omega^{2k} t^{2k-alpha} / Gamma(2k+1-alpha).
/// Throws AccuracyLossError if 200 terms do not converge.
double caputo_of_cosine(double alpha, double omega, double t);

/// Weakly singular solution u = 0.5 [E_{alpha,1}(-t^alpha) + cos(pi t/3)] sin x on (0, pi).
ProblemSpec example1(double alpha, double final_time = 1.0);

/// D^alpha u - u_xx + (1+x) u = x(pi-x)(1+t^4) + t^2, u(x,0) = sin x; no exact solution.
ProblemSpec example2(double final_time = 1.0);

/// Smooth solution u = (1+t^3)(4x(1-x))^2 + 5 t^{3+alpha} on (0, 1), p = 1, c = x^2.
/// The solution does not vanish at x = 0, 1, so the problem carries Dirichlet data.
ProblemSpec example3(double alpha);

/// u = x(l-x)(1+t^alpha): reproduced to rounding by the fitted scheme on any mesh.
ProblemSpec fitted_exactness_problem(double alpha, double length = 1.0, double final_time = 1.0);

/// Dispatch; `final_time` is ignored by Example 3, whose domain is fixed.
ProblemSpec make_example(ExampleId id, double alpha, double final_time = 1.0);

/// True when the example's exact solution is smooth in time (orders 2 - alpha on uniform meshes).
bool has_smooth_solution(ExampleId id);

/// a * x^i * (l - x)^j * t^q
struct SourceTerm {
  double a = 0.0;
  int i = 0;
  int j = 0;
  double q = 0.0;
};

/// A problem assembled from the polynomial building blocks of a problem-config file.
struct ProblemConfig {
  double length = 1.0;
  double final_time = 1.0;
  double p = 1.0;
  /// c(x) = sum_k c_coeffs[k] x^k
  std::vector<double> c_coeffs;
  /// phi(x) = sum a x^i (l-x)^j; q is unused.
  std::vector<SourceTerm> phi_terms;
  std::vector<SourceTerm> f_terms;

  ProblemSpec to_problem(std::string name = "config") const;
};

/// Reads the key-value problem format:
///
///     [domain]       l = 3.14159     T = 1
///     [coefficients] p = 1           c = [1, 1]
///     [initial]      phi = [[1, 1, 1]]
///     [source]       f = [[1, 1, 1, 0], [1, 0, 0, 2]]
///
/// One `key = value` per line, `#` starts a comment. Throws ConfigError.
ProblemConfig parse_problem_config(std::istream& in);
ProblemConfig load_problem_config(const std::filesystem::path& path);

}  // namespace fracdiff
