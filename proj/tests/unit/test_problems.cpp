#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fracdiff/problems.hpp"
#include "oracle_values.hpp"

using namespace fracdiff;

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
  template <class F>
  double integrate(F f, double a, double b, int panels) const {
    double sum = 0.0;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * width;
      for (std::size_t i = 0; i < x.size(); ++i)
        sum += w[i] * f(lo + 0.5 * width * (x[i] + 1.0)) * 0.5 * width;
    }
    return sum;
  }
};

// Caputo derivative (1/Gamma(1-a)) int_0^t u'(s) (t-s)^{-a} ds, where the caller supplies
// the smooth function h(s) = u'(s) s^{1-a}. Near 0, s = v^{1/a} removes the s^{a-1} factor.
// Near t, t - s = w^p with an integer p leaves only the mild factor w^{p(1-a)-1}.
template <class H>
double caputo_quadrature(H h, double a, double t) {
  static const GaussLegendre gl(24);
  const double mid = 0.5 * t;
  const double left = gl.integrate(
      [&](double v) {
        const double s = std::pow(v, 1.0 / a);
        return h(s) * std::pow(t - s, -a) / a;
      },
      0.0, std::pow(mid, a), 16);
  const int p = static_cast<int>(std::ceil(7.0 / (1.0 - a)));
  const double right = gl.integrate(
      [&](double w) {
        const double s = t - std::pow(w, p);
        return h(s) * std::pow(s, a - 1.0) * p * std::pow(w, p * (1.0 - a) - 1.0);
      },
      0.0, std::pow(t - mid, 1.0 / p), 16);
  return (left + right) / std::tgamma(1.0 - a);
}

}  // namespace

TEST(Examples, ParseIds) {
  EXPECT_EQ(parse_example_id("1"), ExampleId::Example1);
  EXPECT_EQ(parse_example_id("2"), ExampleId::Example2);
  EXPECT_EQ(parse_example_id("3"), ExampleId::Example3);
  EXPECT_EQ(parse_example_id("exactness"), ExampleId::FittedExactness);
  EXPECT_THROW(parse_example_id("4"), ConfigError);
  EXPECT_THROW(parse_example_id(""), ConfigError);
  EXPECT_STREQ(to_string(ExampleId::Example2), "example2");
  EXPECT_TRUE(has_smooth_solution(ExampleId::Example3));
  EXPECT_FALSE(has_smooth_solution(ExampleId::Example1));
}

TEST(Examples, CaputoOfCosineMatchesQuadrature) {
  const double w = kPi / 3.0;
  for (double a : {0.2, 0.5, 0.8})
    for (double t : {0.01, 0.5, 1.0, 3.7, 10.0}) {
      const double q = caputo_quadrature([&](double s) { return -w * std::sin(w * s) * std::pow(s, 1.0 - a); }, a, t);
      EXPECT_NEAR(caputo_of_cosine(a, w, t), q, 1e-11 * (1.0 + std::abs(q))) << a << ' ' << t;
    }
  EXPECT_EQ(caputo_of_cosine(0.5, w, 0.0), 0.0);
}

TEST(Example1, DataAndOracles) {
  const auto p = example1(0.5);
  EXPECT_EQ(p.length, kPi);
  EXPECT_EQ(p.p, 1.0);
  EXPECT_EQ(p.c(1.0), 0.0);
  EXPECT_NEAR(p.f(kPi / 2, 1.0), oracle::kExample1SourceA05, 1e-12);
  EXPECT_NEAR(example1(0.8, 10.0).f(1.0, 10.0), oracle::kExample1SourceA08T10X1, 1e-12);
  for (double x : {0.0, 0.3, kPi / 2, 2.0, kPi}) EXPECT_NEAR(p.exact(x, 0.0), std::sin(x), 1e-15);
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(example1(1.0), DomainError);
}

TEST(Example2, Data) {
  const auto p = example2();
  EXPECT_FALSE(static_cast<bool>(p.exact));
  for (double t : {0.0, 0.5, 1.0}) EXPECT_EQ(p.f(0.0, t), t * t);
  EXPECT_EQ(p.phi(kPi / 2), 1.0);
  EXPECT_EQ(p.c(2.0), 3.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(Example3, DataAndOracle) {
  const auto p = example3(0.4);
  EXPECT_NEAR(p.f(0.5, 1.0), oracle::kExample3SourceA04, 1e-11 * oracle::kExample3SourceA04);
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    const double b = 4.0 * x * (1.0 - x);
    EXPECT_NEAR(p.phi(x), b * b, 1e-15);
    EXPECT_NEAR(p.exact(x, 0.0), b * b, 1e-15);
  }
  EXPECT_EQ(p.left(1.0), 5.0);
  EXPECT_EQ(p.right(1.0), 5.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(Exactness, Data) {
  const auto p = fitted_exactness_problem(0.3, 2.0, 5.0);
  for (double t : {0.0, 1.0, 5.0}) {
    EXPECT_EQ(p.exact(0.0, t), 0.0);
    EXPECT_EQ(p.exact(2.0, t), 0.0);
  }
  // D^a u = Gamma(1+a) x (l-x); -u_xx = 2 (1 + t^a)
  EXPECT_NEAR(p.f(0.5, 2.0), std::tgamma(1.3) * 0.75 + 2.0 * (1.0 + std::pow(2.0, 0.3)), 1e-14);
}

TEST(Examples, SourcesSatisfyThePde) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Example 1: D^a u - u_xx = D^a u + u, with u_t = 0.5 [-t^{a-1} E_{a,a}(-t^a) - w sin(w t)] sin x.
  const double w = kPi / 3.0;
  for (int i = 0; i < 20; ++i) {
    const double a = 0.1 + 0.8 * u(rng);
    const double T = i % 2 ? 10.0 : 1.0;
    const double x = kPi * u(rng);
    const double t = 0.05 + (T - 0.05) * u(rng);
    const auto p = example1(a, T);
    const double h_scale = 0.5 * std::sin(x);
    const double dq = caputo_quadrature(
        [&](double s) {
          return h_scale * (-mittag_leffler(a, a, -std::pow(s, a)) - w * std::sin(w * s) * std::pow(s, 1.0 - a));
        },
        a, t);
    EXPECT_NEAR(dq + p.exact(x, t), p.f(x, t), 1e-8) << "a=" << a << " x=" << x << " t=" << t;
  }
  // Example 3: D^a u - u_xx + x^2 u with u_t = 3t^2 b(x) + 5(3+a) t^{2+a}.
  for (int i = 0; i < 20; ++i) {
    const double a = 0.1 + 0.8 * u(rng);
    const double x = u(rng);
    const double t = 0.05 + 0.95 * u(rng);
    const auto p = example3(a);
    const double b = std::pow(4.0 * x * (1.0 - x), 2);
    const double dq = caputo_quadrature(
        [&](double s) { return (3.0 * s * s * b + 5.0 * (3.0 + a) * std::pow(s, 2.0 + a)) * std::pow(s, 1.0 - a); },
        a, t);
    const double uxx = (1.0 + t * t * t) * 16.0 * (2.0 - 12.0 * x + 12.0 * x * x);
    EXPECT_NEAR(dq - uxx + x * x * p.exact(x, t), p.f(x, t), 1e-8 * (1.0 + std::abs(p.f(x, t))))
        << "a=" << a << " x=" << x << " t=" << t;
  }
}

TEST(ProblemConfig, ParsesAllSections) {
  std::istringstream in(R"(
# heat with a reaction term
[domain]
l = 3.0
T = 2   # final time

[coefficients]
p = 0.5
c = [1, 0, 2]

[initial]
phi = [[2, 1, 1]]

[source]
f = [[1, 1, 1, 0], [3, 0, 0, 1.5]]
)");
  const auto cfg = parse_problem_config(in);
  EXPECT_EQ(cfg.length, 3.0);
  EXPECT_EQ(cfg.final_time, 2.0);
  EXPECT_EQ(cfg.p, 0.5);
  ASSERT_EQ(cfg.c_coeffs.size(), 3u);
  ASSERT_EQ(cfg.f_terms.size(), 2u);
  EXPECT_EQ(cfg.f_terms[1].q, 1.5);
  const auto p = cfg.to_problem("mine");
  EXPECT_EQ(p.name, "mine");
  EXPECT_DOUBLE_EQ(p.c(2.0), 1.0 + 2.0 * 4.0);
  EXPECT_DOUBLE_EQ(p.phi(1.0), 2.0 * 1.0 * 2.0);
  EXPECT_DOUBLE_EQ(p.f(1.0, 4.0), 1.0 * 2.0 + 3.0 * 8.0);
  EXPECT_DOUBLE_EQ(p.f(1.0, 0.0), 2.0);
  EXPECT_NO_THROW(p.validate());
}

TEST(ProblemConfig, RejectsMalformedInput) {
  const char* bad[] = {
      "[domain]\nl = 1\nT = 1\n[coefficients]\np = 1\n[initial]\nphi = [[1,1,1]]\n",         // no source
      "[domain]\nl = 1\nl = 2\n",                                                            // duplicate
      "[mesh]\nN = 4\n",                                                                     // unknown section
      "[domain]\nL = 1\n",                                                                   // unknown key
      "l = 1\n",                                                                             // outside section
      "[domain]\nl = [1\n",                                                                  // unterminated
      "[domain]\nl = 1\nT = 1\n[coefficients]\np = 1\n[initial]\nphi = [[1,1]]\n[source]\nf = []\n",
      "[domain]\nl = 1\nT = 1\n[coefficients]\np = 1\n[initial]\nphi = [[1,0.5,1]]\n[source]\nf = []\n",
      "[domain]\nl = 1\nT = 1\n[coefficients]\np = 1\n[initial]\nphi = []\n[source]\nf = [[1,0,0,-1]]\n",
      "[domain]\nl = -1\nT = 1\n[coefficients]\np = 1\n[initial]\nphi = []\n[source]\nf = []\n",
      "[domain]\nl = 1\nT = 1\n[coefficients]\np = x\n[initial]\nphi = []\n[source]\nf = []\n",
  };
  for (const char* text : bad) {
    std::istringstream in(text);
    EXPECT_THROW(parse_problem_config(in), ConfigError) << text;
  }
  EXPECT_THROW(load_problem_config("/nonexistent/problem.cfg"), ConfigError);
}
