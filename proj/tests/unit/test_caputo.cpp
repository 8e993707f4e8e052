#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fracdiff/caputo.hpp"
#include "oracle_values.hpp"

using namespace fracdiff;

namespace {

std::shared_ptr<const GradedTemporalMesh> mesh_of(double T, int N, double r) {
  return std::make_shared<const GradedTemporalMesh>(T, N, r);
}

struct RandomMesh {
  double alpha, T, r;
  int N;
};

std::vector<RandomMesh> random_meshes(int count, unsigned seed, int max_n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> a(0.05, 0.95), r(1.0, 9.0), T(0.1, 10.0);
  std::uniform_int_distribution<int> n(1, max_n);
  std::vector<RandomMesh> out;
  for (int i = 0; i < count; ++i) out.push_back({a(rng), T(rng), r(rng), n(rng)});
  return out;
}

}  // namespace

TEST(FittedWeights, FirstRowClosedForm) {
  const auto t = fitted_weights(mesh_of(1.0, 1, 1.0), 0.5);
  EXPECT_NEAR(t.row(1)[0], std::sqrt(M_PI) / 2.0, 1e-14);
  for (double a : {0.1, 0.4, 0.9}) {
    const auto m = mesh_of(3.0, 10, 2.0);
    const auto tab = fitted_weights(m, a);
    EXPECT_NEAR(tab.row(1)[0], gamma_fn(1.0 + a) / std::pow(m->t(1), a), 1e-12 * tab.row(1)[0]);
  }
}

TEST(FittedWeights, MatchesQuadratureOracle) {
  const auto t = fitted_weights(mesh_of(1.0, 4, 1.0), 0.4);
  const auto row = t.row(4);
  for (int k = 0; k < 4; ++k)
    EXPECT_NEAR(row[k], oracle::kFittedRowA04N4[k], 1e-13 * oracle::kFittedRowA04N4[k]);
  const auto theta = nodal_weights(t, 4);
  for (int k = 0; k <= 4; ++k)
    EXPECT_NEAR(theta[k], oracle::kFittedThetaA04N4[k], 1e-13 * oracle::kFittedRowA04N4[3]);
}

TEST(L1Weights, ClosedFormAndOracle) {
  EXPECT_NEAR(l1_weights(mesh_of(1.0, 1, 1.0), 0.5).row(1)[0], 1.0 / std::tgamma(1.5), 1e-14);
  const auto t = l1_weights(mesh_of(1.0, 8, 9.0), 0.2);
  for (int k = 0; k < 8; ++k)
    EXPECT_NEAR(t.row(8)[k], oracle::kL1RowA02R9N8[k], 1e-12 * oracle::kL1RowA02R9N8[k]) << k;
  EXPECT_EQ(t.inc_beta_evaluations(), 0u);
}

TEST(FittedWeights, TelescopesToGammaOnRandomMeshes) {
  for (const auto& c : random_meshes(100, 17, 200)) {
    const auto tab = fitted_weights(mesh_of(c.T, c.N, c.r), c.alpha);
    const auto& m = tab.mesh();
    const double want = gamma_fn(1.0 + c.alpha);
    for (int n = 1; n <= c.N; ++n) {
      const auto d = tab.row(n);
      double sum = 0.0;
      for (int k = 0; k < n; ++k)
        sum += d[k] * (std::pow(m.t(k + 1), c.alpha) - std::pow(m.t(k), c.alpha));
      ASSERT_NEAR(sum, want, 1e-10 * want) << "alpha=" << c.alpha << " r=" << c.r << " n=" << n;
    }
  }
}

TEST(L1Weights, ExactOnLinearHistory) {
  for (const auto& c : random_meshes(50, 23, 150)) {
    const auto tab = l1_weights(mesh_of(c.T, c.N, c.r), c.alpha);
    const auto& m = tab.mesh();
    for (int n = 1; n <= c.N; ++n) {
      std::vector<double> hist(m.nodes().begin(), m.nodes().begin() + n + 1);
      const double want = std::pow(m.t(n), 1.0 - c.alpha) / gamma_fn(2.0 - c.alpha);
      ASSERT_NEAR(apply(tab, hist, n), want, 1e-10 * want);
    }
  }
}

TEST(Weights, PositiveMonotoneAndSignPattern) {
  for (const auto& c : random_meshes(60, 29, 120)) {
    for (SchemeKind kind : {SchemeKind::Fitted, SchemeKind::L1}) {
      const auto tab = make_weights(mesh_of(c.T, c.N, c.r), c.alpha, kind);
      for (int n = 1; n <= c.N; ++n) {
        const auto d = tab.row(n);
        for (int k = 0; k < n; ++k) ASSERT_GT(d[k], 0.0);
        const auto& m = tab.mesh();
        for (int k = 1; k < n; ++k) {
          // Near t = 0 on strongly graded meshes consecutive weights differ by about
          // alpha (t_{k+1} / t_n), which can fall below double resolution.
          if (m.t(k + 1) / m.t(n) > 1e-8)
            ASSERT_GT(d[k], d[k - 1]) << to_string(kind) << " n=" << n << " k=" << k;
          else
            ASSERT_GE(d[k], d[k - 1] * (1.0 - 1e-14)) << to_string(kind) << " n=" << n << " k=" << k;
        }
        const auto th = nodal_weights(tab, n);
        ASSERT_EQ(th.size(), static_cast<std::size_t>(n + 1));
        ASSERT_GT(th[n], 0.0);
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
          ASSERT_LT(th[k], 0.0);
          sum += th[k];
        }
        ASSERT_NEAR(sum + th[n], 0.0, 1e-12 * th[n]);
      }
    }
  }
}

TEST(Weights, NodalFormResolvesTheInitialPlateau) {
  // With r = 9 the first weights of a late row agree to every double digit, yet Theta
  // must keep its sign and its relative accuracy.
  const auto m = mesh_of(1.0, 512, 9.0);
  for (SchemeKind kind : {SchemeKind::Fitted, SchemeKind::L1}) {
    const auto tab = make_weights(m, 0.2, kind);
    const auto& want = kind == SchemeKind::Fitted ? oracle::kFittedPlateauTheta : oracle::kL1PlateauTheta;
    const auto th = nodal_weights(tab, 256);
    for (std::size_t i = 0; i < oracle::kPlateauJ.size(); ++i) {
      const int j = oracle::kPlateauJ[i];
      EXPECT_NEAR(th[j], want[i], 1e-12 * std::abs(want[i])) << to_string(kind) << " j=" << j;
    }
    for (int n : {2, 3, 17, 256, 511, 512}) {
      const auto d = tab.row(n);
      const auto t = nodal_weights(tab, n);
      for (int j = 1; j < n; ++j) {
        ASSERT_LT(t[j], 0.0) << to_string(kind) << " n=" << n << " j=" << j;
        // the differenced weights carry the incomplete-Beta error of d itself
        ASSERT_NEAR(t[j], d[j - 1] - d[j], 1e-11 * d[j]) << to_string(kind) << " n=" << n << " j=" << j;
      }
      EXPECT_EQ(t[0], -d[0]);
      EXPECT_EQ(t[n], d[n - 1]);
    }
  }
}

TEST(Weights, TwoTermRow) {
  const auto tab = fitted_weights(mesh_of(1.0, 3, 2.0), 0.3);
  const auto th = nodal_weights(tab, 1);
  ASSERT_EQ(th.size(), 2u);
  EXPECT_EQ(th[0], -tab.row(1)[0]);
  EXPECT_EQ(th[1], tab.row(1)[0]);
}

TEST(Apply, TrivialHistories) {
  const auto m = mesh_of(2.0, 32, 3.0);
  for (double a : {0.2, 0.5, 0.8}) {
    const auto tab = fitted_weights(m, a);
    std::vector<double> constant(33, 4.2), power(33);
    for (int k = 0; k <= 32; ++k) power[k] = std::pow(m->t(k), a);
    for (int n = 1; n <= 32; ++n) {
      EXPECT_EQ(apply(tab, std::span(constant).first(n + 1), n), 0.0);
      EXPECT_NEAR(apply(tab, std::span(power).first(n + 1), n), gamma_fn(1.0 + a), 1e-10);
    }
  }
}

TEST(Apply, LengthMismatchThrows) {
  const auto tab = l1_weights(mesh_of(1.0, 4, 1.0), 0.5);
  std::vector<double> h(3, 0.0);
  EXPECT_THROW(apply(tab, h, 3), DomainError);
  EXPECT_THROW(tab.row(0), DomainError);
  EXPECT_THROW(tab.row(5), DomainError);
}

TEST(Weights, BarrierLowerBound) {
  // Nondecreasing grid functions vanishing at t = 0 satisfy
  // D_N b(t_n) >= b(t_n) / (Gamma(1-alpha) t_n^alpha).
  for (const auto& c : random_meshes(40, 31, 64)) {
    const auto tab = fitted_weights(mesh_of(c.T, c.N, c.r), c.alpha);
    const auto& m = tab.mesh();
    const double t1 = m.t(1);
    const std::function<double(double)> barriers[] = {
        [](double t) { return t; },
        [&](double t) { return std::pow(t, c.alpha); },
        [](double t) { return t * t; },
        [&](double t) { return -std::expm1(-t / t1); },
    };
    for (const auto& b : barriers) {
      std::vector<double> hist;
      for (double t : m.nodes()) hist.push_back(b(t));
      for (int n = 1; n <= c.N; ++n) {
        const double lower = hist[n] / (gamma_fn(1.0 - c.alpha) * std::pow(m.t(n), c.alpha));
        ASSERT_GE(apply(tab, std::span(hist).first(n + 1), n), lower - 1e-10)
            << "alpha=" << c.alpha << " r=" << c.r << " n=" << n;
      }
    }
  }
}

TEST(Weights, SmoothLimitOfBothSchemes) {
  // Both operators approach 2 t^{2-alpha} / Gamma(3-alpha) on u = t^2.
  const double a = 0.5;
  double prev_fit = 1.0, prev_l1 = 1.0;
  for (int N = 16; N <= 256; N *= 2) {
    const auto m = mesh_of(1.0, N, 1.0);
    std::vector<double> hist;
    for (double t : m->nodes()) hist.push_back(t * t);
    const double want = 2.0 / gamma_fn(3.0 - a);
    const double e_fit = std::abs(apply(fitted_weights(m, a), hist, N) - want);
    const double e_l1 = std::abs(apply(l1_weights(m, a), hist, N) - want);
    EXPECT_LT(e_fit, prev_fit);
    EXPECT_LT(e_l1, prev_l1);
    prev_fit = e_fit;
    prev_l1 = e_l1;
  }
  EXPECT_LT(prev_fit, 1e-3);
  EXPECT_LT(prev_l1, 1e-3);
}

TEST(FittedWeights, EvaluationBudget) {
  for (int N : {1, 7, 64, 300}) {
    const auto tab = fitted_weights(mesh_of(1.0, N, 2.5), 0.35);
    const std::uint64_t n = static_cast<std::uint64_t>(N);
    EXPECT_LE(tab.inc_beta_evaluations(), 2 * n * (n + 1) / 2 + n);
    EXPECT_GT(tab.inc_beta_evaluations() + 1, n * (n - 1) / 2);
  }
}

TEST(FittedWeights, ThreadCountDoesNotChangeBits) {
  const auto m = mesh_of(10.0, 200, 4.5);
  const auto one = fitted_weights(m, 0.2, {}, 1);
  const auto four = fitted_weights(m, 0.2, {}, 4);
  for (int n = 1; n <= 200; ++n)
    for (int k = 0; k < n; ++k) ASSERT_EQ(one.row(n)[k], four.row(n)[k]);
  EXPECT_EQ(one.inc_beta_evaluations(), four.inc_beta_evaluations());
}

TEST(WeightTable, ValidatesShape) {
  const auto m = mesh_of(1.0, 2, 1.0);
  EXPECT_THROW(CaputoWeightTable(m, 0.5, SchemeKind::L1, {{1.0}}), DomainError);
  EXPECT_THROW(CaputoWeightTable(m, 0.5, SchemeKind::L1, {{1.0}, {1.0}}), DomainError);
  EXPECT_NO_THROW(CaputoWeightTable(m, 0.5, SchemeKind::L1, {{1.0}, {1.0, 2.0}}));
  EXPECT_THROW(fitted_weights(m, 1.0), DomainError);
  EXPECT_THROW(l1_weights(m, 0.0), DomainError);
}
