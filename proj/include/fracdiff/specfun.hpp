#pragma once

#include "fracdiff/errors.hpp"

namespace fracdiff {

/// Tolerances shared by the iterative special-function kernels.
struct SpecFunConfig {
  /// Convergence tolerance for continued fractions and series.
  double rel_tol = 1e-15;
  int max_terms = 500;
  /// |z| below which the Mittag-Leffler Taylor series is tried first.
  double ml_crossover = 8.0;
  /// Relative error the Mittag-Leffler evaluator must certify before returning.
  double ml_certify_tol = 1e-10;

  /// Throws DomainError unless 0 < rel_tol < 1e-6, max_terms >= 50,
  /// ml_crossover > 0 and 0 < ml_certify_tol < 1.
  void validate() const;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// Gamma(x) for x > 0, evaluated as exp(log_gamma(x)).
double gamma_fn(double x);

/// 1/Gamma(x) for any real x (zero at the non-positive integers).
double reciprocal_gamma(double x);

/// Complete Beta function Gamma(a)Gamma(b)/Gamma(a+b).
double beta_fn(double a, double b);

/// Unregularized incomplete Beta integral B(z; a, b) = int_0^z s^(a-1) (1-s)^(b-1) ds.
double inc_beta(double z, double a, double b, const SpecFunConfig& cfg = {});

/// Incomplete Beta evaluated on whichever side of the continued-fraction switch point
/// converges. When `upper` is false, `value` is B(z; a, b); otherwise it is the
/// tail B(1-z; b, a) = B(a, b) - B(z; a, b). The caller passes ln z and ln(1-z) so
/// that arguments clustered near 1 keep full relative accuracy in the tail.
struct IncBetaSplit {
  bool upper = false;
  double value = 0.0;
};
IncBetaSplit inc_beta_split(double ln_z, double ln_1mz, double a, double b,
                            const SpecFunConfig& cfg = {});

/// A Mittag-Leffler value together with the error bound its evaluator can vouch for.
struct MlEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  bool certified = false;
};

/// Taylor series sum_k z^k / Gamma(gamma k + delta), accumulated in binary128.
MlEstimate mittag_leffler_series(double gamma, double delta, double z,
                                 const SpecFunConfig& cfg = {});

/// Large-|z| expansion on the negative real axis: optimally truncated algebraic series
/// -sum_k z^-k / Gamma(delta - gamma k) plus the exponentially small oscillatory terms
/// that appear for gamma >= 1.
MlEstimate mittag_leffler_asymptotic(double gamma, double delta, double z,
                                     const SpecFunConfig& cfg = {});

/// Generalized Mittag-Leffler function E_{gamma,delta}(z) for 0 < gamma < 2 and z <= 0.
/// Laplace-type integral for 0 < gamma < 1 on the negative axis, computed by
/// double-exponential quadrature. Larger delta is lowered by the three-term recurrence.
MlEstimate mittag_leffler_integral(double gamma, double delta, double z,
                                   const SpecFunConfig& cfg = {});

/// Tries the series for |z| <= cfg.ml_crossover and the asymptotic expansion otherwise,
/// falls back to the other regime and then (gamma < 1) to the integral if the first
/// cannot certify cfg.ml_certify_tol, and throws AccuracyLossError if none can.
double mittag_leffler(double gamma, double delta, double z, const SpecFunConfig& cfg = {});

}  // namespace fracdiff
