#pragma once

#include <cstddef>
#include <vector>

namespace delaysub {

/// ln Γ(x) for x > 0. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// Γ(x) for x > 0 (overflows to +inf past x ≈ 171.6).
double gamma_fn(double x);

/// 1/Γ(x) for any real x; exactly zero at the poles x = 0, -1, -2, ...
double reciprocal_gamma(double x);

/// Parameters of the two-parameter Mittag-Leffler function E_{mu,nu}(z).
struct MLParams {
  double mu = 1.0;
  double nu = 1.0;
  /// Largest |z| on the negative axis for which the power series is attempted.
  double series_radius = 10.0;
  /// Relative term-size truncation tolerance; also the accuracy a branch must
  /// certify before its value is accepted (floored at 1e-12 for acceptance).
  double series_tol = 1e-15;

  void validate() const;
};

enum class MLBranch { Series, Asymptotic, Integral };

struct MLEvaluation {
  double value = 0.0;
  double error_estimate = 0.0;
  MLBranch branch = MLBranch::Series;
};

/// Real-argument evaluator for E_{mu,nu}(z) = sum_j z^j / Γ(j mu + nu).
///
/// Branches, tried in order for z < 0:
///   * power series in long double with compensated summation, accepted when
///     the rounding estimate (driven by the largest term) is within tolerance;
///   * asymptotic expansion -sum_{k=1}^{k_max} z^{-k}/Γ(nu - k mu) (mu < 1),
///     accepted when the optimally truncated remainder is within tolerance;
///   * the real-line Laplace-type integral representation (mu < 1, nu <= 1)
///     evaluated by double-exponential quadrature.
/// z >= 0 always uses the series (no cancellation).
///
/// Coefficient tables are built in the constructor; evaluation is const and
/// safe to share between threads.
class MittagLeffler {
 public:
  static constexpr int kAsymptoticTerms = 50;

  explicit MittagLeffler(const MLParams& params);

  double operator()(double z) const { return evaluate(z).value; }
  MLEvaluation evaluate(double z) const;

  // Individual branches, exposed for cross-checking. Each returns the value and
  // its own error estimate without applying the acceptance test.
  MLEvaluation series(double z) const;
  MLEvaluation asymptotic(double z) const;
  MLEvaluation integral(double z) const;

  const MLParams& params() const noexcept { return params_; }

 private:
  struct SeriesCoefficient {
    long double log_gamma;   // ln|Γ(j mu + nu)|, used when the argument is positive
    long double reciprocal;  // 1/Γ(j mu + nu) taken directly for non-positive arguments
    bool positive;
  };
  SeriesCoefficient coefficient(std::size_t j) const;
  double acceptance_tolerance() const;

  MLParams params_;
  std::vector<SeriesCoefficient> coeff_;
  std::vector<double> asym_coeff_;     // 1/Γ(nu - k mu), k = 1..kAsymptoticTerms
  std::vector<double> asym_log_size_;  // ln(Γ(k mu - nu + 1)/π), upper bound on ln|1/Γ(nu - k mu)|
};

/// Convenience wrapper constructing a one-shot evaluator.
double mittag_leffler(const MLParams& params, double z);

/// Chebyshev interpolant of s ↦ E_{alpha,1}(-lambda s^alpha) on [0, s_max],
/// built in the smooth variable w = s^alpha. Used as the relaxation kernel of
/// the modal oracle, where it is evaluated millions of times.
class RelaxationKernel {
 public:
  RelaxationKernel(double alpha, double lambda, double s_max, double tol = 1e-14);

  double operator()(double s) const;
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  double s_max() const noexcept { return s_max_; }

 private:
  double alpha_;
  double lambda_;
  double s_max_;
  double w_max_;
  std::vector<double> coeffs_;
};

}  // namespace delaysub
