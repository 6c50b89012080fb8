#include "delaysub/special_functions.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "delaysub/errors.hpp"

namespace delaysub {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kCachedCoefficients = 256;
constexpr long double kLdEps = LDBL_EPSILON;

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  long double sum = 0.0L;
  long double carry = 0.0L;
  void add(long double v) {
    long double t = sum + v;
    if (fabsl(sum) >= fabsl(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  long double value() const { return sum + carry; }
};

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("log_gamma: argument must be finite and > 0, got " + std::to_string(x));
  int sign = 1;
  return ::lgamma_r(x, &sign);  // reentrant: std::lgamma writes the global signgam
}

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError("gamma_fn: argument must be finite and > 0, got " + std::to_string(x));
  return std::tgamma(x);
}

double reciprocal_gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 170.0) return std::exp(-log_gamma(x));
  if (x < -170.0) {
    // reflection: 1/Γ(x) = Γ(1-x) sin(πx)/π
    double s = std::sin(kPi * (x - 2.0 * std::floor(x / 2.0)));
    return s * std::exp(log_gamma(1.0 - x)) / kPi;
  }
  return 1.0 / std::tgamma(x);
}

void MLParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("MLParams: mu must be > 0");
  if (!std::isfinite(nu)) throw DomainError("MLParams: nu must be finite");
  if (!(series_radius > 0.0)) throw DomainError("MLParams: series_radius must be > 0");
  if (!(series_tol > 0.0 && series_tol < 1e-8))
    throw DomainError("MLParams: series_tol must lie in (0, 1e-8)");
}

MittagLeffler::MittagLeffler(const MLParams& params) : params_(params) {
  params_.validate();
  coeff_.reserve(kCachedCoefficients);
  for (std::size_t j = 0; j < kCachedCoefficients; ++j) {
    SeriesCoefficient c{};
    long double arg = static_cast<long double>(j) * params_.mu + params_.nu;
    if (arg > 0.0L) {
      c.positive = true;
      c.log_gamma = lgammal(arg);
    } else {
      c.positive = false;
      c.reciprocal = is_nonpositive_integer(static_cast<double>(arg)) ? 0.0L : 1.0L / tgammal(arg);
    }
    coeff_.push_back(c);
  }
  asym_coeff_.resize(kAsymptoticTerms + 1, 0.0);
  asym_log_size_.resize(kAsymptoticTerms + 1, 0.0);
  int sg = 1;
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    double arg = params_.nu - k * params_.mu;
    asym_coeff_[k] = reciprocal_gamma(arg);
    asym_log_size_[k] = arg > 0.0 ? -lgamma_r(arg, &sg) : lgamma_r(1.0 - arg, &sg) - std::log(kPi);
  }
}

MittagLeffler::SeriesCoefficient MittagLeffler::coefficient(std::size_t j) const {
  if (j < coeff_.size()) return coeff_[j];
  long double arg = static_cast<long double>(j) * params_.mu + params_.nu;
  // past the cache the argument is large and positive for any sane nu
  if (arg > 0.0L) return {lgammal(arg), 0.0L, true};
  return {0.0L, 1.0L / tgammal(arg), false};
}

double MittagLeffler::acceptance_tolerance() const { return std::max(params_.series_tol, 1e-12); }

MLEvaluation MittagLeffler::series(double z) const {
  const double mu = params_.mu, nu = params_.nu;
  if (z == 0.0) return {reciprocal_gamma(nu), 0.0, MLBranch::Series};

  const long double lnz = logl(fabsl(static_cast<long double>(z)));
  // terms grow until j mu + nu ≈ |z|^{1/mu}
  const double peak = std::max(0.0, (std::pow(std::abs(z), 1.0 / mu) - nu) / mu) + 2.0;
  if (peak > 2.0e6)
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
            MLBranch::Series};
  const std::size_t budget = static_cast<std::size_t>(2.0 * peak) + 400;

  CompensatedSum acc;
  long double rounding = 0.0L;
  long double last = 0.0L;
  bool converged = false;
  for (std::size_t j = 0; j < budget; ++j) {
    SeriesCoefficient c = coefficient(j);
    long double term;
    long double weight;
    if (c.positive) {
      long double lnmag = static_cast<long double>(j) * lnz - c.log_gamma;
      term = expl(lnmag);
      if (z < 0.0 && (j & 1U)) term = -term;
      weight = 1.0L + fabsl(static_cast<long double>(j) * lnz) + fabsl(c.log_gamma);
    } else {
      term = powl(static_cast<long double>(z), static_cast<long double>(j)) * c.reciprocal;
      weight = 1.0L + static_cast<long double>(j);
    }
    acc.add(term);
    rounding += 4.0L * kLdEps * weight * fabsl(term);
    last = fabsl(term);
    if (static_cast<double>(j) > peak) {
      long double s = fabsl(acc.value());
      if (last <= params_.series_tol * 1e-3L * s || last == 0.0L) {
        converged = true;
        break;
      }
    }
  }
  long double value = acc.value();
  double err = static_cast<double>(rounding + 2.0L * last);
  if (!converged) err = std::max(err, std::abs(static_cast<double>(value)));
  return {static_cast<double>(value), err, MLBranch::Series};
}

MLEvaluation MittagLeffler::asymptotic(double z) const {
  const double mu = params_.mu, nu = params_.nu;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(z < 0.0) || !(mu < 1.0))
    return {std::numeric_limits<double>::quiet_NaN(), inf, MLBranch::Asymptotic};

  const double x = -z;
  const double lnx = std::log(x);
  CompensatedSum acc;
  // optimal truncation: stop before the size bound starts to grow
  double remainder = inf;
  for (int k = 1; k <= kAsymptoticTerms; ++k) {
    // -z^{-k} = -(-1)^k x^{-k}
    double term = -((k & 1) ? -1.0 : 1.0) * std::exp(-k * lnx) * asym_coeff_[k];
    acc.add(term);
    double next = k < kAsymptoticTerms ? std::exp(-(k + 1) * lnx + asym_log_size_[k + 1]) : inf;
    double here = std::exp(-k * lnx + asym_log_size_[k]);
    if (next >= here || k == kAsymptoticTerms) {
      remainder = next;
      break;
    }
    remainder = next;
  }
  double err = remainder / (1.0 + std::cos(kPi * mu));
  // exponentially small saddle contributions missed by the algebraic expansion;
  // on the negative axis they are only present while cos(pi/mu) < 0
  double c = std::cos(kPi / mu);
  if (c < 0.0) {
    double r = std::pow(x, 1.0 / mu);
    err += (2.0 / mu) * std::pow(x, (1.0 - nu) / mu) * std::exp(c * r);
  }
  return {static_cast<double>(acc.value()), err, MLBranch::Asymptotic};
}

MLEvaluation MittagLeffler::integral(double z) const {
  const double mu = params_.mu, nu = params_.nu;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(z < 0.0) || !(mu < 1.0) || !(nu <= 1.0))
    return {std::numeric_limits<double>::quiet_NaN(), inf, MLBranch::Integral};

  const double x = -z;
  const double sin_nu = std::sin(kPi * nu);
  const double sin_shift = std::sin(kPi * (nu - mu));
  const double cos_mu = std::cos(kPi * mu);
  auto integrand = [=](double r) {
    double rm = std::pow(r, mu);
    double den = rm * rm + 2.0 * x * rm * cos_mu + x * x;
    return std::exp(-r) * std::pow(r, mu - nu) * (rm * sin_nu + x * sin_shift) / den;
  };

  thread_local boost::math::quadrature::tanh_sinh<double> finite_rule;
  thread_local boost::math::quadrature::exp_sinh<double> tail_rule;

  // the denominator is smallest where r^mu ≈ x; split there so both rules see smooth pieces
  double split = std::pow(x, 1.0 / mu);
  if (!(split < 60.0)) split = 1.0;

  double err1 = 0.0, l1_1 = 0.0, err2 = 0.0, l1_2 = 0.0;
  double head = 0.0, tail = 0.0;
  try {
    head = finite_rule.integrate(integrand, 0.0, split, 1e-13, &err1, &l1_1);
    tail = tail_rule.integrate(integrand, split, inf, 1e-13, &err2, &l1_2);
  } catch (const std::exception&) {
    return {std::numeric_limits<double>::quiet_NaN(), inf, MLBranch::Integral};
  }
  double value = (head + tail) / kPi;
  double err = (err1 + err2 + 64.0 * DBL_EPSILON * (l1_1 + l1_2)) / kPi;
  if (!std::isfinite(value)) err = inf;
  return {value, err, MLBranch::Integral};
}

MLEvaluation MittagLeffler::evaluate(double z) const {
  if (std::isnan(z)) throw DomainError("mittag_leffler: argument is NaN");
  if (z == 0.0) return {reciprocal_gamma(params_.nu), 0.0, MLBranch::Series};
  if (z > 0.0) return series(z);

  const double tol = acceptance_tolerance();
  auto good = [&](const MLEvaluation& e, double t) {
    return std::isfinite(e.value) && e.error_estimate <= t * std::max(std::abs(e.value), 1e-300);
  };

  MLEvaluation best{std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::infinity(), MLBranch::Series};
  auto consider = [&](const MLEvaluation& e) {
    if (std::isfinite(e.value) &&
        e.error_estimate / std::max(std::abs(e.value), 1e-300) <
            best.error_estimate / std::max(std::abs(best.value), 1e-300))
      best = e;
  };

  if (-z <= params_.series_radius) {
    MLEvaluation s = series(z);
    if (good(s, tol)) return s;
    consider(s);
  }
  MLEvaluation a = asymptotic(z);
  if (good(a, tol)) return a;
  consider(a);
  MLEvaluation q = integral(z);
  if (good(q, tol)) return q;
  consider(q);

  if (good(best, 1e-8)) return best;
  throw ConvergenceError("mittag_leffler: no branch reached tolerance for mu=" +
                         std::to_string(params_.mu) + ", nu=" + std::to_string(params_.nu) +
                         ", z=" + std::to_string(z));
}

double mittag_leffler(const MLParams& params, double z) { return MittagLeffler(params).evaluate(z).value; }

RelaxationKernel::RelaxationKernel(double alpha, double lambda, double s_max, double tol)
    : alpha_(alpha), lambda_(lambda), s_max_(s_max) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("RelaxationKernel: alpha must be in (0,1)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("RelaxationKernel: lambda must be >= 0");
  if (!(s_max > 0.0)) throw DomainError("RelaxationKernel: s_max must be > 0");
  w_max_ = std::pow(s_max, alpha);

  MLParams mp;
  mp.mu = alpha;
  mp.nu = 1.0;
  MittagLeffler ml(mp);

  for (std::size_t n = 32; n <= 16384; n *= 2) {
    std::vector<double> samples(n);
    for (std::size_t k = 0; k < n; ++k) {
      double xk = std::cos(kPi * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
      double w = 0.5 * (xk + 1.0) * w_max_;
      samples[k] = ml(-lambda * w);
    }
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        s += samples[k] * std::cos(kPi * static_cast<double>(j) * (static_cast<double>(k) + 0.5) /
                                   static_cast<double>(n));
      c[j] = 2.0 * s / static_cast<double>(n);
    }
    c[0] *= 0.5;
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::abs(v));
    double tail = 0.0;
    for (std::size_t j = n - n / 8; j < n; ++j) tail = std::max(tail, std::abs(c[j]));
    if (tail <= tol * scale) {
      std::size_t keep = n;
      while (keep > 1 && std::abs(c[keep - 1]) <= 0.1 * tol * scale) --keep;
      c.resize(keep);
      coeffs_ = std::move(c);
      return;
    }
  }
  throw ConvergenceError("RelaxationKernel: Chebyshev expansion did not converge (lambda * s_max^alpha too large)");
}

double RelaxationKernel::operator()(double s) const {
  if (s <= 0.0) s = 0.0;
  double x = 2.0 * std::pow(s, alpha_) / w_max_ - 1.0;
  // Clenshaw
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = coeffs_.size(); j-- > 1;) {
    double b0 = 2.0 * x * b1 - b2 + coeffs_[j];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + coeffs_[0];
}

}  // namespace delaysub
