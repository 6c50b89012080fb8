#include "delaysub/gl_quadrature.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "delaysub/errors.hpp"

namespace delaysub {

namespace {

void check_alpha_rho(double alpha, double rho, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError(std::string(who) + ": alpha must lie in (0,1)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError(std::string(who) + ": rho must be > 0");
}

// Γ(k+1-alpha)/(Γ(1-alpha)Γ(k+1)) in extended precision.
std::vector<long double> gamma_ratio_table(long double alpha, int n) {
  std::vector<long double> out(static_cast<std::size_t>(n) + 1);
  const long double inv_g = 1.0L / boost::math::tgamma(1.0L - alpha);
  out[0] = 1.0L;
  for (int k = 1; k <= n; ++k) {
    long double z = static_cast<long double>(k) + 1.0L - alpha;
    out[k] = boost::math::tgamma_delta_ratio(z, alpha) * inv_g;
  }
  return out;
}

void check_samples(std::span<const double> samples, int n, int n_max, const char* who) {
  if (n < 0 || n > n_max)
    throw ConfigurationError(std::string(who) + ": index " + std::to_string(n) + " outside kernel range");
  if (samples.size() <= static_cast<std::size_t>(n))
    throw ConfigurationError(std::string(who) + ": need " + std::to_string(n + 1) + " samples, got " +
                             std::to_string(samples.size()));
}

}  // namespace

std::vector<double> gl_weights(double beta, int n) {
  if (n < 0) throw DomainError("gl_weights: n must be >= 0");
  if (!(beta > -1.0 && beta < 1.0)) throw DomainError("gl_weights: beta must lie in (-1,1)");
  std::vector<double> g(static_cast<std::size_t>(n) + 1);
  long double prev = 1.0L;
  g[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    prev *= 1.0L - (static_cast<long double>(beta) + 1.0L) / k;
    g[k] = static_cast<double>(prev);
  }
  return g;
}

std::vector<double> a_coeffs(double alpha, double rho, int n) {
  check_alpha_rho(alpha, rho, "a_coeffs");
  if (n < 0) throw DomainError("a_coeffs: n must be >= 0");
  auto ratio = gamma_ratio_table(alpha, n);
  const long double scale = powl(rho, -static_cast<long double>(alpha));
  std::vector<double> A(ratio.size());
  for (std::size_t k = 0; k < ratio.size(); ++k) A[k] = static_cast<double>(scale * ratio[k]);
  return A;
}

std::vector<double> p_coeffs(std::span<const double> A, int n) {
  if (n < 0) throw DomainError("p_coeffs: n must be >= 0");
  if (A.size() < static_cast<std::size_t>(n) + 1)
    throw ConfigurationError("p_coeffs: coefficient sequence shorter than n+1");
  const long double inv_a0 = 1.0L / A[0];
  std::vector<long double> P(static_cast<std::size_t>(n) + 1);
  P[0] = inv_a0;
  for (int m = 1; m <= n; ++m) {
    long double s = 0.0L;
    for (int j = 0; j < m; ++j)
      s += P[j] * (static_cast<long double>(A[m - j - 1]) - static_cast<long double>(A[m - j]));
    P[m] = s * inv_a0;
  }
  return {P.begin(), P.end()};
}

double k_beta(double beta, int n) {
  if (!(beta >= 0.0)) throw DomainError("k_beta: beta must be >= 0");
  if (n < 1) throw DomainError("k_beta: n must be >= 1");
  if (beta == 1.0) return 1.0 + std::log(static_cast<double>(n));
  return 1.0 + (1.0 - std::pow(static_cast<double>(n), 1.0 - beta)) / (beta - 1.0);
}

GLKernel::GLKernel(double alpha, double rho, int n_max) : alpha_(alpha), rho_(rho), n_max_(n_max) {
  check_alpha_rho(alpha, rho, "GLKernel");
  if (n_max < 1) throw DomainError("GLKernel: n_max must be >= 1");
  const std::size_t len = static_cast<std::size_t>(n_max) + 1;
  const long double a = alpha;

  g_alpha_.resize(len);
  g_alpha_[0] = 1.0L;
  for (std::size_t k = 1; k < len; ++k) g_alpha_[k] = g_alpha_[k - 1] * (1.0L - (a + 1.0L) / k);

  g_alpha_minus_1_ = gamma_ratio_table(a, n_max);

  const long double scale = powl(static_cast<long double>(rho), -a);
  A_.resize(len);
  for (std::size_t k = 0; k < len; ++k) A_[k] = scale * g_alpha_minus_1_[k];

  prefix_A_.resize(len);
  prefix_kA_.resize(len);
  long double s0 = 0.0L, s1 = 0.0L;
  for (std::size_t k = 0; k < len; ++k) {
    s0 += A_[k];
    s1 += static_cast<long double>(k) * A_[k];
    prefix_A_[k] = s0;
    prefix_kA_[k] = s1;
  }

  A_d_.resize(len);
  dec_d_.assign(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) A_d_[k] = static_cast<double>(A_[k]);
  // from the weights rather than by differencing A: no cancellation at all
  for (std::size_t m = 1; m < len; ++m) dec_d_[m] = static_cast<double>(-scale * g_alpha_[m]);
}

const std::vector<long double>& GLKernel::P() const {
  std::call_once(p_once_, [this] {
    const std::size_t len = static_cast<std::size_t>(n_max_) + 1;
    const long double scale = powl(static_cast<long double>(rho_), -static_cast<long double>(alpha_));
    std::vector<long double> dec(len, 0.0L);
    for (std::size_t m = 1; m < len; ++m) dec[m] = -scale * g_alpha_[m];
    P_.assign(len, 0.0L);
    const long double inv_a0 = 1.0L / A_[0];
    P_[0] = inv_a0;
    for (std::size_t m = 1; m < len; ++m) {
      long double s = 0.0L;
      for (std::size_t j = 0; j < m; ++j) s += P_[j] * dec[m - j];
      P_[m] = s * inv_a0;
    }
  });
  return P_;
}

long double GLKernel::sum_A(int n) const {
  if (n < 0) return 0.0L;
  if (n > n_max_) throw ConfigurationError("GLKernel::sum_A: index beyond n_max");
  return prefix_A_[n];
}

long double GLKernel::sum_kA(int n) const {
  if (n < 0) return 0.0L;
  if (n > n_max_) throw ConfigurationError("GLKernel::sum_kA: index beyond n_max");
  return prefix_kA_[n];
}

double caputo_gl(const GLKernel& kernel, std::span<const double> samples, int n) {
  check_samples(samples, n, kernel.n_max(), "caputo_gl");
  if (n < 1) throw ConfigurationError("caputo_gl: n must be >= 1");
  const auto& A = kernel.A();
  long double s = 0.0L;
  for (int k = 1; k <= n; ++k)
    s += A[n - k] * (static_cast<long double>(samples[k]) - static_cast<long double>(samples[k - 1]));
  return static_cast<double>(s);
}

double caputo_gl_weight_form(const GLKernel& kernel, std::span<const double> samples, int n) {
  check_samples(samples, n, kernel.n_max(), "caputo_gl_weight_form");
  if (n < 1) throw ConfigurationError("caputo_gl_weight_form: n must be >= 1");
  const auto& g = kernel.g_alpha();
  const long double u0 = samples[0];
  long double s = 0.0L;
  for (int k = 0; k <= n; ++k) s += g[k] * (static_cast<long double>(samples[n - k]) - u0);
  return static_cast<double>(s * powl(kernel.rho(), -static_cast<long double>(kernel.alpha())));
}

double frac_integral_gl(const GLKernel& kernel, std::span<const double> samples, int n) {
  check_samples(samples, n, kernel.n_max(), "frac_integral_gl");
  const auto& A = kernel.A();
  long double s = 0.0L;
  for (int k = 0; k <= n; ++k) s += A[k] * static_cast<long double>(samples[n - k]);
  return static_cast<double>(s * kernel.rho());
}

double frac_integral_gl_weight_form(const GLKernel& kernel, std::span<const double> samples, int n) {
  check_samples(samples, n, kernel.n_max(), "frac_integral_gl_weight_form");
  const auto& g = kernel.g_alpha_minus_1();
  long double s = 0.0L;
  for (int k = 0; k <= n; ++k) s += g[n - k] * static_cast<long double>(samples[k]);
  return static_cast<double>(s * powl(kernel.rho(), 1.0L - kernel.alpha()));
}

}  // namespace delaysub
