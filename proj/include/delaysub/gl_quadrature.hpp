#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace delaysub {

/// g_k^(beta) = (-1)^k binom(beta, k), k = 0..n, via g_k = (1 - (beta+1)/k) g_{k-1}.
std::vector<double> gl_weights(double beta, int n);

/// A_k = rho^{-alpha} Γ(k+1-alpha) / (Γ(1-alpha) Γ(k+1)), k = 0..n.
std::vector<double> a_coeffs(double alpha, double rho, int n);

/// Complementary kernel: P_0 = 1/A_0, P_m = (1/A_0) sum_{j<m} P_j (A_{m-j-1} - A_{m-j}).
/// Requires A positive and strictly decreasing. Accumulates in long double.
std::vector<double> p_coeffs(std::span<const double> A, int n);

/// K_{beta,n} = 1 + (1 - n^{1-beta})/(beta - 1)  (beta != 1),  1 + ln n  (beta = 1).
double k_beta(double beta, int n);

/// Coefficient tables for one (alpha, rho, n_max). Immutable once built apart from the
/// lazily computed P table (guarded by call_once), so a shared_ptr<const GLKernel> can be
/// handed to any number of concurrent runs.
///
/// The tables are held in long double: A_{k-1} - A_k is a relative O(alpha/k) difference,
/// and at k ~ 1e4 double storage alone would cost about four digits of it.
class GLKernel {
 public:
  GLKernel(double alpha, double rho, int n_max);

  GLKernel(const GLKernel&) = delete;
  GLKernel& operator=(const GLKernel&) = delete;

  double alpha() const noexcept { return alpha_; }
  double rho() const noexcept { return rho_; }
  int n_max() const noexcept { return n_max_; }

  const std::vector<long double>& g_alpha() const noexcept { return g_alpha_; }
  const std::vector<long double>& g_alpha_minus_1() const noexcept { return g_alpha_minus_1_; }
  const std::vector<long double>& A() const noexcept { return A_; }
  /// P_j, j = 0..n_max. O(n_max^2) on first call.
  const std::vector<long double>& P() const;

  /// A_k rounded to double, for the solver's inner loops.
  const std::vector<double>& A_double() const noexcept { return A_d_; }
  /// A_{m-1} - A_m = -rho^{-alpha} g_m^(alpha) > 0 for m >= 1; entry 0 is unused (0).
  const std::vector<double>& decrements() const noexcept { return dec_d_; }

  /// sum_{k=0}^{n} A_k
  long double sum_A(int n) const;
  /// sum_{k=0}^{n} k A_k
  long double sum_kA(int n) const;

 private:
  double alpha_;
  double rho_;
  int n_max_;
  std::vector<long double> g_alpha_;
  std::vector<long double> g_alpha_minus_1_;
  std::vector<long double> A_;
  std::vector<long double> prefix_A_;
  std::vector<long double> prefix_kA_;
  std::vector<double> A_d_;
  std::vector<double> dec_d_;

  mutable std::once_flag p_once_;
  mutable std::vector<long double> P_;
};

using GLKernelPtr = std::shared_ptr<const GLKernel>;

inline GLKernelPtr make_kernel(double alpha, double rho, int n_max) {
  return std::make_shared<const GLKernel>(alpha, rho, n_max);
}

/// Discrete Caputo derivative, A-form: sum_{k=1}^{n} A_{n-k} (u^k - u^{k-1}).
/// samples[k] = u^k; needs samples.size() > n.
double caputo_gl(const GLKernel& kernel, std::span<const double> samples, int n);

/// Same operator in the GL weight form rho^{-alpha} sum_{k=0}^{n} g_k^(alpha) (u^{n-k} - u^0).
double caputo_gl_weight_form(const GLKernel& kernel, std::span<const double> samples, int n);

/// Discrete fractional integral of order 1-alpha: rho sum_{k=0}^{n} A_k w^{n-k}.
double frac_integral_gl(const GLKernel& kernel, std::span<const double> samples, int n);

/// Same, written rho^{1-alpha} sum_{k=0}^{n} g_{n-k}^(alpha-1) w^k.
double frac_integral_gl_weight_form(const GLKernel& kernel, std::span<const double> samples, int n);

}  // namespace delaysub
