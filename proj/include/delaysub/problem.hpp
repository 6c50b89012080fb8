#pragma once

#include <functional>
#include <string>

namespace delaysub {

using SpaceFn = std::function<double(double x)>;
using SpaceTimeFn = std::function<double(double x, double t)>;

/// Source of the forcing. `source` is f(x,t) itself (sampled and integrated by the GL rule);
/// `frac_integral` is an analytic I^{1-alpha} f. Either or both may be present.
struct ForcingProvider {
  SpaceTimeFn source;
  SpaceTimeFn frac_integral;

  bool has_source() const noexcept { return static_cast<bool>(source); }
  bool has_frac_integral() const noexcept { return static_cast<bool>(frac_integral); }
};

/// u_t = d_t^{1-alpha}(p u_xx + a u) + b u(t - tau) + f on (0,L) x (0, K tau],
/// u = phi on [-tau, 0], u = 0 at x = 0, L.
struct ProblemSpec {
  double alpha = 0.5;
  double tau = 1.0;
  int K = 1;
  double p = 1.0;
  double a = 0.0;
  double b = 1.0;
  double L = 1.0;
  SpaceTimeFn phi;          // history on [-tau, 0]
  SpaceFn dt_phi0;          // d/dt phi(x, 0)
  SpaceFn phi_minus_tau;    // phi(x, -tau)
  ForcingProvider forcing;

  /// Throws ConfigurationError naming the violated constraint.
  void validate() const;
  double final_time() const noexcept { return K * tau; }
};

/// Uniform grid rho = tau/N, t_n = n rho for -N <= n <= KN. t_N is exactly tau.
class TimeGrid {
 public:
  TimeGrid(double tau, int N, int K);
  /// N = tau/rho, rejected unless it is an integer (to 1e-9 relative).
  static TimeGrid from_step(double tau, double rho, int K);

  int N() const noexcept { return N_; }
  int K() const noexcept { return K_; }
  double tau() const noexcept { return tau_; }
  double rho() const noexcept { return rho_; }
  int first_index() const noexcept { return -N_; }
  int last_index() const noexcept { return K_ * N_; }
  double t(int n) const noexcept { return tau_ * (static_cast<double>(n) / N_); }

 private:
  double tau_;
  int N_;
  int K_;
  double rho_;
};

}  // namespace delaysub
