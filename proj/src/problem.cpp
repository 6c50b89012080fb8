#include "delaysub/problem.hpp"

#include <cmath>
#include <string>

#include "delaysub/errors.hpp"

namespace delaysub {

void ProblemSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigurationError("problem.alpha: must satisfy 0 < alpha < 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigurationError("problem.tau: must be > 0");
  if (K < 1) throw ConfigurationError("problem.K: must be >= 1");
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigurationError("problem.p: must be > 0");
  if (!(a <= 0.0) || !std::isfinite(a)) throw ConfigurationError("problem.a: must satisfy a ≤ 0");
  if (!(b != 0.0) || !std::isfinite(b)) throw ConfigurationError("problem.b: must satisfy b ≠ 0");
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigurationError("problem.L: must be > 0");
  if (!phi) throw ConfigurationError("problem.phi: history function missing");
  if (!dt_phi0) throw ConfigurationError("problem.dt_phi0: d/dt phi(x,0) missing");
  if (!phi_minus_tau) throw ConfigurationError("problem.phi_minus_tau: phi(x,-tau) missing");
  if (!forcing.has_source() && !forcing.has_frac_integral())
    throw ConfigurationError("problem.forcing: no forcing provider");
  for (int i = 0; i <= 8; ++i) {
    double t = -tau * i / 8.0;
    double left = phi(0.0, t), right = phi(L, t);
    if (std::abs(left) > 1e-12 || std::abs(right) > 1e-12)
      throw ConfigurationError("problem.phi: history must vanish at x = 0 and x = L");
  }
}

TimeGrid::TimeGrid(double tau, int N, int K) : tau_(tau), N_(N), K_(K), rho_(tau / N) {
  if (!(tau > 0.0)) throw ConfigurationError("discretization: tau must be > 0");
  if (N < 2) throw ConfigurationError("discretization.N: must be an integer >= 2");
  if (K < 1) throw ConfigurationError("discretization: K must be >= 1");
}

TimeGrid TimeGrid::from_step(double tau, double rho, int K) {
  if (!(rho > 0.0)) throw ConfigurationError("discretization.rho: must be > 0");
  double ratio = tau / rho;
  double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio)
    throw ConfigurationError("discretization.rho: tau/rho = " + std::to_string(ratio) +
                             " is not an integer number of steps");
  return TimeGrid(tau, static_cast<int>(rounded), K);
}

}  // namespace delaysub
