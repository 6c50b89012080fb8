#include "delaysub/builtin_problems.hpp"

#include <cmath>
#include <numbers>

#include "delaysub/errors.hpp"

namespace delaysub {

namespace {

constexpr double kPi = std::numbers::pi;

double pos(double v) { return v > 0.0 ? v : 0.0; }

// (t - c)_+^e, with the convention 0^e = 0 for e > 0
double ramp_pow(double t, double c, double e) {
  double s = t - c;
  return s > 0.0 ? std::pow(s, e) : 0.0;
}

double one_sided_dt(const TimeFn& g, double tau) {
  const double d = 1e-4 * tau;
  return (3.0 * g(0.0) - 4.0 * g(-d) + g(-2.0 * d)) / (2.0 * d);
}

}  // namespace

void attach_modal_data(ProblemSpec& spec, const ModalData& modal) {
  if (modal.modes.empty()) throw ConfigurationError("modal data: at least one sine mode required");
  for (const auto& m : modal.modes) {
    if (m.index < 1) throw ConfigurationError("modal data: mode index must be >= 1");
    if (!m.history || !m.forcing) throw ConfigurationError("modal data: history and forcing amplitudes required");
  }
  const double L = spec.L, tau = spec.tau;
  auto modes = modal.modes;
  spec.phi = [modes, L](double x, double t) {
    double s = 0.0;
    for (const auto& m : modes) s += m.history(t) * std::sin(m.index * kPi * x / L);
    return s;
  };
  std::vector<double> dts;
  for (const auto& m : modes) dts.push_back(m.history_dt ? m.history_dt(0.0) : one_sided_dt(m.history, tau));
  spec.dt_phi0 = [modes, dts, L](double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) s += dts[i] * std::sin(modes[i].index * kPi * x / L);
    return s;
  };
  spec.phi_minus_tau = [modes, L, tau](double x) {
    double s = 0.0;
    for (const auto& m : modes) s += m.history(-tau) * std::sin(m.index * kPi * x / L);
    return s;
  };
  spec.forcing.source = [modes, L](double x, double t) {
    double s = 0.0;
    for (const auto& m : modes) s += m.forcing(t) * std::sin(m.index * kPi * x / L);
    return s;
  };
}

BuiltinProblem example1_case1(double alpha) {
  BuiltinProblem bp;
  bp.name = "example1_case1";
  ProblemSpec& s = bp.spec;
  s.alpha = alpha;
  s.tau = 1.0;
  s.K = 3;
  s.p = 0.2;
  s.a = 0.0;
  s.b = 1.0;
  s.L = 1.0;
  const double c0 = -std::tgamma(alpha + 1.0) / (kPi * kPi);
  const double lambda = s.p * kPi * kPi - s.a;
  const double b = s.b;

  auto T = [=](double t) {
    if (t <= 0.0) return c0;
    return c0 + std::pow(t, alpha) + ramp_pow(t, 1.0, alpha + 1.0) + ramp_pow(t, 2.0, alpha + 2.0);
  };
  auto dT = [=](double t) {
    return alpha * std::pow(t, alpha - 1.0) + (alpha + 1.0) * ramp_pow(t, 1.0, alpha) +
           (alpha + 2.0) * ramp_pow(t, 2.0, alpha + 1.0);
  };
  // Riemann-Liouville derivative of order 1-alpha of T on (0, t]
  const double r0 = c0 / std::tgamma(alpha), r1 = std::tgamma(alpha + 1.0) / std::tgamma(2.0 * alpha),
               r2 = std::tgamma(alpha + 2.0) / std::tgamma(2.0 * alpha + 1.0),
               r3 = std::tgamma(alpha + 3.0) / std::tgamma(2.0 * alpha + 2.0);
  auto rlT = [=](double t) {
    return r0 * std::pow(t, alpha - 1.0) + r1 * std::pow(t, 2.0 * alpha - 1.0) + r2 * ramp_pow(t, 1.0, 2.0 * alpha) +
           r3 * ramp_pow(t, 2.0, 2.0 * alpha + 1.0);
  };
  auto f_amp = [=](double t) { return dT(t) + lambda * rlT(t) - b * T(t - 1.0); };
  const double ga1 = std::tgamma(alpha + 1.0), ga2 = std::tgamma(alpha + 2.0), ga3 = std::tgamma(alpha + 3.0),
               g2a = std::tgamma(2.0 - alpha);
  auto ftilde_amp = [=](double t) {
    const double caputo = ga1 + ga2 * pos(t - 1.0) + ga3 / 2.0 * pos(t - 2.0) * pos(t - 2.0);
    const double delayed =
        c0 * std::pow(t, 1.0 - alpha) / g2a + ga1 * pos(t - 1.0) + ga2 / 2.0 * pos(t - 2.0) * pos(t - 2.0);
    return caputo + lambda * T(t) - b * delayed;
  };

  SineMode m;
  m.index = 1;
  m.history = [c0](double) { return c0; };
  m.history_dt = [](double) { return 0.0; };
  m.forcing = f_amp;
  bp.modal.modes.push_back(m);
  attach_modal_data(s, bp.modal);
  s.forcing.frac_integral = [ftilde_amp](double x, double t) { return ftilde_amp(t) * std::sin(kPi * x); };
  bp.exact = [T](double x, double t) { return T(t) * std::sin(kPi * x); };
  return bp;
}

BuiltinProblem example1_case2(double alpha) {
  BuiltinProblem bp;
  bp.name = "example1_case2";
  ProblemSpec& s = bp.spec;
  s.alpha = alpha;
  s.tau = 1.0;
  s.K = 3;
  s.p = 0.01;
  s.a = -1.0;
  s.b = 1.0;
  s.L = 1.0;

  SineMode m;
  m.index = 1;
  m.history = [](double t) { return 1.0 + 0.1 * t; };
  m.history_dt = [](double) { return 0.1; };
  m.forcing = [](double t) {
    const double s1 = pos(t - 1.0), s2 = pos(t - 2.0);
    return t + s1 * s1 + s2 * s2;
  };
  bp.modal.modes.push_back(m);
  attach_modal_data(s, bp.modal);
  const double g3 = std::tgamma(3.0 - alpha), g4 = std::tgamma(4.0 - alpha);
  s.forcing.frac_integral = [=](double x, double t) {
    const double v = std::pow(t, 2.0 - alpha) / g3 + 2.0 * ramp_pow(t, 1.0, 3.0 - alpha) / g4 +
                     2.0 * ramp_pow(t, 2.0, 3.0 - alpha) / g4;
    return v * std::sin(kPi * x);
  };
  return bp;
}

BuiltinProblem homogeneous_relaxation(double alpha, double p, double a, double b, double amplitude, int K) {
  BuiltinProblem bp;
  bp.name = "homogeneous";
  ProblemSpec& s = bp.spec;
  s.alpha = alpha;
  s.tau = 1.0;
  s.K = K;
  s.p = p;
  s.a = a;
  s.b = b;
  s.L = 1.0;
  const double tau = s.tau;
  SineMode m;
  m.index = 1;
  m.history = [amplitude](double) { return amplitude; };
  m.history_dt = [](double) { return 0.0; };
  m.forcing = [=](double t) { return t <= tau ? -b * amplitude : 0.0; };
  bp.modal.modes.push_back(m);
  attach_modal_data(s, bp.modal);
  const double g = std::tgamma(2.0 - alpha);
  s.forcing.frac_integral = [=](double x, double t) {
    const double v = -b * amplitude * (std::pow(t, 1.0 - alpha) - ramp_pow(t, tau, 1.0 - alpha)) / g;
    return v * std::sin(kPi * x);
  };
  return bp;
}

BuiltinProblem zero_problem(double alpha, int K) {
  BuiltinProblem bp;
  bp.name = "zero";
  ProblemSpec& s = bp.spec;
  s.alpha = alpha;
  s.K = K;
  s.p = 1.0;
  s.a = 0.0;
  s.b = 1.0;
  SineMode m;
  m.history = [](double) { return 0.0; };
  m.history_dt = [](double) { return 0.0; };
  m.forcing = [](double) { return 0.0; };
  bp.modal.modes.push_back(m);
  attach_modal_data(s, bp.modal);
  s.forcing.frac_integral = [](double, double) { return 0.0; };
  bp.exact = [](double, double) { return 0.0; };
  return bp;
}

std::vector<std::string> builtin_problem_names() { return {"example1_case1", "example1_case2", "homogeneous", "zero"}; }

BuiltinProblem builtin_problem(const std::string& name, double alpha) {
  if (name == "example1_case1") return example1_case1(alpha);
  if (name == "example1_case2") return example1_case2(alpha);
  if (name == "homogeneous") return homogeneous_relaxation(alpha, 0.2, 0.0, 1.0, 1.0);
  if (name == "zero") return zero_problem(alpha);
  throw ConfigurationError("problem.name: unknown builtin problem '" + name + "'");
}

}  // namespace delaysub
