#pragma once

#include <functional>
#include <string>
#include <vector>

#include "delaysub/problem.hpp"

namespace delaysub {

using TimeFn = std::function<double(double t)>;

/// One sine component: history and forcing amplitudes of sin(i pi x / L).
struct SineMode {
  int index = 1;
  TimeFn history;     // t in [-tau, 0]
  TimeFn history_dt;  // d/dt history at 0^-; empty means a one-sided difference is used
  TimeFn forcing;  // t in (0, K tau]
};

struct ModalData {
  std::vector<SineMode> modes;
};

struct BuiltinProblem {
  std::string name;
  ProblemSpec spec;
  ModalData modal;
  SpaceTimeFn exact;  // empty when no closed form is known
};

/// tau = 1, p = 1/5, a = 0, b = 1, L = 1, K = 3; closed-form solution with t^alpha,
/// (t-1)^{alpha+1}, (t-2)^{alpha+2} pieces. f is singular at t = 0, so the analytic
/// I^{1-alpha} f is supplied alongside it.
BuiltinProblem example1_case1(double alpha);
/// tau = 1, p = 1/100, a = -1, b = 1, L = 1, K = 3; phi = (1 + t/10) sin(pi x),
/// f = (t + (t-1)_+^2 + (t-2)_+^2) sin(pi x). No closed-form solution.
BuiltinProblem example1_case2(double alpha);
/// phi = c sin(pi x) (constant in time) and f = -b c sin(pi x) on (0, tau], zero after, so the delayed
/// feedback is cancelled in the first window and the solution there is c E_alpha(-lambda t^alpha).
BuiltinProblem homogeneous_relaxation(double alpha, double p, double a, double b, double amplitude, int K = 1);
/// All data zero.
BuiltinProblem zero_problem(double alpha, int K = 1);

/// Names accepted by builtin_problem(): example1_case1, example1_case2, homogeneous, zero.
BuiltinProblem builtin_problem(const std::string& name, double alpha);
std::vector<std::string> builtin_problem_names();

/// Turn modal amplitudes into the spatial callbacks a ProblemSpec needs (phi, dt_phi0 by central
/// derivative, phi(-tau), f). Existing spec fields are overwritten.
void attach_modal_data(ProblemSpec& spec, const ModalData& modal);

}  // namespace delaysub
