#pragma once

#include <memory>
#include <vector>

#include "delaysub/builtin_problems.hpp"
#include "delaysub/problem.hpp"
#include "delaysub/special_functions.hpp"

namespace delaysub {

struct EigenMode {
  int index = 1;
  double lambda = 0.0;  // p (i pi / L)^2 - a
  double L = 1.0;
  double shape(double x) const;  // sqrt(2/L) sin(i pi x / L)
};

EigenMode eigenpair(const ProblemSpec& spec, int i);

struct QuadSettings {
  int panels = 64;          // refinement knob; doubling it halves the log-width of every graded panel
  int points = 8;           // Gauss-Legendre points per panel: 4, 8 or 16
  double tolerance = 1e-6;  // panel-doubling change that triggers the warning
  int samples = 4096;       // tabulated samples per completed window
  double grading = 0.3;     // ratio of successive panels toward a breakpoint at panels = 64

  void validate() const;
};

struct ModalValue {
  double value = 0.0;              // T_i(t) = (u(., t), X_i)
  double refinement_change = 0.0;  // |value(2 panels) - value(panels)|
  bool tolerance_met = true;
};

/// One sine mode, solved window by window. Earlier windows are tabulated on t = start + tau (j/M)^gamma
/// and interpolated by a cubic B-spline in j; the requested window is integrated directly.
class ModalOracle {
 public:
  ModalOracle(const ProblemSpec& spec, const SineMode& mode, QuadSettings quad = {});

  const EigenMode& mode() const noexcept { return mode_; }
  /// Amplitude of sin(i pi x / L) at time t (history for t <= 0).
  double amplitude(double t) const;
  double amplitude(double t, int panels) const;
  /// Normalized coefficient with a panel-doubling check; warns when the tolerance is missed.
  ModalValue evaluate(double t) const;

 private:
  struct Table;
  double delayed_forcing(double t_prime) const;  // b a(t' - tau) + f_i(t')
  double table_lookup(double t) const;           // 0 < t <= (K-1) tau
  double integrate(double t, int panels) const;

  double alpha_, tau_, b_;
  int K_;
  SineMode source_;
  EigenMode mode_;
  QuadSettings quad_;
  double gamma_;  // tabulation grading exponent
  std::unique_ptr<RelaxationKernel> kernel_;
  std::vector<std::shared_ptr<const Table>> tables_;
  std::vector<double> gl_nodes_, gl_weights_;  // on [0, 1]
};

/// T_i(t) for a single mode.
ModalValue modal_solution(const ProblemSpec& spec, const SineMode& mode, const QuadSettings& quad, double t);

/// Sum over the declared modes; mode oracles are built once and reused.
class SeriesOracle {
 public:
  SeriesOracle(const ProblemSpec& spec, const ModalData& modal, QuadSettings quad = {});
  double operator()(double x, double t) const;
  ModalValue evaluate(double x, double t) const;  // with the refinement check summed over modes
  const std::vector<ModalOracle>& modes() const noexcept { return modes_; }
  double L() const noexcept { return L_; }

 private:
  double L_;
  std::vector<ModalOracle> modes_;
};

double oracle_solution(const ProblemSpec& spec, const ModalData& modal, const QuadSettings& quad, double x, double t);

struct ProbeSample {
  double t;
  double du_dt_est;
  double d2u_dt2_est;
};

struct ProbeReport {
  std::vector<ProbeSample> samples;
  double alpha = 0.0;
  double first_derivative_slope = 0.0;   // d log|u_t| / d log t, two smallest t in (0, tau)
  double second_derivative_slope = 0.0;  // d log|u_tt| / d log(t - tau), two smallest in (tau, 2 tau)
  bool has_first = false;
  bool has_second = false;
  bool first_near_singular = false;   // slope within 0.1 of alpha - 1
  bool second_near_singular = false;
  bool ill_conditioned = false;       // too few points or less than a decade of spread
};

/// Finite-difference derivative estimates of the oracle at x (stencil width 5% of the distance to
/// the previous window seam) and the log-log slopes as t -> 0+ and t -> tau+.
ProbeReport singularity_probe(const ProblemSpec& spec, const ModalData& modal, const std::vector<double>& t_list,
                              const QuadSettings& quad = {}, double x = -1.0);

}  // namespace delaysub
