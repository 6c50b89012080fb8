#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "delaysub/fem1d.hpp"
#include "delaysub/gl_quadrature.hpp"
#include "delaysub/problem.hpp"

namespace delaysub {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Nodal vectors u_h^j, j = -N..KN, one row each (interior dofs as columns).
class SolutionHistory {
 public:
  SolutionHistory(MeshPtr mesh, const TimeGrid& grid);

  const MeshPtr& mesh() const noexcept { return mesh_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  int dofs() const noexcept { return static_cast<int>(data_.cols()); }

  /// Throws ConfigurationError if j is out of range or not yet populated.
  std::span<const double> at(int j) const;
  std::span<double> slot(int j);  // writable, no population check
  void set(int j, std::span<const double> values);
  void mark_populated(int j);
  bool populated(int j) const;
  int last_populated() const noexcept { return last_; }

  FEFunction function(int j) const;
  const RowMatrix& matrix() const noexcept { return data_; }
  RowMatrix& matrix() noexcept { return data_; }
  int row_of(int j) const noexcept { return j + grid_.N(); }

 private:
  MeshPtr mesh_;
  TimeGrid grid_;
  RowMatrix data_;
  int last_;
};

enum class ForcingQuadrature { GrunwaldLetnikov, Analytic };
enum class StepForm { AForm, WeightForm };
/// Which formula of F^n is used at the seam n = N (both must agree).
enum class SeamBranch { Lower, Upper };

struct SolverOptions {
  ForcingQuadrature forcing = ForcingQuadrature::GrunwaldLetnikov;
  SeamBranch seam = SeamBranch::Lower;
  int block = 64;  // steps per blocked history update in run()
};

struct StabilityRow {
  int n;
  double t;
  double l2_norm;
  double bound;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool holds = true;          // ||u_h^n|| <= bound for every n
  double c_history = 0.0;     // sup_{0<=k<=N} ||u_h^{k-N}||
  double lambda = 0.0;        // Λ for the windows past the first
  bool step_condition = true; // rho (2 * 2^alpha Γ(2-alpha) Λ)^{1/alpha} <= 1
  int first_violation = -1;
};

/// Fully discrete scheme: per-step tridiagonal solve of
///   ((A_0 - a) M + p S) U^n = M [ sum_{k=1}^{n-1} (A_{k-1} - A_k) u^{n-k} + A_{n-1} u^0
///                                 + b J^n + b H^n + F^n ].
/// Matrices, the factorization and the coefficient kernel are built once and shared.
class DelaySolver {
 public:
  DelaySolver(ProblemSpec spec, MeshPtr mesh, TimeGrid grid, SolverOptions options = {},
              GLKernelPtr kernel = nullptr);

  const ProblemSpec& spec() const noexcept { return spec_; }
  const MeshPtr& mesh() const noexcept { return mesh_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const GLKernel& kernel() const noexcept { return *kernel_; }
  const GLKernelPtr& kernel_ptr() const noexcept { return kernel_; }
  const TridiagonalMatrix& mass() const noexcept { return mass_; }
  const TridiagonalMatrix& stiffness() const noexcept { return stiffness_; }
  const SolverOptions& options() const noexcept { return options_; }

  SolutionHistory init_history() const;

  /// c1(n) = rho sum_{m=0}^{n-N} A_m (t_{n-m} - tau)  (zero for n < N)
  double history_coeff_dt(int n) const;
  /// c2(n) = -rho sum_{k=0}^{n} A_k
  double history_coeff_const(int n) const;
  FEFunction history_term_H(int n) const;

  /// I^{1-alpha} f at t_n, nodewise (GL over f samples or the analytic provider).
  std::vector<double> forcing_frac_integral(int n) const;
  FEFunction forcing_term_F(int n) const;
  FEFunction forcing_term_F(int n, SeamBranch seam) const;

  /// rho sum_{k=0}^{n} A_k u^{n-N-k}
  std::vector<double> delayed_integral_J(const SolutionHistory& history, int n) const;

  /// One step by direct summation. Requires u^j populated for j < n; stores U^n.
  std::vector<double> step(SolutionHistory& history, int n, StepForm form = StepForm::AForm) const;

  /// All steps n = 1..KN, history sums evaluated blockwise. Throws SolverError with the step index.
  SolutionHistory run() const;
  /// Direct-summation run (reference; O(n) per step with no blocking).
  SolutionHistory run_direct(StepForm form = StepForm::AForm) const;

  StabilityReport stability_bound_check(const SolutionHistory& history) const;

 private:
  double forcing_scalar_const(int n, SeamBranch seam) const;  // coefficient of phi(-tau) in F^n - f~^n
  double forcing_scalar_dt(int n, SeamBranch seam) const;     // coefficient of dt_phi0
  void finish_step(SolutionHistory& history, int n, std::vector<double>& rhs_pre) const;
  void fill_forcing_samples(RowMatrix& samples) const;

  ProblemSpec spec_;
  MeshPtr mesh_;
  TimeGrid grid_;
  SolverOptions options_;
  GLKernelPtr kernel_;
  TridiagonalMatrix mass_;
  TridiagonalMatrix stiffness_;
  TridiagonalMatrix system_;
  TridiagonalFactorization factor_;
  std::vector<double> dt_phi0_nodes_;
  std::vector<double> phi_minus_tau_nodes_;
};

// Free-function forms of the solver operations.
SolutionHistory init_history(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid);
SolutionHistory run(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid, SolverOptions options = {});
StabilityReport stability_bound_check(const SolutionHistory& history, const ProblemSpec& spec,
                                      SolverOptions options = {});

}  // namespace delaysub
