#include "delaysub/delay_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delaysub/errors.hpp"
#include "delaysub/special_functions.hpp"

namespace delaysub {

// ---------------------------------------------------------------- SolutionHistory

SolutionHistory::SolutionHistory(MeshPtr mesh, const TimeGrid& grid)
    : mesh_(std::move(mesh)), grid_(grid), last_(-grid.N() - 1) {
  if (!mesh_) throw ConfigurationError("SolutionHistory: null mesh");
  data_.setZero(grid_.last_index() - grid_.first_index() + 1, mesh_->interior_count());
}

std::span<const double> SolutionHistory::at(int j) const {
  if (j < grid_.first_index() || j > grid_.last_index())
    throw ConfigurationError("SolutionHistory: index " + std::to_string(j) + " outside [-N, KN]");
  if (j > last_) throw ConfigurationError("SolutionHistory: index " + std::to_string(j) + " not populated yet");
  return {data_.row(row_of(j)).data(), static_cast<std::size_t>(data_.cols())};
}

std::span<double> SolutionHistory::slot(int j) {
  if (j < grid_.first_index() || j > grid_.last_index())
    throw ConfigurationError("SolutionHistory: index " + std::to_string(j) + " outside [-N, KN]");
  return {data_.row(row_of(j)).data(), static_cast<std::size_t>(data_.cols())};
}

void SolutionHistory::set(int j, std::span<const double> values) {
  auto dst = slot(j);
  if (values.size() != dst.size()) throw ConfigurationError("SolutionHistory::set: size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw SolverError("non-finite nodal value stored at index " + std::to_string(j), j);
  std::copy(values.begin(), values.end(), dst.begin());
}

void SolutionHistory::mark_populated(int j) {
  if (j != last_ + 1) throw ConfigurationError("SolutionHistory: slots must be filled in order");
  last_ = j;
}

bool SolutionHistory::populated(int j) const { return j >= grid_.first_index() && j <= last_; }

FEFunction SolutionHistory::function(int j) const {
  auto v = at(j);
  return FEFunction(mesh_, std::vector<double>(v.begin(), v.end()));
}

// ---------------------------------------------------------------- helpers

namespace {

std::vector<double> nodal_values(const SpaceFn& g, const MeshPtr& mesh) { return interpolate(g, mesh).values; }

TridiagonalMatrix system_matrix(const TridiagonalMatrix& M, const TridiagonalMatrix& S, double a0, double a,
                                double p) {
  return M.combine(a0 - a, S, p);
}

}  // namespace

// ---------------------------------------------------------------- DelaySolver

DelaySolver::DelaySolver(ProblemSpec spec, MeshPtr mesh, TimeGrid grid, SolverOptions options, GLKernelPtr kernel)
    : spec_((spec.validate(), std::move(spec))),
      mesh_(mesh ? std::move(mesh) : throw ConfigurationError("DelaySolver: null mesh")),
      grid_(grid),
      options_(options),
      kernel_(std::move(kernel)),
      mass_(assemble_mass(*mesh_)),
      stiffness_(assemble_stiffness(*mesh_)),
      system_(system_matrix(mass_, stiffness_, std::pow(grid_.rho(), -spec_.alpha), spec_.a, spec_.p)),
      factor_(system_) {
  if (std::abs(mesh_->length() - spec_.L) > 1e-12 * spec_.L)
    throw ConfigurationError("DelaySolver: mesh length does not match problem.L");
  if (std::abs(grid_.tau() - spec_.tau) > 1e-14 * spec_.tau || grid_.K() != spec_.K)
    throw ConfigurationError("DelaySolver: time grid does not match problem tau/K");
  if (options_.forcing == ForcingQuadrature::Analytic && !spec_.forcing.has_frac_integral())
    throw ConfigurationError("DelaySolver: analytic forcing requested but no I^{1-alpha} f provider");
  if (options_.forcing == ForcingQuadrature::GrunwaldLetnikov && !spec_.forcing.has_source())
    throw ConfigurationError("DelaySolver: GL forcing requested but no f(x,t) provider");
  if (options_.block < 1) throw ConfigurationError("DelaySolver: block must be >= 1");
  if (!kernel_) {
    kernel_ = make_kernel(spec_.alpha, grid_.rho(), grid_.last_index());
  } else if (kernel_->alpha() != spec_.alpha || std::abs(kernel_->rho() - grid_.rho()) > 1e-15 * grid_.rho() ||
             kernel_->n_max() < grid_.last_index()) {
    throw ConfigurationError("DelaySolver: supplied kernel does not match (alpha, rho, KN)");
  }
  dt_phi0_nodes_ = nodal_values(spec_.dt_phi0, mesh_);
  phi_minus_tau_nodes_ = nodal_values(spec_.phi_minus_tau, mesh_);
}

SolutionHistory DelaySolver::init_history() const {
  SolutionHistory h(mesh_, grid_);
  for (int j = grid_.first_index(); j <= 0; ++j) {
    const double t = grid_.t(j);
    auto v = interpolate([&](double x) { return spec_.phi(x, t); }, mesh_);
    h.set(j, v.values);
    h.mark_populated(j);
  }
  return h;
}

double DelaySolver::history_coeff_dt(int n) const {
  const int N = grid_.N();
  if (n < N) return 0.0;
  const int m = n - N;
  const long double rho = grid_.rho();
  // rho sum_{i=0}^{m} A_i (m - i) rho
  return static_cast<double>(rho * rho * (static_cast<long double>(m) * kernel_->sum_A(m) - kernel_->sum_kA(m)));
}

double DelaySolver::history_coeff_const(int n) const {
  return static_cast<double>(-static_cast<long double>(grid_.rho()) * kernel_->sum_A(n));
}

FEFunction DelaySolver::history_term_H(int n) const {
  if (n < 1 || n > grid_.last_index()) throw ConfigurationError("history_term_H: n outside 1..KN");
  const double c1 = history_coeff_dt(n), c2 = history_coeff_const(n);
  std::vector<double> v(dt_phi0_nodes_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c1 * dt_phi0_nodes_[i] + c2 * phi_minus_tau_nodes_[i];
  return FEFunction(mesh_, std::move(v));
}

double DelaySolver::forcing_scalar_const(int n, SeamBranch) const {
  // + b t_n^{1-alpha}/Γ(2-alpha) phi(-tau) on both sides of the seam
  return spec_.b * std::pow(grid_.t(n), 1.0 - spec_.alpha) / std::tgamma(2.0 - spec_.alpha);
}

double DelaySolver::forcing_scalar_dt(int n, SeamBranch seam) const {
  const int N = grid_.N();
  bool upper = n > N || (n == N && seam == SeamBranch::Upper);
  if (!upper) return 0.0;
  double s = grid_.t(n) - grid_.tau();
  return -spec_.b * std::pow(s, 2.0 - spec_.alpha) / std::tgamma(3.0 - spec_.alpha);
}

std::vector<double> DelaySolver::forcing_frac_integral(int n) const {
  if (n < 0 || n > grid_.last_index()) throw ConfigurationError("forcing: n outside 0..KN");
  const int dofs = mesh_->interior_count();
  std::vector<double> out(static_cast<std::size_t>(dofs), 0.0);
  if (options_.forcing == ForcingQuadrature::Analytic) {
    const double t = grid_.t(n);
    for (int i = 0; i < dofs; ++i) out[i] = spec_.forcing.frac_integral(mesh_->interior_node(i), t);
    return out;
  }
  const auto& A = kernel_->A();
  const double rho = grid_.rho();
  for (int i = 0; i < dofs; ++i) {
    const double x = mesh_->interior_node(i);
    long double s = 0.0L;
    for (int k = 0; k <= n; ++k) {
      double f = spec_.forcing.source(x, grid_.t(n - k));
      if (!std::isfinite(f))
        throw ConfigurationError("forcing: f is not finite at t = " + std::to_string(grid_.t(n - k)) +
                                 "; supply an analytic I^{1-alpha} f instead");
      s += A[k] * f;
    }
    out[i] = static_cast<double>(s * rho);
  }
  return out;
}

FEFunction DelaySolver::forcing_term_F(int n) const { return forcing_term_F(n, options_.seam); }

FEFunction DelaySolver::forcing_term_F(int n, SeamBranch seam) const {
  if (n < 1 || n > grid_.last_index()) throw ConfigurationError("forcing_term_F: n outside 1..KN");
  auto v = forcing_frac_integral(n);
  const double sc = forcing_scalar_const(n, seam), sd = forcing_scalar_dt(n, seam);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += sc * phi_minus_tau_nodes_[i] + sd * dt_phi0_nodes_[i];
  return FEFunction(mesh_, std::move(v));
}

std::vector<double> DelaySolver::delayed_integral_J(const SolutionHistory& history, int n) const {
  if (n < 1 || n > grid_.last_index()) throw ConfigurationError("delayed_integral_J: n outside 1..KN");
  const int N = grid_.N();
  const auto& A = kernel_->A();
  const std::size_t dofs = static_cast<std::size_t>(history.dofs());
  std::vector<long double> acc(dofs, 0.0L);
  for (int k = 0; k <= n; ++k) {
    auto u = history.at(n - N - k);
    for (std::size_t i = 0; i < dofs; ++i) acc[i] += A[k] * u[i];
  }
  std::vector<double> out(dofs);
  for (std::size_t i = 0; i < dofs; ++i) out[i] = static_cast<double>(acc[i] * grid_.rho());
  return out;
}

void DelaySolver::finish_step(SolutionHistory& history, int n, std::vector<double>& rhs_pre) const {
  std::vector<double> rhs = mass_.multiply(rhs_pre);
  factor_.solve_in_place(rhs);
  for (double v : rhs)
    if (!std::isfinite(v)) throw SolverError("step " + std::to_string(n) + ": non-finite solution", n);
  history.set(n, rhs);
  history.mark_populated(n);
  rhs_pre.swap(rhs);
}

std::vector<double> DelaySolver::step(SolutionHistory& history, int n, StepForm form) const {
  if (n < 1 || n > grid_.last_index()) throw ConfigurationError("step: n outside 1..KN");
  if (history.last_populated() != n - 1)
    throw ConfigurationError("step: history must be populated exactly up to n-1");
  const std::size_t dofs = static_cast<std::size_t>(history.dofs());
  std::vector<long double> acc(dofs, 0.0L);
  auto u0 = history.at(0);

  if (form == StepForm::AForm) {
    const auto& A = kernel_->A();
    for (int k = 1; k <= n - 1; ++k) {
      long double w = A[k - 1] - A[k];
      auto u = history.at(n - k);
      for (std::size_t i = 0; i < dofs; ++i) acc[i] += w * u[i];
    }
    for (std::size_t i = 0; i < dofs; ++i) acc[i] += A[n - 1] * u0[i];
  } else {
    const auto& g = kernel_->g_alpha();
    const long double scale = powl(grid_.rho(), -static_cast<long double>(spec_.alpha));
    long double gsum = 0.0L;
    for (int k = 0; k <= n - 1; ++k) gsum += g[k];
    for (int k = 1; k <= n - 1; ++k) {
      auto u = history.at(n - k);
      for (std::size_t i = 0; i < dofs; ++i) acc[i] -= scale * g[k] * u[i];
    }
    for (std::size_t i = 0; i < dofs; ++i) acc[i] += scale * gsum * u0[i];
  }

  auto J = delayed_integral_J(history, n);
  auto H = history_term_H(n);
  auto F = forcing_term_F(n);
  std::vector<double> rhs_pre(dofs);
  for (std::size_t i = 0; i < dofs; ++i)
    rhs_pre[i] = static_cast<double>(acc[i]) + spec_.b * (J[i] + H.values[i]) + F.values[i];
  finish_step(history, n, rhs_pre);
  return rhs_pre;
}

void DelaySolver::fill_forcing_samples(RowMatrix& samples) const {
  const int total = grid_.last_index();
  const int dofs = mesh_->interior_count();
  samples.resize(total + 1, dofs);
  for (int m = 0; m <= total; ++m) {
    const double t = grid_.t(m);
    for (int i = 0; i < dofs; ++i) {
      double f = spec_.forcing.source(mesh_->interior_node(i), t);
      if (!std::isfinite(f))
        throw ConfigurationError("forcing: f is not finite at t = " + std::to_string(t) +
                                 "; supply an analytic I^{1-alpha} f instead");
      samples(m, i) = f;
    }
  }
}

SolutionHistory DelaySolver::run() const {
  SolutionHistory history = init_history();
  const int N = grid_.N();
  const int total = grid_.last_index();
  const int dofs = history.dofs();
  const double rho = grid_.rho();
  const double b = spec_.b;
  const auto& A = kernel_->A_double();
  const auto& D = kernel_->decrements();
  const bool gl_forcing = options_.forcing == ForcingQuadrature::GrunwaldLetnikov;

  RowMatrix fsamples;
  if (gl_forcing) fill_forcing_samples(fsamples);

  RowMatrix& U = history.matrix();
  RowMatrix W, Wf, R;
  std::vector<double> rhs_pre(static_cast<std::size_t>(dofs));

  for (int n0 = 1; n0 <= total; n0 += options_.block) {
    const int nb = std::min(options_.block, total - n0 + 1);
    // rows of U strictly before the block: j = -N .. n0-1
    const int n_old = n0 + N;
    W.setZero(nb, n_old);
    for (int r = 0; r < nb; ++r) {
      const int n = n0 + r;
      for (int j = 1; j <= n0 - 1; ++j) W(r, j + N) += D[n - j];
      W(r, N) += A[n - 1];
      const int jmax = std::min(n - N, n0 - 1);
      for (int j = -N; j <= jmax; ++j) W(r, j + N) += b * rho * A[n - N - j];
    }
    R.noalias() = W * U.topRows(n_old);

    if (gl_forcing) {
      const int cols = n0 + nb;  // sample rows 0 .. n0+nb-1
      Wf.setZero(nb, cols);
      for (int r = 0; r < nb; ++r) {
        const int n = n0 + r;
        for (int m = 0; m <= n; ++m) Wf(r, m) = rho * A[n - m];
      }
      R.noalias() += Wf * fsamples.topRows(cols);
    }

    for (int r = 0; r < nb; ++r) {
      const int n = n0 + r;
      for (int i = 0; i < dofs; ++i) rhs_pre[i] = R(r, i);
      for (int j = n0; j <= n - 1; ++j) {
        const double w = D[n - j];
        const double* u = U.row(j + N).data();
        for (int i = 0; i < dofs; ++i) rhs_pre[i] += w * u[i];
      }
      for (int j = n0; j <= n - N; ++j) {
        const double w = b * rho * A[n - N - j];
        const double* u = U.row(j + N).data();
        for (int i = 0; i < dofs; ++i) rhs_pre[i] += w * u[i];
      }
      const double c1 = history_coeff_dt(n), c2 = history_coeff_const(n);
      const double sc = forcing_scalar_const(n, options_.seam), sd = forcing_scalar_dt(n, options_.seam);
      const double w_dt = b * c1 + sd, w_const = b * c2 + sc;
      for (int i = 0; i < dofs; ++i) rhs_pre[i] += w_dt * dt_phi0_nodes_[i] + w_const * phi_minus_tau_nodes_[i];
      if (!gl_forcing) {
        const double t = grid_.t(n);
        for (int i = 0; i < dofs; ++i) rhs_pre[i] += spec_.forcing.frac_integral(mesh_->interior_node(i), t);
      }
      finish_step(history, n, rhs_pre);
    }
  }
  return history;
}

SolutionHistory DelaySolver::run_direct(StepForm form) const {
  SolutionHistory history = init_history();
  for (int n = 1; n <= grid_.last_index(); ++n) step(history, n, form);
  return history;
}

StabilityReport DelaySolver::stability_bound_check(const SolutionHistory& history) const {
  const int N = grid_.N();
  const int total = grid_.last_index();
  const double alpha = spec_.alpha;
  const double rho = grid_.rho();
  const double babs = std::abs(spec_.b);
  if (history.last_populated() < total) throw ConfigurationError("stability_bound_check: run not complete");

  StabilityReport rep;
  for (int j = -N; j <= 0; ++j) rep.c_history = std::max(rep.c_history, l2_norm(mass_, history.at(j)));
  const double phi_tau_norm = l2_norm(mass_, phi_minus_tau_nodes_);
  const double u0_norm = l2_norm(mass_, history.at(0));
  const double g2 = std::tgamma(2.0 - alpha);
  rep.lambda = babs * (std::pow(rho, 1.0 - alpha) + std::pow(grid_.K() * grid_.tau(), 1.0 - alpha) / g2);
  rep.step_condition =
      rho * std::pow(2.0 * std::pow(2.0, alpha) * g2 * rep.lambda, 1.0 / alpha) <= 1.0 || grid_.K() == 1;

  MLParams mp;
  mp.mu = alpha;
  MittagLeffler ml(mp);

  double ymax = 0.0;
  for (int n = 1; n <= total; ++n) {
    auto F = forcing_term_F(n);
    const double Fn = l2_norm(mass_, F.values);
    double y;
    if (n <= N) {
      y = babs * (std::pow(rho, 1.0 - alpha) + std::pow(grid_.t(n), 1.0 - alpha) / g2) * (rep.c_history + phi_tau_norm) +
          Fn;
    } else {
      auto H = history_term_H(n);
      long double window = kernel_->sum_A(n) - kernel_->sum_A(n - N - 1);  // sum_{j=0}^{N} A_{n-j}
      y = rep.c_history * babs * rho * static_cast<double>(window) + babs * l2_norm(mass_, H.values) + Fn;
    }
    ymax = std::max(ymax, y);
    const double tn = grid_.t(n);
    const double lam = n <= N ? 0.0 : rep.lambda;
    const double growth = 2.0 * ml(std::pow(2.0, alpha + 1.0) * lam * std::pow(tn, alpha));
    const double bound = growth * (u0_norm + std::pow(2.0, alpha) * std::pow(tn, alpha) / std::tgamma(1.0 + alpha) * ymax);
    const double norm = l2_norm(mass_, history.at(n));
    rep.rows.push_back({n, tn, norm, bound});
    if (!(norm <= bound)) {
      if (rep.holds) rep.first_violation = n;
      rep.holds = false;
    }
  }
  return rep;
}

// ---------------------------------------------------------------- free functions

SolutionHistory init_history(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid) {
  spec.validate();
  SolutionHistory h(mesh, grid);
  for (int j = grid.first_index(); j <= 0; ++j) {
    const double t = grid.t(j);
    h.set(j, interpolate([&](double x) { return spec.phi(x, t); }, mesh).values);
    h.mark_populated(j);
  }
  return h;
}

SolutionHistory run(const ProblemSpec& spec, MeshPtr mesh, const TimeGrid& grid, SolverOptions options) {
  return DelaySolver(spec, std::move(mesh), grid, options).run();
}

StabilityReport stability_bound_check(const SolutionHistory& history, const ProblemSpec& spec, SolverOptions options) {
  DelaySolver solver(spec, history.mesh(), history.grid(), options);
  return solver.stability_bound_check(history);
}

}  // namespace delaysub
