#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delaysub/delay_solver.hpp"

namespace delaysub {

enum class StudyKind { TemporalWindow, TemporalEndpoint, Spatial };
enum class ReferenceKind { Exact, FineGrid };
/// Nodal: ||I_h u_ref - u_h||_0 with I_h the nodal interpolant on the run's mesh.
/// L2: ||u_ref - u_h||_{L2(0,L)}, integrated over the exact solution or the fine-grid function.
enum class ErrorNorm { Nodal, L2 };

std::string to_string(StudyKind kind);
std::string to_string(ReferenceKind kind);
std::string to_string(ErrorNorm norm);
StudyKind study_kind_from_string(const std::string& s);
ReferenceKind reference_kind_from_string(const std::string& s);
ErrorNorm error_norm_from_string(const std::string& s);

/// Either a closed-form solution or a completed run on a nested finer grid.
struct Reference {
  ReferenceKind kind = ReferenceKind::Exact;
  SpaceTimeFn exact;
  const SolutionHistory* fine = nullptr;

  static Reference from_exact(SpaceTimeFn u) { return {ReferenceKind::Exact, std::move(u), nullptr}; }
  static Reference from_fine(const SolutionHistory& h) { return {ReferenceKind::FineGrid, nullptr, &h}; }
};

/// max over (k-1)N < n <= kN of ||u_ref^n - u_h^n||_0
double window_error(const SolutionHistory& history, const Reference& ref, int k,
                    ErrorNorm norm = ErrorNorm::Nodal);
/// ||u_ref^{kN} - u_h^{kN}||_0
double endpoint_error(const SolutionHistory& history, const Reference& ref, int k,
                      ErrorNorm norm = ErrorNorm::Nodal);
/// Nodal values of the reference at step n restricted to history's mesh; throws if grids do not nest.
std::vector<double> reference_nodes(const SolutionHistory& history, const Reference& ref, int n);

struct ConvergenceRow {
  int N = 0;         // steps per delay window
  int elements = 0;  // spatial elements
  std::vector<double> errors;                // one per window in ConvergenceReport::windows
  std::vector<std::optional<double>> rates;  // against the previous row; empty when undefined

  bool operator==(const ConvergenceRow&) const = default;
};

struct ConvergenceReport {
  StudyKind kind = StudyKind::TemporalWindow;
  double alpha = 0.0;
  double tau = 1.0;
  double L = 1.0;
  ReferenceKind reference = ReferenceKind::Exact;
  int reference_N = 0;         // 0 for an exact reference
  int reference_elements = 0;
  ErrorNorm norm = ErrorNorm::Nodal;
  std::vector<int> windows;
  std::vector<ConvergenceRow> rows;

  bool operator==(const ConvergenceReport&) const = default;
};

/// log2(coarse/fine); empty unless both errors are finite and positive.
std::optional<double> convergence_rate(double coarse, double fine);
/// Fill rates for each consecutive pair with an exact 2x refinement of N (temporal) or elements (spatial).
void compute_rates(ConvergenceReport& report);

struct StudyOptions {
  SolverOptions solver;
  ReferenceKind reference = ReferenceKind::Exact;
  int reference_N = 0;         // 0: 4x the finest N (temporal) or the common N (spatial)
  int reference_elements = 0;  // 0: the finest element count (temporal) or 4x the finest (spatial)
  ErrorNorm norm = ErrorNorm::Nodal;
  int jobs = 1;
};

struct StudyProblem {
  ProblemSpec spec;
  SpaceTimeFn exact;  // required for ReferenceKind::Exact
};

/// Fixed mesh, N doubling. Window errors, or endpoint errors at t = k tau when endpoint is set.
ConvergenceReport temporal_study(const StudyProblem& problem, int elements, const std::vector<int>& N_list,
                                 const std::vector<int>& windows, const StudyOptions& options, bool endpoint = false);
/// Fixed N, elements doubling; endpoint errors at t = k tau.
ConvergenceReport spatial_study(const StudyProblem& problem, int N, const std::vector<int>& elements_list,
                                const std::vector<int>& windows, const StudyOptions& options);

enum class TableFormat { Csv, Markdown };
std::string emit_table(const ConvergenceReport& report, TableFormat format);
/// Inverse of emit_table(report, Csv).
ConvergenceReport parse_report_csv(const std::string& text);

}  // namespace delaysub
