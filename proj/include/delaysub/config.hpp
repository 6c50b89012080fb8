#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "delaysub/builtin_problems.hpp"
#include "delaysub/delay_solver.hpp"
#include "delaysub/harness.hpp"
#include "delaysub/series_oracle.hpp"

namespace delaysub {

/// c (t - shift)^power, or c (t - shift)_+^power when positive_part is set.
struct PowerTerm {
  double coeff = 1.0;
  double power = 0.0;
  double shift = 0.0;
  bool positive_part = false;

  double operator()(double t) const;
  double derivative(double t) const;
};

struct ProblemConfig {
  std::string builtin;  // empty for inline sine-mode data
  ProblemSpec spec;
  ModalData modal;
  SpaceTimeFn exact;  // only for builtins with a closed form
};

struct DiscretizationConfig {
  int N = 0;         // steps per delay window
  int elements = 0;  // uniform elements on (0, L)
  SolverOptions solver;
};

struct StudyConfig {
  StudyKind kind = StudyKind::TemporalWindow;
  std::vector<int> N_list;
  std::vector<int> elements_list;
  std::vector<int> windows;  // defaults to 1..K
  ReferenceKind reference = ReferenceKind::Exact;
  int reference_N = 0;
  int reference_elements = 0;
  ErrorNorm norm = ErrorNorm::Nodal;
};

struct OracleConfig {
  std::vector<double> x;
  std::vector<double> t;
  QuadSettings quad;
};

struct ProbeConfig {
  std::vector<double> t;
  double x = -1.0;  // L/2
  QuadSettings quad;
};

struct WeightsConfig {
  double alpha = 0.5;
  double rho = 0.0;
  int n_max = 100;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::string name;  // stem for study files; defaults to the problem name
  bool csv = true;
  bool markdown = true;
  std::vector<int> snapshots;  // step indices for solve; defaults to kN, k = 0..K
};

struct RunConfig {
  std::optional<ProblemConfig> problem;
  std::optional<DiscretizationConfig> discretization;
  std::optional<StudyConfig> study;
  std::optional<OracleConfig> oracle;
  std::optional<ProbeConfig> probe;
  std::optional<WeightsConfig> weights;
  OutputConfig output;
};

/// YAML with sections problem, discretization, study, oracle, probe, weights, output.
/// Throws ConfigurationError naming the line (syntax) or the key path (validation).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace delaysub
