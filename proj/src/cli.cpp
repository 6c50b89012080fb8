#include "delaysub/cli.hpp"

#include <spdlog/spdlog.h>

#include "delaysub/errors.hpp"
#include "delaysub/text_output.hpp"

namespace delaysub {

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
  static const std::vector<std::pair<Command, std::string>> table = {
      {Command::Solve, "solve"},         {Command::TemporalStudy, "temporal-study"},
      {Command::SpatialStudy, "spatial-study"}, {Command::Oracle, "oracle"},
      {Command::Probe, "probe"},         {Command::Weights, "weights"},
      {Command::Stability, "stability"},
  };
  return table;
}

template <class T>
const T& require(const std::optional<T>& block, const char* name, Command command) {
  if (!block) throw ConfigurationError(std::string(name) + ": section required by command " + to_string(command));
  return *block;
}

struct Run {
  MeshPtr mesh;
  TimeGrid grid;
  SolutionHistory history;
};

Run solve_problem(const ProblemConfig& problem, const DiscretizationConfig& disc, Command command) {
  if (disc.N == 0) throw ConfigurationError("discretization.N: required by command " + to_string(command));
  if (disc.elements == 0) throw ConfigurationError("discretization.elements: required by command " + to_string(command));
  auto mesh = make_uniform_mesh(problem.spec.L, disc.elements);
  TimeGrid grid(problem.spec.tau, disc.N, problem.spec.K);
  DelaySolver solver(problem.spec, mesh, grid, disc.solver);
  auto history = solver.run();
  return {mesh, grid, std::move(history)};
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    write_text_file(path, content);
    written_.push_back(path);
  }
  std::vector<std::filesystem::path> files() && { return std::move(written_); }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : command_table())
    if (c == command) return name;
  return "?";
}

Command command_from_string(const std::string& s) {
  for (const auto& [c, name] : command_table())
    if (name == s) return c;
  throw ConfigurationError("unknown command '" + s + "'");
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& entry : command_table()) out.push_back(entry.second);
  return out;
}

std::string weights_csv(const WeightsConfig& weights) {
  GLKernel kernel(weights.alpha, weights.rho, weights.n_max);
  const auto& P = kernel.P();
  std::string out = csv_line({"k", "g_alpha", "g_alpha_minus_1", "A", "P"});
  for (int k = 0; k <= weights.n_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out += csv_line({std::to_string(k), format_full(static_cast<double>(kernel.g_alpha()[i])),
                     format_full(static_cast<double>(kernel.g_alpha_minus_1()[i])),
                     format_full(static_cast<double>(kernel.A()[i])), format_full(static_cast<double>(P[i]))});
  }
  return out;
}

std::string stability_csv(const StabilityReport& report) {
  std::string out = csv_line({"n", "t", "l2_norm", "bound"});
  for (const auto& row : report.rows)
    out += csv_line({std::to_string(row.n), format_full(row.t), format_full(row.l2_norm), format_full(row.bound)});
  return out;
}

std::string snapshot_csv(const SolutionHistory& history, int n) {
  const auto& nodes = history.mesh()->nodes();
  const auto values = history.at(n);
  std::string out = csv_line({"x", "u"});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double u = (i == 0 || i + 1 == nodes.size()) ? 0.0 : values[i - 1];
    out += csv_line({format_full(nodes[i]), format_full(u)});
  }
  return out;
}

std::string oracle_csv(const ProblemConfig& problem, const OracleConfig& oracle) {
  SeriesOracle series(problem.spec, problem.modal, oracle.quad);
  std::string out = csv_line({"x", "t", "u"});
  for (double t : oracle.t) {
    std::vector<double> amplitude;
    for (const auto& mode : series.modes()) amplitude.push_back(mode.evaluate(t).value);
    for (double x : oracle.x) {
      double u = 0.0;
      for (std::size_t i = 0; i < amplitude.size(); ++i) u += amplitude[i] * series.modes()[i].mode().shape(x);
      out += csv_line({format_full(x), format_full(t), format_full(u)});
    }
  }
  return out;
}

std::string probe_csv(const ProbeReport& report) {
  std::string out = csv_line({"t", "du_dt_est", "d2u_dt2_est"});
  for (const auto& s : report.samples)
    out += csv_line({format_full(s.t), format_full(s.du_dt_est), format_full(s.d2u_dt2_est)});
  return out;
}

std::vector<std::filesystem::path> dispatch(Command command, const RunConfig& config, const DispatchOptions& options) {
  ArtifactWriter writer(options.out_dir.empty() ? config.output.directory : options.out_dir);
  const auto& name = config.output.name;

  switch (command) {
    case Command::Solve: {
      const auto& problem = require(config.problem, "problem", command);
      auto run = solve_problem(problem, require(config.discretization, "discretization", command), command);
      const int N = run.grid.N(), K = run.grid.K();
      std::vector<int> snapshots = config.output.snapshots;
      if (snapshots.empty())
        for (int k = 0; k <= K; ++k) snapshots.push_back(k * N);
      for (int n : snapshots) {
        if (n < -N || n > K * N)
          throw ConfigurationError("output.snapshots: index " + std::to_string(n) + " outside -N..KN");
        writer.write("solution_" + std::to_string(n) + ".csv", snapshot_csv(run.history, n));
      }
      const auto mass = assemble_mass(*run.mesh);
      std::string norms = csv_line({"n", "t", "l2_norm"});
      for (int n = 0; n <= K * N; ++n)
        norms += csv_line({std::to_string(n), format_full(run.grid.t(n)), format_full(l2_norm(mass, run.history.at(n)))});
      writer.write("norms.csv", norms);
      if (problem.exact) {
        const auto ref = Reference::from_exact(problem.exact);
        std::string errors = csv_line({"window", "window_error", "endpoint_error"});
        for (int k = 1; k <= K; ++k)
          errors += csv_line({std::to_string(k), format_full(window_error(run.history, ref, k)),
                              format_full(endpoint_error(run.history, ref, k))});
        writer.write("errors.csv", errors);
      }
      break;
    }
    case Command::Stability: {
      const auto& problem = require(config.problem, "problem", command);
      const auto& disc = require(config.discretization, "discretization", command);
      auto run = solve_problem(problem, disc, command);
      const auto report = stability_bound_check(run.history, problem.spec, disc.solver);
      writer.write("stability.csv", stability_csv(report));
      spdlog::info("stability bound {} for every n (Lambda = {}, step condition {})",
                   report.holds ? "holds" : "fails", report.lambda, report.step_condition ? "met" : "not met");
      if (!report.holds) spdlog::warn("first violation at n = {}", report.first_violation);
      break;
    }
    case Command::TemporalStudy:
    case Command::SpatialStudy: {
      const auto& problem = require(config.problem, "problem", command);
      const auto& disc = require(config.discretization, "discretization", command);
      const auto& study = require(config.study, "study", command);
      const bool spatial = command == Command::SpatialStudy;
      if (spatial != (study.kind == StudyKind::Spatial))
        throw ConfigurationError("study.kind: " + to_string(study.kind) + " does not match command " + to_string(command));
      StudyOptions opts;
      opts.solver = disc.solver;
      opts.reference = study.reference;
      opts.reference_N = study.reference_N;
      opts.reference_elements = study.reference_elements;
      opts.norm = study.norm;
      opts.jobs = options.jobs;
      const StudyProblem sp{problem.spec, problem.exact};
      ConvergenceReport report;
      if (spatial) {
        if (disc.N == 0) throw ConfigurationError("discretization.N: required by command spatial-study");
        report = spatial_study(sp, disc.N, study.elements_list, study.windows, opts);
      } else {
        if (disc.elements == 0) throw ConfigurationError("discretization.elements: required by command temporal-study");
        report = temporal_study(sp, disc.elements, study.N_list, study.windows, opts,
                                study.kind == StudyKind::TemporalEndpoint);
      }
      if (config.output.csv) writer.write("study_" + name + ".csv", emit_table(report, TableFormat::Csv));
      if (config.output.markdown) writer.write("study_" + name + ".md", emit_table(report, TableFormat::Markdown));
      break;
    }
    case Command::Oracle: {
      const auto& problem = require(config.problem, "problem", command);
      writer.write("oracle.csv", oracle_csv(problem, require(config.oracle, "oracle", command)));
      break;
    }
    case Command::Probe: {
      const auto& problem = require(config.problem, "problem", command);
      const auto& probe = require(config.probe, "probe", command);
      const auto report = singularity_probe(problem.spec, problem.modal, probe.t, probe.quad, probe.x);
      writer.write("probe.csv", probe_csv(report));
      if (report.has_first)
        spdlog::info("slope of |u_t| near 0+: {:.4f} (alpha - 1 = {:.4f})", report.first_derivative_slope, report.alpha - 1);
      if (report.has_second)
        spdlog::info("slope of |u_tt| near tau+: {:.4f} (alpha - 1 = {:.4f})", report.second_derivative_slope,
                     report.alpha - 1);
      break;
    }
    case Command::Weights:
      writer.write("weights.csv", weights_csv(require(config.weights, "weights", command)));
      break;
  }
  return std::move(writer).files();
}

}  // namespace delaysub
