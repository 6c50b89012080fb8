#include "delaysub/harness.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "delaysub/errors.hpp"
#include "delaysub/text_output.hpp"

namespace delaysub {

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::TemporalWindow: return "temporal-window";
    case StudyKind::TemporalEndpoint: return "temporal-endpoint";
    case StudyKind::Spatial: return "spatial";
  }
  return "?";
}

std::string to_string(ReferenceKind kind) { return kind == ReferenceKind::Exact ? "exact" : "fine-grid"; }

std::string to_string(ErrorNorm norm) { return norm == ErrorNorm::Nodal ? "nodal" : "l2"; }

ErrorNorm error_norm_from_string(const std::string& s) {
  if (s == "nodal") return ErrorNorm::Nodal;
  if (s == "l2") return ErrorNorm::L2;
  throw ConfigurationError("error norm '" + s + "' is not nodal or l2");
}

StudyKind study_kind_from_string(const std::string& s) {
  if (s == "temporal-window") return StudyKind::TemporalWindow;
  if (s == "temporal-endpoint") return StudyKind::TemporalEndpoint;
  if (s == "spatial") return StudyKind::Spatial;
  throw ConfigurationError("study kind '" + s + "' is not temporal-window, temporal-endpoint or spatial");
}

ReferenceKind reference_kind_from_string(const std::string& s) {
  if (s == "exact") return ReferenceKind::Exact;
  if (s == "fine-grid" || s == "fine") return ReferenceKind::FineGrid;
  throw ConfigurationError("reference kind '" + s + "' is not exact or fine-grid");
}

// ---------------------------------------------------------------- errors

std::vector<double> reference_nodes(const SolutionHistory& history, const Reference& ref, int n) {
  const auto& mesh = *history.mesh();
  const auto& grid = history.grid();
  if (ref.kind == ReferenceKind::Exact) {
    if (!ref.exact) throw ConfigurationError("reference: exact solution missing");
    const double t = grid.t(n);
    std::vector<double> v(static_cast<std::size_t>(mesh.interior_count()));
    for (int i = 0; i < mesh.interior_count(); ++i) v[i] = ref.exact(mesh.interior_node(i), t);
    return v;
  }
  if (!ref.fine) throw ConfigurationError("reference: fine history missing");
  const auto& fine = *ref.fine;
  const auto& fgrid = fine.grid();
  const auto& fmesh = *fine.mesh();
  if (std::abs(fgrid.tau() - grid.tau()) > 1e-14 * grid.tau() || fgrid.K() < grid.K() || fgrid.N() % grid.N() != 0)
    throw ConfigurationError("reference: fine time grid does not nest (N_fine must be a multiple of N)");
  if (fmesh.elements() % mesh.elements() != 0 || std::abs(fmesh.length() - mesh.length()) > 1e-12 * mesh.length())
    throw ConfigurationError("reference: fine mesh does not nest (element count must be a multiple)");
  const int tstride = fgrid.N() / grid.N();
  const int xstride = fmesh.elements() / mesh.elements();
  auto row = fine.at(n * tstride);
  std::vector<double> v(static_cast<std::size_t>(mesh.interior_count()));
  for (int i = 0; i < mesh.interior_count(); ++i) {
    const int fi = (i + 1) * xstride - 1;
    if (std::abs(fmesh.interior_node(fi) - mesh.interior_node(i)) > 1e-12 * mesh.length())
      throw ConfigurationError("reference: coarse node not present in the fine mesh");
    v[i] = row[fi];
  }
  return v;
}

namespace {

// Everything the per-step error needs that does not depend on n.
class ErrorMeter {
 public:
  ErrorMeter(const SolutionHistory& history, const Reference& ref, ErrorNorm norm)
      : history_(history), ref_(ref), norm_(norm), mass_(assemble_mass(*history.mesh())) {
    if (norm_ == ErrorNorm::L2 && ref_.kind == ReferenceKind::FineGrid) {
      if (!ref_.fine) throw ConfigurationError("reference: fine history missing");
      fine_mass_ = assemble_mass(*ref_.fine->mesh());
      reference_nodes(history_, ref_, 0);  // nesting checks
    }
  }

  double operator()(int n) const {
    if (norm_ == ErrorNorm::Nodal) {
      auto r = reference_nodes(history_, ref_, n);
      auto u = history_.at(n);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= u[i];
      return l2_norm(mass_, r);
    }
    return ref_.kind == ReferenceKind::Exact ? exact_l2(n) : fine_l2(n);
  }

 private:
  // 6-point Gauss per element; the integrand is smooth inside each element.
  double exact_l2(int n) const {
    if (!ref_.exact) throw ConfigurationError("reference: exact solution missing");
    using Rule = boost::math::quadrature::gauss<double, 6>;
    const auto& x = history_.mesh()->nodes();
    const auto u = history_.at(n);
    const double t = history_.grid().t(n);
    const std::size_t last = x.size() - 1;
    double sum = 0.0;
    for (std::size_t e = 0; e < last; ++e) {
      const double left = e == 0 ? 0.0 : u[e - 1], right = e + 1 == last ? 0.0 : u[e];
      const double half = 0.5 * (x[e + 1] - x[e]), mid = 0.5 * (x[e + 1] + x[e]);
      double local = 0.0;
      for (std::size_t q = 0; q < Rule::abscissa().size(); ++q) {
        for (double sign : {-1.0, 1.0}) {
          if (q == 0 && sign > 0.0 && Rule::abscissa()[0] == 0.0) continue;
          const double s = sign * Rule::abscissa()[q];
          const double uh = 0.5 * ((1.0 - s) * left + (1.0 + s) * right);
          const double d = ref_.exact(mid + half * s, t) - uh;
          local += Rule::weights()[q] * d * d;
        }
      }
      sum += half * local;
    }
    return std::sqrt(sum);
  }

  // The run's function is linear on every fine element, so the difference is exact in the fine P1 space.
  double fine_l2(int n) const {
    const auto& fine = *ref_.fine;
    const int xstride = fine.mesh()->elements() / history_.mesh()->elements();
    const int tstride = fine.grid().N() / history_.grid().N();
    const auto f = fine.at(n * tstride);
    const auto u = history_.at(n);
    const int coarse_last = history_.mesh()->elements();
    std::vector<double> d(f.begin(), f.end());
    for (std::size_t j = 0; j < d.size(); ++j) {
      const int node = static_cast<int>(j) + 1;  // fine node index
      const int e = node / xstride, offset = node % xstride;
      const double left = e == 0 ? 0.0 : u[static_cast<std::size_t>(e) - 1];
      const double right = offset == 0 ? left : (e + 1 == coarse_last ? 0.0 : u[static_cast<std::size_t>(e)]);
      const double w = static_cast<double>(offset) / xstride;
      d[j] -= (1.0 - w) * left + w * right;
    }
    return l2_norm(fine_mass_, d);
  }

  const SolutionHistory& history_;
  const Reference& ref_;
  ErrorNorm norm_;
  TridiagonalMatrix mass_;
  TridiagonalMatrix fine_mass_;
};

void check_window(const SolutionHistory& history, int k) {
  if (k < 1 || k > history.grid().K()) throw ConfigurationError("window k must lie in 1..K");
}

}  // namespace

double window_error(const SolutionHistory& history, const Reference& ref, int k, ErrorNorm norm) {
  check_window(history, k);
  const ErrorMeter meter(history, ref, norm);
  const int N = history.grid().N();
  double e = 0.0;
  for (int n = (k - 1) * N + 1; n <= k * N; ++n) e = std::max(e, meter(n));
  return e;
}

double endpoint_error(const SolutionHistory& history, const Reference& ref, int k, ErrorNorm norm) {
  check_window(history, k);
  return ErrorMeter(history, ref, norm)(k * history.grid().N());
}

// ---------------------------------------------------------------- rates

std::optional<double> convergence_rate(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0) || !std::isfinite(coarse) || !std::isfinite(fine)) return std::nullopt;
  return std::log2(coarse / fine);
}

void compute_rates(ConvergenceReport& report) {
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    auto& row = report.rows[r];
    row.rates.assign(row.errors.size(), std::nullopt);
    if (r == 0) continue;
    const auto& prev = report.rows[r - 1];
    const bool doubled = report.kind == StudyKind::Spatial
                             ? (row.elements == 2 * prev.elements && row.N == prev.N)
                             : (row.N == 2 * prev.N && row.elements == prev.elements);
    if (!doubled) continue;
    for (std::size_t w = 0; w < row.errors.size() && w < prev.errors.size(); ++w)
      row.rates[w] = convergence_rate(prev.errors[w], row.errors[w]);
  }
}

// ---------------------------------------------------------------- studies

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void check_doubling(const std::vector<int>& list, const char* what) {
  if (list.empty()) throw ConfigurationError(std::string("study: ") + what + " is empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i] < 1) throw ConfigurationError(std::string("study: ") + what + " entries must be positive");
    if (i && list[i] != 2 * list[i - 1])
      throw ConfigurationError(std::string("study: ") + what + " must double from one entry to the next");
  }
}

void check_windows(const std::vector<int>& windows, int K) {
  if (windows.empty()) throw ConfigurationError("study: windows is empty");
  for (int k : windows)
    if (k < 1 || k > K) throw ConfigurationError("study: window " + std::to_string(k) + " outside 1..K");
}

SolutionHistory solve(const ProblemSpec& spec, int elements, int N, const SolverOptions& opt,
                      GLKernelPtr kernel = nullptr) {
  DelaySolver solver(spec, make_uniform_mesh(spec.L, elements), TimeGrid(spec.tau, N, spec.K), opt,
                     std::move(kernel));
  return solver.run();
}

}  // namespace

ConvergenceReport temporal_study(const StudyProblem& problem, int elements, const std::vector<int>& N_list,
                                 const std::vector<int>& windows, const StudyOptions& options, bool endpoint) {
  check_doubling(N_list, "N_list");
  check_windows(windows, problem.spec.K);
  ConvergenceReport rep;
  rep.kind = endpoint ? StudyKind::TemporalEndpoint : StudyKind::TemporalWindow;
  rep.alpha = problem.spec.alpha;
  rep.tau = problem.spec.tau;
  rep.L = problem.spec.L;
  rep.reference = options.reference;
  rep.norm = options.norm;
  rep.windows = windows;

  std::optional<SolutionHistory> fine;
  Reference ref = Reference::from_exact(problem.exact);
  if (options.reference == ReferenceKind::FineGrid) {
    rep.reference_N = options.reference_N > 0 ? options.reference_N : 4 * N_list.back();
    rep.reference_elements = options.reference_elements > 0 ? options.reference_elements : elements;
    fine.emplace(solve(problem.spec, rep.reference_elements, rep.reference_N, options.solver));
    ref = Reference::from_fine(*fine);
  } else if (!problem.exact) {
    throw ConfigurationError("study: exact reference requested but the problem has no closed-form solution");
  }

  rep.rows.resize(N_list.size());
  parallel_for(static_cast<int>(N_list.size()), options.jobs, [&](int i) {
    auto h = solve(problem.spec, elements, N_list[i], options.solver);
    ConvergenceRow row;
    row.N = N_list[i];
    row.elements = elements;
    for (int k : windows)
      row.errors.push_back(endpoint ? endpoint_error(h, ref, k, options.norm) : window_error(h, ref, k, options.norm));
    rep.rows[i] = std::move(row);
  });
  compute_rates(rep);
  return rep;
}

ConvergenceReport spatial_study(const StudyProblem& problem, int N, const std::vector<int>& elements_list,
                                const std::vector<int>& windows, const StudyOptions& options) {
  check_doubling(elements_list, "h_list");
  check_windows(windows, problem.spec.K);
  ConvergenceReport rep;
  rep.kind = StudyKind::Spatial;
  rep.alpha = problem.spec.alpha;
  rep.tau = problem.spec.tau;
  rep.L = problem.spec.L;
  rep.reference = options.reference;
  rep.norm = options.norm;
  rep.windows = windows;

  TimeGrid grid(problem.spec.tau, N, problem.spec.K);
  auto kernel = make_kernel(problem.spec.alpha, grid.rho(), grid.last_index());
  std::optional<SolutionHistory> fine;
  Reference ref = Reference::from_exact(problem.exact);
  if (options.reference == ReferenceKind::FineGrid) {
    rep.reference_N = options.reference_N > 0 ? options.reference_N : N;
    rep.reference_elements = options.reference_elements > 0 ? options.reference_elements : 4 * elements_list.back();
    fine.emplace(solve(problem.spec, rep.reference_elements, rep.reference_N, options.solver,
                       rep.reference_N == N ? kernel : nullptr));
    ref = Reference::from_fine(*fine);
  } else if (!problem.exact) {
    throw ConfigurationError("study: exact reference requested but the problem has no closed-form solution");
  }

  rep.rows.resize(elements_list.size());
  parallel_for(static_cast<int>(elements_list.size()), options.jobs, [&](int i) {
    auto h = solve(problem.spec, elements_list[i], N, options.solver, kernel);
    ConvergenceRow row;
    row.N = N;
    row.elements = elements_list[i];
    for (int k : windows) row.errors.push_back(endpoint_error(h, ref, k, options.norm));
    rep.rows[i] = std::move(row);
  });
  compute_rates(rep);
  return rep;
}

// ---------------------------------------------------------------- tables

namespace {

const std::vector<std::string> kCsvHeader = {"kind",     "alpha",  "tau",    "L",     "reference",
                                             "reference_N", "reference_elements", "norm", "N", "elements",
                                             "window",   "error",  "rate"};

std::string mesh_label(int elements, double L) {
  if (L == 1.0) return "1/" + std::to_string(elements);
  return format_full(L / elements);
}

}  // namespace

std::string emit_table(const ConvergenceReport& report, TableFormat format) {
  std::string out;
  if (format == TableFormat::Csv) {
    out += csv_line(kCsvHeader);
    for (const auto& row : report.rows)
      for (std::size_t w = 0; w < report.windows.size(); ++w) {
        const auto& rate = w < row.rates.size() ? row.rates[w] : std::nullopt;
        out += csv_line({to_string(report.kind), format_full(report.alpha), format_full(report.tau),
                         format_full(report.L), to_string(report.reference), std::to_string(report.reference_N),
                         std::to_string(report.reference_elements), to_string(report.norm), std::to_string(row.N),
                         std::to_string(row.elements), std::to_string(report.windows[w]),
                         format_full(row.errors[w]), rate ? format_full(*rate) : std::string()});
      }
    return out;
  }

  const bool spatial = report.kind == StudyKind::Spatial;
  const char* rate_name = spatial ? "rate_s" : "rate_t";
  const char* err_name = report.kind == StudyKind::TemporalWindow ? "E(h,N,k=" : "‖u^{kN}-u_h^{kN}‖ (k=";
  out += "alpha = " + format_fixed(report.alpha, 2) + ", ";
  if (report.rows.empty()) {
    out += spatial ? "N fixed" : "h fixed";
  } else if (spatial) {
    out += "rho = " + format_full(report.tau / report.rows.front().N);
  } else {
    out += "h = " + mesh_label(report.rows.front().elements, report.L);
  }
  out += ", reference: " + to_string(report.reference);
  if (report.reference == ReferenceKind::FineGrid)
    out += " (N_ref = " + std::to_string(report.reference_N) +
           ", h_ref = " + mesh_label(report.reference_elements, report.L) + ")";
  if (report.norm == ErrorNorm::L2) out += ", norm: L2(0,L) of u - u_h";
  out += "\n\n";
  out += spatial ? "| h |" : "| N |";
  std::string rule = "|---|";
  for (int k : report.windows) {
    out += " " + std::string(err_name) + std::to_string(k) + ") | " + rate_name + " |";
    rule += "---|---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& row : report.rows) {
    out += "| " + (spatial ? mesh_label(row.elements, report.L) : std::to_string(row.N)) + " |";
    for (std::size_t w = 0; w < report.windows.size(); ++w) {
      const auto& rate = w < row.rates.size() ? row.rates[w] : std::nullopt;
      out += " " + format_sci5(row.errors[w]) + " | " + (rate ? format_fixed(*rate, 3) : std::string()) + " |";
    }
    out += "\n";
  }
  return out;
}

ConvergenceReport parse_report_csv(const std::string& text) {
  auto records = parse_csv(text);
  if (records.empty() || records.front() != kCsvHeader) throw ConfigurationError("report csv: unexpected header");
  ConvergenceReport rep;
  auto num = [](const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigurationError("report csv: bad number '" + s + "'");
    return v;
  };
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r];
    if (f.size() != kCsvHeader.size())
      throw ConfigurationError("report csv: record " + std::to_string(r + 1) + " has the wrong field count");
    if (r == 1) {
      rep.kind = study_kind_from_string(f[0]);
      rep.alpha = num(f[1]);
      rep.tau = num(f[2]);
      rep.L = num(f[3]);
      rep.reference = reference_kind_from_string(f[4]);
      rep.reference_N = std::stoi(f[5]);
      rep.reference_elements = std::stoi(f[6]);
      rep.norm = error_norm_from_string(f[7]);
    }
    const int N = std::stoi(f[8]), elements = std::stoi(f[9]), k = std::stoi(f[10]);
    if (rep.rows.empty() || rep.rows.back().N != N || rep.rows.back().elements != elements) {
      rep.rows.push_back({N, elements, {}, {}});
    }
    if (rep.rows.size() == 1) {
      rep.windows.push_back(k);
    }
    auto& row = rep.rows.back();
    row.errors.push_back(num(f[11]));
    row.rates.push_back(f[12].empty() ? std::nullopt : std::optional<double>(num(f[12])));
  }
  return rep;
}

}  // namespace delaysub
