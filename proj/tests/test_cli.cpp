#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "delaysub/cli.hpp"
#include "delaysub/errors.hpp"
#include "delaysub/text_output.hpp"

using namespace delaysub;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) { return haystack.find(needle) != std::string::npos; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("delaysub_test_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const char* kInlineCase2 = R"(
problem:
  alpha: 0.6
  K: 3
  p: 1/100
  a: -1
  b: 1
  modes:
    - index: 1
      history:
        - {coeff: 1}
        - {coeff: 0.1, power: 1}
      forcing:
        - {power: 1}
        - {power: 2, shift: 1, positive_part: true}
        - {power: 2, shift: 2, positive_part: true}
discretization:
  N: 40
  elements: 16
)";

}  // namespace

TEST_CASE("minimal builtin config fills defaults") {
  const auto rc = parse_config("problem:\n  builtin: example1_case1\n  alpha: 0.7\n");
  REQUIRE(rc.problem);
  CHECK(rc.problem->builtin == "example1_case1");
  CHECK(rc.problem->spec.alpha == 0.7);
  CHECK(rc.problem->spec.K == 3);
  CHECK(rc.problem->spec.p == doctest::Approx(0.2));
  CHECK(static_cast<bool>(rc.problem->exact));
  CHECK_FALSE(rc.discretization);
  CHECK(rc.output.name == "example1_case1");
  CHECK(rc.output.directory == "out");
  CHECK(rc.output.csv);
  CHECK(rc.output.markdown);

  const auto study = parse_config(
      "problem: {builtin: example1_case1, alpha: 0.7}\ndiscretization: {h: 1/200}\nstudy: {N_list: [400, 800]}\n");
  REQUIRE(study.study);
  CHECK(study.discretization->elements == 200);
  CHECK(study.discretization->solver.forcing == ForcingQuadrature::Analytic);  // f is singular at t = 0
  CHECK(study.study->kind == StudyKind::TemporalWindow);
  CHECK(study.study->windows == std::vector<int>{1, 2, 3});
  CHECK(study.study->reference == ReferenceKind::Exact);

  const auto case2 = parse_config("problem: {builtin: example1_case2, alpha: 0.4}\ndiscretization: {N: 10, elements: 8}\n");
  CHECK(case2.discretization->solver.forcing == ForcingQuadrature::GrunwaldLetnikov);
}

TEST_CASE("validation errors name the key and the constraint") {
  CHECK(contains(error_of("problem:\n  builtin: example1_case1\n  alpha: 0.7\n  a: 0.5\n"), "problem.a (line 4): must satisfy a ≤ 0"));
  CHECK(contains(error_of("problem: {alpha: 0.5, p: 1, a: 2, b: 1, modes: [{index: 1}]}\n"), "a ≤ 0"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\ndiscretization:\n  rho: 0.3\n"),
                 "discretization.rho (line 3)"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\ndiscretization: {N: 400.5}\n"),
                 "discretization.N (line 2): must be an integer"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\ndiscretization: {h: 0.3}\n"), "discretization.h"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\ndiscretization:\n  N: 4\n  colour: red\n"),
                 "discretization.colour (line 4): unknown key"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\nextra: 1\n"), "extra (line 2): unknown key"));
  CHECK(contains(error_of("problem:\n  builtin: example1_case1\n  alpha: [0.7\n"), "parse error at line"));
  CHECK(contains(error_of("problem: {builtin: example1_case3, alpha: 0.5}\n"), "unknown builtin"));
  CHECK(contains(error_of("problem: {builtin: example1_case1, alpha: 0.5, p: 0.3}\n"), "problem.p (line 1): fixed at 0.2"));
  CHECK(contains(error_of("problem: {builtin: example1_case2, alpha: 0.5}\nstudy: {N_list: [10]}\n"),
                 "exact needs a closed-form solution") == false);
  CHECK(contains(error_of("problem: {builtin: example1_case2, alpha: 0.5}\nstudy: {N_list: [10], reference: exact}\n"),
                 "study.reference"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\nstudy: {N_list: [20, 10]}\n"), "strictly increasing"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 1.5}\n"), "problem.alpha"));
  CHECK(contains(error_of("problem: {builtin: zero, alpha: 0.5}\noracle: {x: [0.5], t: [0.5], points: 5}\n"),
                 "oracle.points"));
  CHECK(contains(error_of("weights: {rho: 1/400}\n"), "alpha is required"));
  CHECK(contains(error_of(""), "empty document"));
}

TEST_CASE("fractions and lists parse as numbers") {
  const auto rc = parse_config("weights: {alpha: 0.7, rho: 1/400, n_max: 100}\n");
  REQUIRE(rc.weights);
  CHECK(rc.weights->rho == 1.0 / 400.0);
  const auto sp = parse_config(
      "problem: {builtin: zero, alpha: 0.5}\ndiscretization: {rho: 1/4000}\nstudy: {kind: spatial, h_list: [1/8, 1/16]}\n");
  CHECK(sp.discretization->N == 4000);
  CHECK(sp.study->elements_list == std::vector<int>{8, 16});
}

TEST_CASE("weights dump has one row per k and matches the kernel") {
  WeightsConfig w{0.7, 1.0 / 400.0, 100};
  const auto rows = parse_csv(weights_csv(w));
  REQUIRE(rows.size() == 102);
  CHECK(rows[0] == std::vector<std::string>{"k", "g_alpha", "g_alpha_minus_1", "A", "P"});
  GLKernel kernel(0.7, 1.0 / 400.0, 100);
  for (int k : {0, 1, 17, 100}) {
    const auto& r = rows[static_cast<std::size_t>(k) + 1];
    CHECK(std::stoi(r[0]) == k);
    CHECK(std::stod(r[1]) == static_cast<double>(kernel.g_alpha()[k]));
    CHECK(std::stod(r[3]) == static_cast<double>(kernel.A()[k]));
    CHECK(std::stod(r[4]) == static_cast<double>(kernel.P()[k]));
  }
}

TEST_CASE("solve with zero data writes all-zero solution files") {
  const auto dir = scratch_dir("zero");
  const auto rc = parse_config("problem: {builtin: zero, alpha: 0.5, K: 2}\ndiscretization: {N: 8, elements: 6}\n");
  const auto files = dispatch(Command::Solve, rc, {dir, 1});
  CHECK(files.size() == 5);  // snapshots at n = 0, N, 2N plus norms and errors
  for (const auto& f : files) {
    const auto rows = parse_csv(read_text_file(f));
    REQUIRE(rows.size() > 1);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i].back()) == 0.0);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical outputs") {
  const auto rc = parse_config(
      "problem: {builtin: example1_case1, alpha: 0.7}\ndiscretization: {h: 1/16}\nstudy: {N_list: [8, 16]}\n"
      "output: {name: twice}\n");
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  const auto fa = dispatch(Command::TemporalStudy, rc, {a, 1});
  const auto fb = dispatch(Command::TemporalStudy, rc, {b, 2});
  REQUIRE(fa.size() == 2);
  REQUIRE(fb.size() == 2);
  CHECK(fa[0].filename() == "study_twice.csv");
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(read_text_file(fa[i]) == read_text_file(fb[i]));
  const auto report = parse_report_csv(read_text_file(fa[0]));
  CHECK(report.rows.size() == 2);
  CHECK(report.rows[1].rates[0].has_value());
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST_CASE("inline sine-mode data reproduces the builtin case 2 run") {
  const auto rc = parse_config(kInlineCase2);
  REQUIRE(rc.problem);
  CHECK(rc.problem->builtin.empty());
  CHECK(rc.problem->spec.forcing.has_frac_integral());
  const auto builtin = example1_case2(0.6);
  auto mesh = make_uniform_mesh(1.0, 16);
  TimeGrid grid(1.0, 40, 3);
  for (auto forcing : {ForcingQuadrature::GrunwaldLetnikov, ForcingQuadrature::Analytic}) {
    SolverOptions opts;
    opts.forcing = forcing;
    const auto mine = DelaySolver(rc.problem->spec, mesh, grid, opts).run();
    const auto ref = DelaySolver(builtin.spec, mesh, grid, opts).run();
    CHECK((mine.matrix() - ref.matrix()).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("commands reject configs missing their sections") {
  const auto rc = parse_config("problem: {builtin: zero, alpha: 0.5}\n");
  CHECK_THROWS_AS(dispatch(Command::Solve, rc, {scratch_dir("missing"), 1}), ConfigurationError);
  CHECK_THROWS_AS(dispatch(Command::Oracle, rc, {scratch_dir("missing"), 1}), ConfigurationError);
  CHECK_THROWS_AS(dispatch(Command::Weights, rc, {scratch_dir("missing"), 1}), ConfigurationError);
  const auto study = parse_config("problem: {builtin: zero, alpha: 0.5}\ndiscretization: {N: 4}\nstudy: {N_list: [4, 8]}\n");
  CHECK_THROWS_AS(dispatch(Command::SpatialStudy, study, {scratch_dir("missing"), 1}), ConfigurationError);
  CHECK_THROWS_AS(command_from_string("plot"), ConfigurationError);
  for (const auto& name : command_names()) CHECK(to_string(command_from_string(name)) == name);
}

TEST_CASE("oracle and probe commands emit their csv layouts") {
  const auto rc = parse_config(
      "problem: {builtin: homogeneous, alpha: 0.5, amplitude: 2}\n"
      "oracle: {x: [0.25, 0.5], t: [0.5, 1.0]}\n"
      "probe: {t: [1e-4, 1e-3, 1e-2]}\n");
  const auto rows = parse_csv(oracle_csv(*rc.problem, *rc.oracle));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"x", "t", "u"});
  CHECK(std::stod(rows[2][0]) == 0.5);
  const double lambda = 0.2 * std::numbers::pi * std::numbers::pi;
  const double expected = 2.0 * mittag_leffler({0.5, 1.0}, -lambda * std::sqrt(0.5));  // u = c E(-lambda t^alpha) sin(pi x)
  CHECK(std::stod(rows[2][2]) == doctest::Approx(expected).epsilon(1e-8));

  const auto dir = scratch_dir("probe");
  const auto files = dispatch(Command::Probe, rc, {dir, 1});
  REQUIRE(files.size() == 1);
  const auto probe = parse_csv(read_text_file(files[0]));
  CHECK(probe.size() == 4);
  CHECK(probe[0] == std::vector<std::string>{"t", "du_dt_est", "d2u_dt2_est"});
  std::filesystem::remove_all(dir);
}
