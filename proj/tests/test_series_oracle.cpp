#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <spdlog/sinks/ringbuffer_sink.h>
#include <spdlog/spdlog.h>

#include "doctest.h"
#include "delaysub/builtin_problems.hpp"
#include "delaysub/errors.hpp"
#include "delaysub/series_oracle.hpp"
#include "delaysub/special_functions.hpp"

using namespace delaysub;

namespace {

constexpr double kPi = std::numbers::pi;

// u = (1 + t + t^2) sin(pi x) for all t, including the history
BuiltinProblem polynomial_problem(double alpha) {
  BuiltinProblem bp;
  auto& s = bp.spec;
  s.alpha = alpha;
  s.K = 2;
  s.p = 0.2;
  s.a = 0.0;
  s.b = 1.0;
  const double lambda = s.p * kPi * kPi;
  auto T = [](double t) { return 1.0 + t + t * t; };
  SineMode m;
  m.history = T;
  m.history_dt = [](double) { return 1.0; };
  m.forcing = [=](double t) {
    double rl = std::pow(t, alpha - 1.0) / std::tgamma(alpha) + std::pow(t, alpha) / std::tgamma(alpha + 1.0) +
                2.0 * std::pow(t, alpha + 1.0) / std::tgamma(alpha + 2.0);
    return (1.0 + 2.0 * t) + lambda * rl - T(t - 1.0);
  };
  bp.modal.modes.push_back(m);
  attach_modal_data(s, bp.modal);
  return bp;
}

}  // namespace

TEST_CASE("eigenpairs") {
  auto c1 = example1_case1(0.5);
  CHECK(eigenpair(c1.spec, 1).lambda == doctest::Approx(1.9739209).epsilon(1e-7));
  auto c2 = example1_case2(0.5);
  CHECK(eigenpair(c2.spec, 1).lambda == doctest::Approx(1.0986960).epsilon(1e-7));
  CHECK_THROWS_AS(eigenpair(c2.spec, 0), ConfigurationError);
  for (double L : {1.0, 2.5}) {
    auto spec = c2.spec;
    spec.L = L;
    for (int i : {1, 2, 7}) {
      auto e = eigenpair(spec, i);
      double norm = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double x) { return e.shape(x) * e.shape(x); }, 0.0, L, 10, 1e-14);
      CHECK(std::abs(norm - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("zero data gives a zero oracle") {
  auto bp = zero_problem(0.6, 2);
  QuadSettings q;
  q.samples = 64;
  SeriesOracle oracle(bp.spec, bp.modal, q);
  for (double t : {0.1, 1.0, 1.7}) CHECK(oracle(0.3, t) == 0.0);
}

TEST_CASE("homogeneous relaxation reduces to the Mittag-Leffler function") {
  for (double alpha : {0.3, 0.6, 0.9}) {
    const double c = 1.7;
    auto bp = homogeneous_relaxation(alpha, 0.2, -0.5, 0.8, c);
    ModalOracle mo(bp.spec, bp.modal.modes[0]);
    const double lambda = 0.2 * kPi * kPi + 0.5;
    MLParams mp;
    mp.mu = alpha;
    for (double t : {1e-4, 0.01, 0.3, 0.77, 1.0}) {
      auto v = mo.evaluate(t);
      double expect = c * mittag_leffler(mp, -lambda * std::pow(t, alpha)) * std::sqrt(0.5);
      CHECK(std::abs(v.value - expect) <= 1e-9);
      CHECK(v.tolerance_met);
    }
  }
}

TEST_CASE("case 1 oracle reproduces the closed-form solution") {
  for (double alpha : {0.4, 0.8}) {
    auto bp = example1_case1(alpha);
    ModalOracle mo(bp.spec, bp.modal.modes[0]);
    for (double t : {0.5, 1.5, 2.5}) {
      auto v = mo.evaluate(t);
      CHECK(std::abs(v.value - bp.exact(0.5, t) * std::sqrt(0.5)) <= 1e-6);
      CHECK(v.tolerance_met);
    }
    // window seams
    for (double t : {1.0, 2.0}) CHECK(std::abs(mo.amplitude(t - 1e-9) - mo.amplitude(t + 1e-9)) <= 1e-6);
    // panel refinement cascade
    for (double t : {0.5, 1.5, 2.5}) {
      double v1 = mo.amplitude(t, 64), v2 = mo.amplitude(t, 128), v3 = mo.amplitude(t, 256);
      double d1 = std::abs(v2 - v1), d2 = std::abs(v3 - v2);
      INFO("t=" << t << " d1=" << d1 << " d2=" << d2);
      CHECK((d2 <= 0.5 * d1 || d2 <= 1e-12));
    }
    // oracle_solution at the midpoint is T * sqrt(2/L)
    QuadSettings q;
    SeriesOracle so(bp.spec, bp.modal, q);
    CHECK(so.evaluate(0.5, 1.5).value == doctest::Approx(mo.evaluate(1.5).value * std::sqrt(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("singularity probe slopes") {
  const double alpha = 0.5;
  auto bp = example1_case1(alpha);
  std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5, 1.0 + 1e-2, 1.0 + 1e-3, 1.0 + 1e-4, 1.0 + 1e-5};
  auto rep = singularity_probe(bp.spec, bp.modal, ts);
  REQUIRE(rep.samples.size() == ts.size());
  CHECK(rep.has_first);
  CHECK(rep.has_second);
  CHECK_FALSE(rep.ill_conditioned);
  CHECK(std::abs(rep.first_derivative_slope - (alpha - 1.0)) <= 0.1);
  CHECK(std::abs(rep.second_derivative_slope - (alpha - 1.0)) <= 0.1);
  CHECK(rep.first_near_singular);
  CHECK(rep.second_near_singular);

  auto poly = polynomial_problem(0.6);
  auto prep = singularity_probe(poly.spec, poly.modal, ts);
  CHECK(std::abs(prep.first_derivative_slope) <= 0.1);
  CHECK(std::abs(prep.second_derivative_slope) <= 0.1);
  CHECK_FALSE(prep.first_near_singular);
  for (const auto& s : prep.samples) CHECK(s.du_dt_est == doctest::Approx(1.0 + 2.0 * s.t).epsilon(1e-4));
}

TEST_CASE("probe warns about a coarse t list") {
  auto bp = homogeneous_relaxation(0.5, 0.2, 0.0, 1.0, 1.0);
  auto rep = singularity_probe(bp.spec, bp.modal, {0.1, 0.2});
  CHECK(rep.ill_conditioned);
  CHECK_THROWS_AS(singularity_probe(bp.spec, bp.modal, {0.0}), ConfigurationError);
}

TEST_CASE("tolerance warning") {
  auto sink = std::make_shared<spdlog::sinks::ringbuffer_sink_mt>(8);
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(std::make_shared<spdlog::logger>("capture", sink));
  auto bp = example1_case2(0.5);
  QuadSettings q;
  q.tolerance = 1e-300;
  q.samples = 64;
  q.panels = 4;
  auto v = modal_solution(bp.spec, bp.modal.modes[0], q, 0.5);
  spdlog::set_default_logger(previous);
  CHECK_FALSE(v.tolerance_met);
  CHECK(sink->last_formatted().size() == 1);
}

TEST_CASE("quadrature settings validation") {
  auto bp = homogeneous_relaxation(0.5, 0.2, 0.0, 1.0, 1.0);
  QuadSettings q;
  q.points = 5;
  CHECK_THROWS_AS(ModalOracle(bp.spec, bp.modal.modes[0], q), ConfigurationError);
  q = QuadSettings{};
  q.grading = 1.0;
  CHECK_THROWS_AS(ModalOracle(bp.spec, bp.modal.modes[0], q), ConfigurationError);
  ModalOracle mo(bp.spec, bp.modal.modes[0]);
  CHECK_THROWS_AS(mo.amplitude(1.5), ConfigurationError);
}
