#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "delaysub/errors.hpp"
#include "delaysub/special_functions.hpp"

using namespace delaysub;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

struct MLCase {
  double mu, nu, z, value;
};

// mpmath, 60 digits (tests/reference/gen_special_values.py)
const std::vector<MLCase> kMLReference = {
    {0.5, 1.0, -1.0, 0.42758357615580700441},
    {0.4, 1.0, -0.5, 0.62349640387529039277},
    {0.4, 1.0, -2.0, 0.27353529996067953468},
    {0.4, 1.0, -3.0, 0.1962589283305384822},
    {0.4, 1.0, -5.0, 0.12462707110373715893},
    {0.4, 0.4, -3.0, 0.02236712419786643863},
    {0.7, 1.0, -1.0, 0.39961197811559939027},
    {0.7, 1.0, -4.5, 0.087338271657445586276},
    {0.7, 0.7, -4.5, 0.01532188669646590584},
    {0.7, 1.0, -8.0, 0.046069992385362385726},
    {0.9, 1.0, -2.0, 0.16352830001693004278},
    {0.9, 1.0, -10.0, 0.012820606051102099938},
    {0.9, 0.9, -10.0, 0.001434652362294128595},
    {0.9, 1.0, -15.0, 0.007928602432344447057},
    {0.6, 1.0, -12.0, 0.038643078839373572781},
    {0.4, 1.0, 3.0, 14720446.206775281332},
    {0.9, 1.0, 17.7, 42090965468.046115665},
    {0.5, 1.5, -2.0, 0.37230216184474712807},
    {1.0, 1.0, 1.0, 2.7182818284590452354},
    {0.7, -0.3, -2.0, -0.11771342235949828997},
};

MLParams ml(double mu, double nu = 1.0) {
  MLParams p;
  p.mu = mu;
  p.nu = nu;
  return p;
}

}  // namespace

TEST_CASE("log_gamma matches high-precision values") {
  struct {
    double x, want;
  } cases[] = {
      {0.5, 0.57236494292470008707}, {4.7, 2.7364051463155666822},   {0.001, 6.9071788853838536825},
      {1e4, 82099.717496442377273},  {2.5, 0.28468287047291915963},  {170.3, 702.97738545132818169},
      {0.37, 0.87694681948487928992},
  };
  CHECK(log_gamma(1.0) == 0.0);
  for (auto c : cases) {
    INFO("x = " << c.x);
    CHECK(rel_err(log_gamma(c.x), c.want) <= 1e-13);
  }
}

TEST_CASE("log_gamma rejects non-positive input") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("reciprocal_gamma at poles and ordinary points") {
  CHECK(reciprocal_gamma(0.0) == 0.0);
  CHECK(reciprocal_gamma(-3.0) == 0.0);
  CHECK(reciprocal_gamma(0.5) == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-15));
  CHECK(reciprocal_gamma(-0.5) == doctest::Approx(-1.0 / (2.0 * std::sqrt(M_PI))).epsilon(1e-14));
}

TEST_CASE("MLParams validation") {
  MLParams p = ml(0.7);
  CHECK_NOTHROW(p.validate());
  p.mu = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = ml(0.7);
  p.series_radius = -1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = ml(0.7);
  p.series_tol = 1e-6;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("Mittag-Leffler trivial values") {
  CHECK(mittag_leffler(ml(1.0), 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  for (double a : {0.3, 0.7, 0.95}) CHECK(mittag_leffler(ml(a), 0.0) == 1.0);
  CHECK(mittag_leffler(ml(1.0), -3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
  CHECK(mittag_leffler(ml(2.0), -4.0) == doctest::Approx(std::cos(2.0)).epsilon(1e-12));
}

TEST_CASE("E_{1/2}(-x) = exp(x^2) erfc(x)") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 3.0, 6.0, 20.0}) {
    INFO("x = " << x);
    double want = std::exp(x * x) * std::erfc(x);
    CHECK(rel_err(mittag_leffler(ml(0.5), -x), want) <= 1e-11);
  }
}

TEST_CASE("Mittag-Leffler against high-precision references") {
  for (const auto& c : kMLReference) {
    INFO("mu=" << c.mu << " nu=" << c.nu << " z=" << c.z);
    CHECK(rel_err(mittag_leffler(ml(c.mu, c.nu), c.z), c.value) <= 1e-11);
  }
}

TEST_CASE("evaluation certifies its own accuracy") {
  for (const auto& c : kMLReference) {
    MittagLeffler f(ml(c.mu, c.nu));
    MLEvaluation e = f.evaluate(c.z);
    INFO("mu=" << c.mu << " nu=" << c.nu << " z=" << c.z);
    CHECK(std::abs(e.value - c.value) <= e.error_estimate + 4e-16 * std::abs(c.value));
  }
}

TEST_CASE("branches agree where each claims validity near the switch radius") {
  // Every branch that reports an error estimate below 1e-8 (relative) must agree with the
  // accepted value within the two estimates.
  for (double mu : {0.4, 0.6, 0.7, 0.8, 0.9}) {
    for (double nu : {mu, 1.0}) {
      MittagLeffler f(ml(mu, nu));
      for (double x : {6.0, 8.0, 10.0, 12.0, 15.0}) {
        MLEvaluation ref = f.evaluate(-x);
        for (const MLEvaluation& b : {f.series(-x), f.asymptotic(-x), f.integral(-x)}) {
          if (!(b.error_estimate <= 1e-8 * std::abs(b.value))) continue;
          INFO("mu=" << mu << " nu=" << nu << " x=" << x << " branch=" << static_cast<int>(b.branch));
          CHECK(std::abs(b.value - ref.value) <= b.error_estimate + ref.error_estimate + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("at |z| = series_radius at least one branch is accurate to 1e-12") {
  for (double mu : {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
    MittagLeffler f(ml(mu));
    MLEvaluation e = f.evaluate(-10.0);
    INFO("mu=" << mu);
    CHECK(e.error_estimate <= 1e-12 * std::abs(e.value));
  }
}

TEST_CASE("non-convergence is reported") {
  // mu > 1 outside the series radius: no applicable branch
  CHECK_THROWS_AS(mittag_leffler(ml(1.5), -80.0), ConvergenceError);
}

TEST_CASE("large positive arguments do not crash") {
  double v = mittag_leffler(ml(0.5), 20.0);  // ~ 2 exp(400): overflows double
  CHECK((std::isinf(v) || v > 1e170));
  CHECK(std::isfinite(mittag_leffler(ml(0.7), 30.0)));
}

TEST_CASE("derivative identity d/dt E(-lambda t^mu) = -lambda t^{mu-1} E_{mu,mu}(-lambda t^mu)") {
  const double step = 1e-6;
  for (double mu : {0.4, 0.7, 0.9}) {
    MittagLeffler e1(ml(mu)), emu(ml(mu, mu));
    for (double lambda : {1.0, 5.0, 20.0}) {
      for (double t : {0.5, 1.0, 2.0}) {
        auto u = [&](double s) { return e1(-lambda * std::pow(s, mu)); };
        double fd = (u(t + step) - u(t - step)) / (2.0 * step);
        double exact = -lambda * std::pow(t, mu - 1.0) * emu(-lambda * std::pow(t, mu));
        INFO("mu=" << mu << " lambda=" << lambda << " t=" << t);
        CHECK(rel_err(fd, exact) <= 1e-4);
      }
    }
  }
}

TEST_CASE("E_{a,a}(-eta) is non-negative") {
  for (double a : {0.1, 0.3, 0.4, 0.5, 0.7, 0.9, 0.99}) {
    MittagLeffler f(ml(a, a));
    for (double eta = 0.0; eta <= 200.0; eta = eta < 1 ? eta + 0.05 : eta * 1.3) {
      INFO("a=" << a << " eta=" << eta);
      CHECK(f(-eta) >= 0.0);
    }
  }
}

TEST_CASE("relaxation E_a(-lambda t^a) lies in (0,1] and is non-increasing") {
  for (double a : {0.4, 0.7, 0.9}) {
    MittagLeffler f(ml(a));
    for (double lambda : {1.0, 5.0, 20.0}) {
      double prev = 1.0;
      for (int i = 0; i <= 400; ++i) {
        double t = 3.0 * i / 400.0;
        double v = f(-lambda * std::pow(t, a));
        INFO("a=" << a << " lambda=" << lambda << " t=" << t);
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
      }
    }
  }
}

TEST_CASE("Chebyshev relaxation kernel reproduces the direct evaluator") {
  std::mt19937_64 rng(7);
  for (double a : {0.4, 0.7, 0.9}) {
    for (double lambda : {0.2, 1.0986960, 1.9739209, 20.0}) {
      RelaxationKernel k(a, lambda, 3.0);
      MittagLeffler f(ml(a));
      std::uniform_real_distribution<double> pick(0.0, 3.0);
      CHECK(k(0.0) == doctest::Approx(1.0).epsilon(1e-13));
      for (int i = 0; i < 200; ++i) {
        double s = i < 20 ? std::pow(10.0, -i * 0.5) : pick(rng);
        INFO("a=" << a << " lambda=" << lambda << " s=" << s);
        CHECK(std::abs(k(s) - f(-lambda * std::pow(s, a))) <= 1e-12);
      }
    }
  }
}
