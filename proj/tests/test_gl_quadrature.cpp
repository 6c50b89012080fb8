#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "delaysub/errors.hpp"
#include "delaysub/gl_quadrature.hpp"

using namespace delaysub;

namespace {

const double kAlphas[] = {0.4, 0.6, 0.7, 0.9};

std::vector<double> sample(double rho, int n, double (*fn)(double, double), double param) {
  std::vector<double> v(n + 1);
  for (int k = 0; k <= n; ++k) v[k] = fn(k * rho, param);
  return v;
}

double power(double t, double s) { return std::pow(t, s); }

}  // namespace

TEST_CASE("gl_weights small cases") {
  auto g = gl_weights(0.7, 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(-0.105).epsilon(1e-15));

  g = gl_weights(0.5, 2);
  CHECK(g[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(g[2] == doctest::Approx(-0.125).epsilon(1e-15));

  CHECK(gl_weights(0.3, 0) == std::vector<double>{1.0});
  CHECK_THROWS_AS(gl_weights(1.5, 3), DomainError);
}

TEST_CASE("g^(alpha-1) recurrence matches the Gamma-ratio closed form") {
  // mpmath, 50 digits (tests/reference/gen_gl_values.py), k = 0 1 2 3 10 100 999 5000
  const int ks[] = {0, 1, 2, 3, 10, 100, 999, 5000};
  const struct {
    double alpha;
    double values[8];
  } table[] = {
      {0.4, {1.0, 0.6, 0.48, 0.416, 0.264153956352, 0.10629877393891016835, 0.042380967991700362108,
             0.022256189384350943845}},
      {0.6, {1.0, 0.4, 0.28, 0.224, 0.111887204352, 0.028410959098814281299, 0.0071485137643129102628,
             0.0027202874266039987048}},
      {0.7, {1.0, 0.3, 0.195, 0.1495, 0.065995166020265625, 0.013293663028481409014,
             0.0026568038149396794781, 0.00086062281349196803954}},
      {0.9, {1.0, 0.1, 0.055, 0.0385, 0.013172835503953125, 0.0016651893830559640799,
             0.00020990888474359056118, 0.000049269983108255803522}},
  };
  for (const auto& row : table) {
    auto g = gl_weights(row.alpha - 1.0, 5000);
    GLKernel kernel(row.alpha, 0.01, 5000);
    for (int i = 0; i < 8; ++i) {
      INFO("alpha=" << row.alpha << " k=" << ks[i]);
      CHECK(std::abs(g[ks[i]] - row.values[i]) <= 1e-12 * row.values[i]);
      CHECK(std::abs(static_cast<double>(kernel.g_alpha_minus_1()[ks[i]]) - row.values[i]) <= 1e-14 * row.values[i]);
    }
  }
}

TEST_CASE("a_coeffs examples") {
  auto A = a_coeffs(0.5, 0.1, 1);
  CHECK(A[0] == doctest::Approx(std::pow(0.1, -0.5)).epsilon(1e-15));
  CHECK(A[1] == doctest::Approx(1.5811388300841898).epsilon(1e-14));
  for (double a : kAlphas) CHECK(a_coeffs(a, 0.003, 0)[0] == doctest::Approx(std::pow(0.003, -a)).epsilon(1e-15));
}

TEST_CASE("partial sums of A respect the upper bound (alpha = 0.7, rho = 1/400, n = 3200)") {
  const double a = 0.7, rho = 1.0 / 400.0;
  auto A = a_coeffs(a, rho, 3200);
  double s = A[0];  // n = 0 is the equality rho A_0 = rho^{1-alpha}
  for (int n = 1; n <= 3200; ++n) {
    s += A[n];
    double bound = std::pow(rho, 1 - a) + std::pow(n * rho, 1 - a) / std::tgamma(2 - a);
    REQUIRE(rho * s < bound);
  }
}

TEST_CASE("kernel invariants") {
  for (double a : kAlphas) {
    GLKernel k(a, 1.0 / 300.0, 10000);
    const auto& g = k.g_alpha();
    const auto& gm = k.g_alpha_minus_1();
    const auto& A = k.A();
    CHECK(g[0] == 1.0L);
    CHECK(k.P()[0] * A[0] == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 1; i <= 10000; ++i) {
      REQUIRE(g[i] < 0.0L);
      REQUIRE(A[i] > 0.0L);
      REQUIRE(A[i - 1] > A[i]);
      REQUIRE(gm[i] > 0.0L);
    }
  }
}

TEST_CASE("weight identity g_k = rho^alpha (A_k - A_{k-1}) to 1e-12 relative, k <= 1e4") {
  for (double a : kAlphas) {
    for (double rho : {1.0 / 400.0, 1.0 / 3200.0, 0.37}) {
      GLKernel k(a, rho, 10000);
      long double ra = powl(rho, a);
      long double worst = 0.0L;
      for (int i = 1; i <= 10000; ++i) {
        long double lhs = ra * (k.A()[i] - k.A()[i - 1]);
        worst = std::max(worst, fabsl(lhs - k.g_alpha()[i]) / fabsl(k.g_alpha()[i]));
      }
      INFO("alpha=" << a << " rho=" << rho << " worst=" << static_cast<double>(worst));
      CHECK(worst <= 1e-12L);
    }
  }
}

TEST_CASE("A-sum bound holds strictly for n <= 1e4") {
  for (double a : kAlphas) {
    const double rho = 1.0 / 1000.0;
    GLKernel k(a, rho, 10000);
    CHECK(rho * k.sum_A(0) == doctest::Approx(std::pow(rho, 1 - a)).epsilon(1e-15));
    for (int n = 1; n <= 10000; ++n) {
      long double lhs = rho * k.sum_A(n);
      long double rhs = powl(rho, 1 - a) + powl(n * rho, 1 - a) / tgammal(2 - a);
      REQUIRE(lhs < rhs);
    }
  }
}

TEST_CASE("p_coeffs base case and non-negativity") {
  auto A = a_coeffs(0.6, 0.01, 50);
  auto P = p_coeffs(A, 0);
  REQUIRE(P.size() == 1);
  CHECK(P[0] == doctest::Approx(1.0 / A[0]).epsilon(1e-15));
  P = p_coeffs(A, 50);
  for (double v : P) CHECK(v >= 0.0);
}

TEST_CASE("complementary identity sum_{j=k}^n P_{n-j} A_{j-k} = 1") {
  for (double a : kAlphas) {
    for (double rho : {1.0 / 100.0, 1.0 / 2000.0}) {
      GLKernel k(a, rho, 2000);
      const auto& P = k.P();
      const auto& A = k.A();
      auto P_free = p_coeffs(k.A_double(), 2000);
      for (int n : {1, 2, 7, 100, 999, 2000}) {
        for (int kk : {1, n / 3 + 1, n / 2 + 1, n}) {
          if (kk > n) continue;
          long double s = 0.0L, s_free = 0.0L;
          for (int j = kk; j <= n; ++j) {
            s += P[n - j] * A[j - kk];
            s_free += P_free[n - j] * k.A_double()[j - kk];
          }
          INFO("alpha=" << a << " n=" << n << " k=" << kk);
          CHECK(fabsl(s - 1.0L) <= 1e-10L);
          CHECK(fabsl(s_free - 1.0L) <= 1e-10L);
        }
      }
    }
  }
}

TEST_CASE("sum of P bounded by 2^alpha t_n^alpha / Gamma(1+alpha)") {
  {
    GLKernel k(0.7, 1.0 / 100.0, 500);
    long double s = 0.0L;
    for (int j = 1; j <= 500; ++j) s += k.P()[500 - j];
    CHECK(s <= std::pow(2.0, 0.7) * std::pow(5.0, 0.7) / std::tgamma(1.7));
  }
  for (double a : kAlphas) {
    const double rho = 1.0 / 250.0;
    GLKernel k(a, rho, 3000);
    long double s = 0.0L;
    for (int n = 1; n <= 3000; ++n) {
      s += k.P()[n - 1];  // sum_{j=1}^n P_{n-j} = sum_{m=0}^{n-1} P_m
      REQUIRE(s <= std::pow(2.0, a) * std::pow(n * rho, a) / std::tgamma(1 + a));
    }
  }
}

TEST_CASE("weighted P sums obey the K_{beta,n} bound") {
  for (double a : kAlphas) {
    for (double rho : {1.0 / 50.0, 1.0 / 1000.0}) {
      GLKernel k(a, rho, 1000);
      for (double beta : {0.0, 0.5, 1.0}) {
        for (int n : {10, 100, 1000}) {
          long double lhs = 0.0L;
          for (int j = 1; j <= n; ++j) lhs += powl(j, -beta) * k.P()[n - j];
          double ra = std::pow(rho, a);
          double rhs = ra * std::pow(n, -beta) +
                       ra / std::tgamma(a) *
                           (k_beta(beta, n) * std::pow(n / 2.0, a - 1) + std::pow(n / 2.0, a - beta) / a);
          INFO("alpha=" << a << " rho=" << rho << " beta=" << beta << " n=" << n);
          CHECK(lhs <= rhs);
        }
      }
    }
  }
}

TEST_CASE("k_beta definition") {
  CHECK(k_beta(1.0, 1) == doctest::Approx(1.0));
  CHECK(k_beta(1.0, 100) == doctest::Approx(1.0 + std::log(100.0)));
  CHECK(k_beta(0.5, 100) == doctest::Approx(1.0 + (1.0 - 10.0) / (-0.5)));
  CHECK(k_beta(0.0, 7) == doctest::Approx(7.0));
  // continuous in beta at 1
  CHECK(k_beta(1.0 + 1e-9, 50) == doctest::Approx(k_beta(1.0, 50)).epsilon(1e-7));
}

TEST_CASE("discrete Caputo of a constant vanishes") {
  GLKernel k(0.6, 0.01, 100);
  std::vector<double> c(101, 3.25);
  CHECK(caputo_gl(k, c, 100) == 0.0);
  CHECK(std::abs(caputo_gl_weight_form(k, c, 100)) <= 1e-12);
}

TEST_CASE("A-form and weight form of the discrete Caputo operator agree") {
  for (double a : kAlphas) {
    GLKernel k(a, 1.0 / 512.0, 2048);
    auto u = sample(1.0 / 512.0, 2048, [](double t, double) { return std::sin(3 * t) + t * t + 0.5; }, 0.0);
    for (int n : {1, 2, 17, 512, 2048}) {
      double x = caputo_gl(k, u, n), y = caputo_gl_weight_form(k, u, n);
      INFO("alpha=" << a << " n=" << n);
      CHECK(std::abs(x - y) <= 1e-11 * std::max(std::abs(x), 1.0));
    }
  }
}

TEST_CASE("discrete Caputo of t at t = 1 (alpha = 0.5)") {
  const double exact = 1.0 / std::tgamma(1.5);
  std::vector<double> errs;
  for (int n : {1024, 2048, 4096}) {
    GLKernel k(0.5, 1.0 / n, n);
    auto u = sample(1.0 / n, n, power, 1.0);
    errs.push_back(std::abs(caputo_gl(k, u, n) - exact));
  }
  CHECK(errs[0] <= 1.0 / 1024.0);
  CHECK(std::log2(errs[0] / errs[1]) >= 0.95);
  CHECK(std::log2(errs[1] / errs[2]) >= 0.95);
  GLKernel k(0.5, 1.0 / 1024, 1024);
  CHECK(caputo_gl(k, sample(1.0 / 1024, 1024, power, 1.0), 1024) == doctest::Approx(1.1283792).epsilon(1e-3));
}

TEST_CASE("truncation order on t^sigma at t = 1") {
  // Leading error term is (alpha/2) Γ(sigma+1)/Γ(sigma-alpha) rho t^{sigma-alpha-1}: first order for
  // sigma = 1+alpha and 2. At sigma = alpha the 1/Γ(0) factor kills it and the next term,
  // O(rho^{1+alpha}), is what is left.
  for (double a : kAlphas) {
    for (double sigma : {a, 1.0 + a, 2.0}) {
      const double exact = std::tgamma(sigma + 1) / std::tgamma(sigma + 1 - a);
      const double expected_ratio = sigma == a ? std::pow(2.0, 1.0 + a) : 2.0;
      double prev = -1.0;
      for (int n : {512, 1024, 2048, 4096}) {
        GLKernel k(a, 1.0 / n, n);
        double err = std::abs(caputo_gl(k, sample(1.0 / n, n, power, sigma), n) - exact);
        if (prev > 0) {
          INFO("alpha=" << a << " sigma=" << sigma << " n=" << n << " ratio=" << prev / err);
          CHECK(prev / err >= expected_ratio - 0.2);
          CHECK(prev / err <= expected_ratio + 0.2);
        }
        prev = err;
      }
    }
  }
}

TEST_CASE("discrete fractional integral forms and simple values") {
  for (double a : kAlphas) {
    GLKernel k(a, 0.01, 400);
    std::vector<double> zero(401, 0.0), ones(401, 1.0);
    CHECK(frac_integral_gl(k, zero, 400) == 0.0);
    for (int n : {0, 1, 5, 400}) {
      double closed = std::pow(0.01, 1 - a) *
                      boost::math::tgamma_delta_ratio(n + 2.0 - a, a - 1.0) / std::tgamma(2 - a);
      INFO("alpha=" << a << " n=" << n);
      CHECK(frac_integral_gl(k, ones, n) == doctest::Approx(closed).epsilon(1e-13));
      CHECK(frac_integral_gl_weight_form(k, ones, n) == doctest::Approx(closed).epsilon(1e-13));
    }
    auto w = sample(0.01, 400, [](double t, double) { return std::cos(t) * std::exp(t); }, 0.0);
    CHECK(frac_integral_gl(k, w, 400) == doctest::Approx(frac_integral_gl_weight_form(k, w, 400)).epsilon(1e-13));
  }
}

TEST_CASE("discrete fractional integral of t converges at first order") {
  const double exact = 1.0 / std::tgamma(2.5);
  std::vector<double> errs;
  for (int n : {256, 512, 1024, 2048}) {
    GLKernel k(0.5, 1.0 / n, n);
    errs.push_back(std::abs(frac_integral_gl(k, sample(1.0 / n, n, power, 1.0), n) - exact));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    double rate = std::log2(errs[i - 1] / errs[i]);
    CHECK(rate >= 0.9);
    CHECK(rate <= 1.1);
  }
  CHECK(errs.back() < 1e-3);
}

TEST_CASE("length and range errors") {
  GLKernel k(0.5, 0.1, 10);
  std::vector<double> short_samples(3, 0.0);
  CHECK_THROWS_AS(caputo_gl(k, short_samples, 5), ConfigurationError);
  CHECK_THROWS_AS(frac_integral_gl(k, short_samples, 5), ConfigurationError);
  std::vector<double> many(40, 0.0);
  CHECK_THROWS_AS(frac_integral_gl(k, many, 30), ConfigurationError);
  CHECK_THROWS_AS(GLKernel(1.2, 0.1, 10), DomainError);
}
