#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "hardedge/specfun.hpp"
#include "oracles.hpp"

using namespace hardedge;

TEST_CASE("gamma_fn exact factorials and oracle agreement") {
  CHECK(gamma_fn(1.0) == 1.0);
  CHECK(gamma_fn(5.0) == 24.0);
  CHECK(gamma_fn(1.5) == doctest::Approx(oracle::gamma(1.5)).epsilon(1e-14));
  for (double z = 0.05; z <= 170.0; z += 0.37) {
    const double ref = oracle::gamma(z);
    CHECK(std::abs(gamma_fn(z) - ref) <= 1e-13 * ref);
  }
  CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
  CHECK_THROWS_AS(gamma_fn(-2.5), DomainError);
  CHECK_THROWS_AS(gamma_fn(200.0), std::overflow_error);
}

TEST_CASE("log_gamma covers the range where gamma overflows") {
  for (double z : {0.3, 2.0, 9.9, 10.0, 55.5, 170.0}) CHECK(log_gamma(z) == doctest::Approx(std::log(oracle::gamma(z))).epsilon(1e-13));
  const double ref = static_cast<double>(boost::multiprecision::lgamma(oracle::big(700.25)));
  CHECK(log_gamma(700.25) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("bessel_j special values and series oracle") {
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(2.0, 0.0) == 0.0);
  CHECK(bessel_j(1.0, 2.0) == doctest::Approx(oracle::bessel_j(1.0, 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(bessel_j(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(bessel_j(-2.5, 1.0), DomainError);
}

TEST_CASE("bessel_j matches extended-precision series up to x = 40") {
  for (double nu : {-0.5, -0.25, 0.0, 0.5, 1.0, 1.7, 2.0, 3.0, 4.5}) {
    for (double x = 0.01; x <= 40.0; x += 0.173) {
      INFO("nu=" << nu << " x=" << x);
      CHECK(std::abs(bessel_j(nu, x) - oracle::bessel_j(nu, x)) <= 1e-10);
    }
  }
}

TEST_CASE("bessel_j large arguments against an independent implementation") {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.0, 5.5}) {
    for (double x = 40.0; x <= 1e4; x *= 1.37) {
      INFO("nu=" << nu << " x=" << x);
      CHECK(std::abs(bessel_j(nu, x) - boost::math::cyl_bessel_j(nu, x)) <= 1e-10);
    }
  }
}

TEST_CASE("bessel_j series and asymptotic branches agree at the switch point") {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const double xs = bessel_switch_point(nu);
    INFO("nu=" << nu);
    CHECK(std::abs(detail::bessel_j_series(nu, xs) - detail::bessel_j_asymptotic(nu, xs)) <= 1e-9);
  }
}

TEST_CASE("bessel_j orders in (-2, -1] via downward recurrence") {
  for (double nu : {-1.0, -1.3, -1.9}) {
    for (double x : {0.3, 1.0, 4.0, 17.0, 60.0}) {
      INFO("nu=" << nu << " x=" << x);
      CHECK(bessel_j(nu, x) == doctest::Approx(boost::math::cyl_bessel_j(nu, x)).epsilon(1e-10).scale(1.0));
    }
  }
  CHECK(bessel_j(-1.0, 0.0) == 0.0);
}

TEST_CASE("laguerre low degrees") {
  for (double a : {0.0, 0.5, 1.0, 2.3})
    for (double x : {0.0, 0.7, 3.0}) {
      CHECK(laguerre(0, a, x) == 1.0);
      CHECK(laguerre(1, a, x) == doctest::Approx((1.0 + a) - x));
    }
  CHECK(laguerre(5, 1.0, 2.5) == doctest::Approx(oracle::laguerre_sum(5, 1.0, 2.5)).epsilon(1e-13));
}

TEST_CASE("laguerre recurrence agrees with the explicit alternating sum") {
  for (int n = 0; n <= 12; ++n)
    for (double a : {0.0, 0.5, 1.0, 2.0})
      for (double x = 0.25; x <= 20.0; x += 0.25) {
        const double ref = oracle::laguerre_sum(n, a, x);
        INFO("n=" << n << " a=" << a << " x=" << x);
        CHECK(std::abs(laguerre(n, a, x) - ref) <= 1e-9 * (1.0 + std::abs(ref)));
      }
}

TEST_CASE("laguerre_monic has unit leading coefficient and survives large degree") {
  CHECK(laguerre_monic(0, 0.7, 3.0).value() == 1.0);
  for (double a : {0.0, 1.0, 2.5})
    for (double x : {0.2, 1.0, 5.0}) CHECK(laguerre_monic(1, a, x).value() == doctest::Approx(x - (1.0 + a)));
  CHECK(laguerre_monic(3, 1.0, 0.0).value() == doctest::Approx(-24.0));
  // p_n(x)/x^n -> 1 as x grows
  const SignedLog big = laguerre_monic(8, 1.0, 1e6);
  CHECK(big.sign == 1);
  CHECK(big.log_abs - 8.0 * std::log(1e6) == doctest::Approx(0.0).epsilon(1e-3).scale(1.0));
  const SignedLog huge = laguerre_monic(400, 1.5, 3.0);
  CHECK(std::isfinite(huge.log_abs));
  CHECK(huge.log_abs > 700.0);
}

TEST_CASE("weight and log_weight") {
  CHECK(weight(0.0, 2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(weight(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(weight(2.0, 3.0) == doctest::Approx(9.0 * std::exp(-3.0)));
  CHECK(log_weight(2.0, 3.0) == doctest::Approx(2.0 * std::log(3.0) - 3.0));
  CHECK_THROWS_AS(weight(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(weight(1.0, -1.0), DomainError);
}

TEST_CASE("Laguerre derivative identity") {
  for (double x : {0.1, 1.0, 4.0}) {
    const auto c = laguerre_derivative_check(1, 1.0, x);
    CHECK(c.rhs == -1.0);
    CHECK(c.lhs == doctest::Approx(-1.0).epsilon(1e-8));
  }
  CHECK(laguerre_derivative_check(2, 0.0, 1.0).rhs == doctest::Approx(-1.0));
  const auto c3 = laguerre_derivative_check(3, 1.5, 0.7, 1e-5);
  CHECK(std::abs(c3.lhs - c3.rhs) <= 1e-6);
  for (int n = 1; n <= 15; ++n)
    for (double a : {-0.5, 0.0, 1.0, 2.5})
      for (double x : {0.3, 2.0, 9.0}) {
        const auto c = laguerre_derivative_check(n, a, x, 1e-5);
        CHECK(std::abs(c.lhs - c.rhs) <= 1e-5 * (1.0 + std::abs(c.rhs)));
      }
  CHECK_THROWS(laguerre_derivative_check(0, 1.0, 1.0));
}

TEST_CASE("Order validates alpha > -1") {
  CHECK_NOTHROW(Order(-0.5));
  CHECK_THROWS_AS(Order(-1.0), DomainError);
  CHECK_THROWS_AS(Order(-1.5), DomainError);
  CHECK_THROWS_AS(Order(0.5).require_non_hitting(), DomainError);
  CHECK_NOTHROW(Order(1.0).require_non_hitting());
}

TEST_CASE("orthonormal Laguerre functions") {
  for (double a : {0.0, 1.0, 2.5})
    for (double x : {0.1, 1.0, 7.5}) {
      const auto phi = laguerre_functions(10, a, x);
      for (int m = 0; m <= 10; ++m) {
        const double direct = std::sqrt(weight(a, x)) * oracle::laguerre_sum(m, a, x) * std::exp(-0.5 * laguerre_log_norm(m, a));
        CHECK(phi[m] == doctest::Approx(direct).epsilon(1e-11).scale(1e-12));
      }
    }
  // large N, far into the tail: no overflow and no NaN
  const auto far = laguerre_functions(500, 1.0, 2500.0);
  for (double v : far) CHECK(std::isfinite(v));
  const auto bulk = laguerre_functions(500, 1.0, 900.0);
  CHECK(std::abs(bulk[500]) > 0.0);
  CHECK(std::abs(bulk[500]) < 1.0);
  CHECK(weighted_laguerre(200, 1.0, 1.5) ==
        doctest::Approx(std::exp(0.5 * laguerre_log_norm(200, 1.0)) * laguerre_functions(200, 1.0, 1.5)[200]).epsilon(1e-10));
}
