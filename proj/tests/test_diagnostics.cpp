#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "hardedge/diagnostics.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/quadrature.hpp"

using namespace hardedge;

namespace {

TailIntegralSpec spec(double alpha, int n, double x, double s, double omega = 4.0) {
  TailIntegralSpec t;
  t.alpha = alpha;
  t.n = n;
  t.x = x;
  t.s = s;
  t.omega = omega;
  return t;
}

}  // namespace

TEST_CASE("tail integrals A and B against an independent quadrature") {
  // scipy: orthonormal Laguerre sums integrated with adaptive quad in sqrt(y)
  struct Case {
    int n;
    double alpha, x, s, a, b;
  } cases[] = {
      {50, 1.0, 1.0, 5.0, 0.13898683152484478, 0.057486568474288624},
      {50, 1.0, 2.0, 40.0, 0.047443063684593126, 0.0017001604534889047},
      {20, 2.0, 5.0, 10.0, 0.08755849287287563, 0.02664249604434821},
  };
  for (const auto& c : cases) {
    const TailIntegralSpec t = spec(c.alpha, c.n, c.x, c.s);
    CHECK(tail_integral_A(t) == doctest::Approx(c.a).epsilon(1e-7));
    CHECK(tail_integral_B(t) == doctest::Approx(c.b).epsilon(1e-7));
    const double s[] = {c.s};
    const TailIntegrals g = tail_integrals(Order(c.alpha), c.n, c.x, s)[0];
    CHECK(g.a == doctest::Approx(c.a).epsilon(1e-6));
    CHECK(g.b == doctest::Approx(c.b).epsilon(1e-6));
  }
}

TEST_CASE("tail integral A for a single particle matches the closed-form density") {
  // rho(y) = (1/4)(y/4)^a e^{-y/4} / Gamma(a+1); the second case also has a left region (0, x - s]
  const double want1 = 0.06290921811056396, want2 = 0.28343491885412725;
  CHECK(tail_integral_A(spec(1.0, 1, 1.0, 5.0)) == doctest::Approx(want1).epsilon(1e-7));
  CHECK(tail_integral_A(spec(0.5, 1, 3.0, 1.0)) == doctest::Approx(want2).epsilon(1e-7));
  const double s1[] = {5.0}, s2[] = {1.0};
  CHECK(tail_integrals(Order(1.0), 1, 1.0, s1)[0].a == doctest::Approx(want1).epsilon(1e-6));
  CHECK(tail_integrals(Order(0.5), 1, 3.0, s2)[0].a == doctest::Approx(want2).epsilon(1e-6));
}

TEST_CASE("double integrals at N = 2") {
  const double s[] = {3.0};
  const TailIntegrals t = tail_integrals(Order(1.0), 2, 1.0, s)[0];
  // scipy dblquad of rho2(y,z) / (|x-y||x-z|)
  CHECK(t.c_pair == doctest::Approx(0.007059382841605221).epsilon(1e-6));
  // the Palm process of two particles has one point, so rho2_x = 0 and the D pair term equals the C pair term
  CHECK(t.d_pair == doctest::Approx(t.c_pair).epsilon(1e-10));
}

TEST_CASE("kernel pair term equals the Frobenius norm of the weighted Gram matrix") {
  // iint K(y,z)^2 f(y) f(z) = sum_{m,m'} (int psi_m psi_m' f)^2 for a rank-N kernel
  const int n = 3;
  const double x = 2.0, s = 4.0;
  const double f = hard_edge_factor(n);
  const double hi = std::sqrt(tail_upper_limit(n));
  double frob = 0.0;
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q) {
      auto g = [&](double u) {
        const double y = u * u;
        const auto phi = laguerre_functions(n - 1, 1.0, y / f);
        return 2.0 * u * phi[m] * phi[q] / f / (y - x);
      };
      QuadOptions o;
      o.abs_tol = 1e-13;
      const double v = require_converged(integrate(g, std::sqrt(x + s), hi, o), "gram");
      frob += v * v;
    }
  const double sl[] = {s};
  const TailIntegrals t = tail_integrals(Order(1.0), n, x, sl)[0];
  CHECK(t.kernel_pair == doctest::Approx(frob).epsilon(1e-8));
  CHECK(t.c_pair == doctest::Approx(t.a * t.a - frob).epsilon(1e-7));
}

TEST_CASE("tail integrals decrease in s and obey the factored bounds") {
  const double s[] = {5.0, 10.0, 20.0, 40.0};
  double prev_a = INFINITY;
  for (double si : s) {
    const double a = tail_integral_A(spec(1.0, 100, 2.0, si));
    CHECK(a < prev_a);
    prev_a = a;
  }
  const auto v = tail_integrals(Order(1.0), 100, 2.0, s);
  for (std::size_t k = 0; k < v.size(); ++k) {
    CHECK(v[k].a > 0.0);
    CHECK(v[k].b > 0.0);
    CHECK(v[k].b <= v[k].a);
    CHECK(v[k].c_pair <= 2.0 * v[k].a * v[k].a);
    CHECK(v[k].d_pair <= 4.0 * v[k].a * v[k].a);
    CHECK(v[k].c_pair <= v[k].a * v[k].a);
    if (k > 0) {
      CHECK(v[k].a < v[k - 1].a);
      CHECK(v[k].b < v[k - 1].b);
      CHECK(v[k].c() < v[k - 1].c());
      CHECK(v[k].d() < v[k - 1].d());
    }
  }
}

TEST_CASE("tail integral A is below the near/far bound built from the one-point sup") {
  for (int n : {50, 100}) {
    const double omega = 4.0, r = 10.0, x = 2.0, s = 10.0;
    const double c = lemma52_sup(Order(1.0), n, omega);
    auto near = [&](double y) { return c / ((y - x) * std::sqrt(y)); };
    const double near_part = require_converged(integrate(near, x + s, omega * n), "near");
    const double bound = near_part + n / (n * omega - r);
    const double a = tail_integral_A(spec(1.0, n, x, s, omega));
    CHECK(a <= bound);
    MESSAGE("N = " << n << ": A = " << a << " <= " << bound);
  }
}

TEST_CASE("Palm integrand is dominated by the one-point function") {
  const LaguerreKernel k(Order(1.0), 40);
  const double x = 2.0, kxx = k.diagonal(x);
  for (double y = 0.05; y < 600.0; y *= 1.07) CHECK(std::pow(k(y, x), 2) / kxx <= k.diagonal(y) * (1.0 + 1e-12));
}

TEST_CASE("tail trend report") {
  TailTrendOptions o;
  o.n_list = {20, 40};
  o.x_list = {1.0, 5.0};
  Table raw;
  const DiagnosticReport r = tail_trend_report(Order(1.0), o, &raw);
  CHECK(r.verdict());
  CHECK(r.entries.size() == 2 * 2 * 5 + 2 * 4);
  CHECK(raw.rows.size() == 2 * 2 * 4);
  CHECK(raw.columns.size() == raw.rows[0].size());
  o.workers = 3;
  CHECK(tail_trend_report(Order(1.0), o).to_json().dump() == r.to_json().dump());
  o.x_list = {20.0};
  CHECK_THROWS_AS(tail_trend_report(Order(1.0), o), std::invalid_argument);
  CHECK_THROWS_AS(tail_integral_A(spec(1.0, 10, 1.0, -1.0)), std::invalid_argument);
}

TEST_CASE("one-point bound: sup of sqrt(x) rho is stable in N") {
  for (double alpha : {1.0, 2.0}) {
    const int ns[] = {50, 200};
    const DiagnosticReport r = lemma52_report(Order(alpha), ns, 2.0);
    CHECK(r.verdict());
  }
  // brute force on a fine grid never exceeds the refined sup and comes close to it
  const LaguerreKernel k(Order(1.0), 50);
  const double sup = lemma52_sup(Order(1.0), 50, 2.0);
  double brute = 0.0;
  for (double y = 1.0; y <= 400.0; y += 0.001) brute = std::max(brute, std::sqrt(y) * k.diagonal(y));
  CHECK(brute <= sup * (1.0 + 1e-12));
  CHECK(brute >= sup * (1.0 - 1e-6));
}

TEST_CASE("one-point function against the M_alpha envelope") {
  for (double alpha : {1.0, 2.0}) {
    double c = 0.0;
    for (int n : {10, 50, 200})
      c = std::max(c, std::exp(std::lgamma(n + 1.0) - std::lgamma(n + alpha)) / 2.0 * std::pow(n, alpha - 0.5));
    for (int n : {10, 50, 200}) {
      const LaguerreKernel k(Order(alpha), n);
      for (double y = 0.1; y < 16.0 * n * n; y *= 1.3) {
        const double env = c / std::sqrt(y) * std::pow(n, 0.5 - alpha) * m_alpha(n, alpha, y / (4.0 * n));
        CHECK(k.diagonal(y) <= env * (1.0 + 1e-9) + 1e-300);
      }
    }
  }
}

TEST_CASE("Hilb residual") {
  CHECK(hilb_log_amplitude(37, 0.0) == 0.0);
  CHECK(std::exp(hilb_log_amplitude(10, 1.0)) == doctest::Approx(11.0 / std::sqrt(11.0)).epsilon(1e-13));
  // scipy: eval_genlaguerre and jv on the same 4000-point grid
  const double want[2][3] = {{0.046648656935485026, 0.04684861507305657, 0.046935553966256496},
                             {0.050921493329390485, 0.04787162161030976, 0.047928924483695026}};
  for (int ia = 0; ia < 2; ++ia) {
    HilbSpec h;
    h.alpha = ia;
    Table raw;
    const DiagnosticReport r = hilb_residual(h, &raw);
    CHECK(r.verdict());
    for (int k = 0; k < 3; ++k) CHECK(r.entries[k].value == doctest::Approx(want[ia][k]).epsilon(1e-8));
    CHECK(raw.rows.size() == 3u * 4000u);
  }
  HilbSpec bad;
  bad.x_lo = 0.0;
  CHECK_THROWS_AS(hilb_residual(bad), std::invalid_argument);
}

TEST_CASE("test functions and their derivatives") {
  const double cfg[] = {0.5, 1.5, 2.2, 7.0};
  for (TestFunction fn : {TestFunction::bump, TestFunction::wide_bump, TestFunction::cylindrical}) {
    for (std::size_t i = 0; i < 4; ++i) {
      const double h = 1e-6;
      double lo[] = {0.5, 1.5, 2.2, 7.0}, hi[] = {0.5, 1.5, 2.2, 7.0};
      lo[i] -= h;
      hi[i] += h;
      const double fd = (evaluate_test_function(fn, hi, i).f - evaluate_test_function(fn, lo, i).f) / (2.0 * h);
      CHECK(evaluate_test_function(fn, cfg, i).df == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
    }
  }
  // the cylindrical factor counts the rest of the configuration in [0, 2], not the point itself
  CHECK(evaluate_test_function(TestFunction::cylindrical, cfg, 1).f ==
        doctest::Approx(evaluate_test_function(TestFunction::bump, cfg, 1).f / 2.0));
  CHECK(evaluate_test_function(TestFunction::zero, cfg, 1).f == 0.0);
  CHECK(parse_test_function("cylindrical") == TestFunction::cylindrical);
  CHECK_THROWS(parse_test_function("nope"));
}

TEST_CASE("integration by parts identity") {
  IbpOptions o;
  o.draws = 100000;
  const DiagnosticReport bump = ibp_identity_check(Order(1.0), 20, TestFunction::bump, o);
  CHECK(bump.verdict());
  CHECK(!bump.params.contains("warning"));
  const DiagnosticReport zero = ibp_identity_check(Order(1.0), 20, TestFunction::zero, o);
  CHECK(zero.entries[0].value == 0.0);
  CHECK(zero.entries[1].value == 0.0);
  CHECK(zero.verdict());
  const DiagnosticReport fam = ibp_family_check(Order(1.0), 20, o);
  CHECK(fam.verdict());
  // the family shares draws with the single check
  CHECK(fam.entries[0].value == bump.entries[0].value);
  o.draws = 50;
  CHECK(ibp_identity_check(Order(1.0), 20, TestFunction::bump, o).params.contains("warning"));
}

TEST_CASE("Nystrom eigenvalues of the Bessel kernel lie in [0, 1]") {
  for (double alpha : {0.0, 1.0, 3.0}) CHECK(nystrom_report(Order(alpha)).verdict());
}
