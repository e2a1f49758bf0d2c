#pragma once

// Numerical checks of the analytic estimates behind the hard-edge ISDE:
// tail integrals of the correlation functions away from a base point, the
// c/sqrt(x) bound on the one-point function, Hilb's asymptotic for the
// weighted Laguerre polynomials, the integration-by-parts identity that
// defines the logarithmic derivative, and a Nyström check of 0 <= K <= 1.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hardedge/report.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

/// Plot-ready numbers accompanying a report.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// ---------------------------------------------------------------------------
// Tail integrals over S = {y > 0 : |y - x| >= s}, hard-edge scale.

struct TailIntegralSpec {
  double alpha = 1.0;
  int n = 100;
  double x = 1.0;
  double s = 5.0;
  double r = 10.0;      // base points range over (0, r]
  double omega = 4.0;   // far region starts at omega * N

  void validate() const;
};

struct TailIntegrals {
  double s = 0.0;
  double a = 0.0;         // int rho(y) / |x-y|
  double b = 0.0;         // int |rho_x(y) - rho(y)| / |x-y|
  double c_single = 0.0;  // int rho(y) / |x-y|^2
  double c_pair = 0.0;    // iint rho2(y,z) / (|x-y||x-z|)
  double d_single = 0.0;  // int |rho_x(y) - rho(y)| / |x-y|^2
  double d_pair = 0.0;    // iint |rho2_x(y,z) - rho2(y,z)| / (|x-y||x-z|)
  double a_far = 0.0;     // part of a with y >= omega * N
  double kernel_pair = 0.0;  // iint K(y,z)^2 / (|x-y||x-z|), so c_pair = a^2 - kernel_pair

  double c() const { return c_single + c_pair; }
  double d() const { return d_single + d_pair; }
};

/// Upper end of the integration range: beyond it the one-point function is
/// negligible (well past the soft edge at 16 N^2).
double tail_upper_limit(int n);

/// All tail integrals at one base point for several cutoffs. One tensor
/// Gauss-Legendre grid in u = sqrt(y) serves every cutoff: its panels break
/// at x +- s, omega N and 4 N omega, so each region is an exact union of
/// panels and the values are non-increasing in s by construction.
std::vector<TailIntegrals> tail_integrals(Order alpha, int n, double x, std::span<const double> s_list,
                                          double omega = 4.0);

/// Single-integral forms by adaptive Gauss-Kronrod (absolute tolerance 1e-8).
double tail_integral_A(const TailIntegralSpec& spec);
double tail_integral_B(const TailIntegralSpec& spec);
/// Forms with a double integral, from the tensor grid.
double tail_integral_C(const TailIntegralSpec& spec);
double tail_integral_D(const TailIntegralSpec& spec);

struct TailTrendOptions {
  std::vector<int> n_list{50, 100, 200};
  std::vector<double> x_list{1.0, 2.0, 5.0};
  std::vector<double> s_list{5.0, 10.0, 20.0, 40.0};
  double omega = 4.0;
  double r = 10.0;
  double margin = 0.05;  // the largest-s, largest-N value must stay below 2/omega + margin
  int workers = 1;
};

/// Monotonicity in s of all four integrals on the grid, the level of the
/// largest-s values at the largest N, and the far-region bound N/(N omega - r).
DiagnosticReport tail_trend_report(Order alpha, const TailTrendOptions& o, Table* raw = nullptr);

// ---------------------------------------------------------------------------
// One-point bound rho(x) <= c / sqrt(x) on [1, 4 N omega].

/// sup of sqrt(y) rho(y) over [1, 4 N omega] (grid in sqrt(y) plus golden refinement).
double lemma52_sup(Order alpha, int n, double omega);

/// Passes when consecutive N in n_list change the sup by less than rel_tol.
DiagnosticReport lemma52_report(Order alpha, std::span<const int> n_list, double omega = 2.0, double rel_tol = 0.1,
                                Table* raw = nullptr);

// ---------------------------------------------------------------------------
// Hilb asymptotic  w^{1/2} L_n = A_{n,a} J_a(sqrt(4 Nbar x)) + x^{5/4} O(n^{a/2 - 3/4}).

struct HilbSpec {
  double alpha = 1.0;
  std::vector<int> n_list{50, 100, 200};
  double x_lo = 0.05;
  double x_hi = 2.0;
  int points = 4000;       // uniform grid on [x_lo, x_hi]
  double max_slope = 0.05; // least-squares slope of log sup against log n

  void validate() const;
};

/// log A_{n,a} = log Gamma(n+1+a) - log Gamma(n+1) - (a/2) log(n + (a+1)/2).
double hilb_log_amplitude(int n, double alpha);

/// |w^{1/2} L_n(x) - A J_a(sqrt(4 Nbar x))| * n^{3/4 - a/2} / x^{5/4}.
double hilb_normalized_residual(int n, double alpha, double x);

DiagnosticReport hilb_residual(const HilbSpec& spec, Table* raw = nullptr);

// ---------------------------------------------------------------------------
// Integration by parts against the 1-Campbell measure:
//   E sum_i d(x_i, rest) f(x_i, rest) = -E sum_i df/dx(x_i, rest),
// d = -1/4N + a/x + sum 2/(x - y), realized over exact ensemble draws.

enum class TestFunction {
  zero,         // f = 0
  bump,         // smooth bump on [1, 3]
  wide_bump,    // smooth bump on [2, 8]
  cylindrical,  // bump on [1, 3] times 1/(1 + #{rest in [0, 2]})
};

TestFunction parse_test_function(const std::string& name);
std::string to_string(TestFunction f);
std::vector<TestFunction> ibp_family();

/// f(x, rest) and df/dx(x, rest) for a point x of a configuration; rest is
/// the configuration with that point removed (passed as the full
/// configuration and the index to skip).
struct TestValue {
  double f;
  double df;
};
TestValue evaluate_test_function(TestFunction fn, std::span<const double> config, std::size_t i);

struct IbpOptions {
  long draws = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
  double max_z = 3.0;
};

/// lhs, rhs, their standard errors and the paired difference in SE units.
DiagnosticReport ibp_identity_check(Order alpha, int n, TestFunction fn, const IbpOptions& o);

/// The whole family on one set of draws.
DiagnosticReport ibp_family_check(Order alpha, int n, const IbpOptions& o);

// ---------------------------------------------------------------------------

/// Eigenvalues of the Nyström discretization of the Bessel kernel on [0, L]
/// (Gauss-Legendre in u = sqrt(x), m nodes) must lie in [-eps, 1 + eps].
DiagnosticReport nystrom_report(Order alpha, double L = 50.0, int m = 200, double eps = 1e-8);

}  // namespace hardedge
