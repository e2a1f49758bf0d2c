#pragma once

// Special functions used throughout the library: gamma, Bessel J of real
// order, Laguerre polynomials and the weighted (orthonormal) Laguerre
// functions that build the finite-N kernels.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hardedge {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Order alpha of the hard-edge model. Valid range is alpha > -1.
class Order {
 public:
  explicit Order(double alpha);
  double value() const { return alpha_; }
  /// Throws unless alpha >= 1 (the non-hitting regime of the dynamics).
  void require_non_hitting() const;

 private:
  double alpha_;
};

/// A real number stored as sign * exp(log_abs). Used where the magnitude
/// overflows double (monic polynomials at large degree).
struct SignedLog {
  double log_abs = -INFINITY;
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  static SignedLog from(double v);
};

double gamma_fn(double z);
double log_gamma(double z);

/// Bessel function of the first kind J_nu(x) for nu > -2, x >= 0.
double bessel_j(double nu, double x);

/// Argument above which bessel_j switches from the ascending series to the
/// large-argument (Hankel) expansion.
constexpr double bessel_switch_point(double nu) { return 12.0 + 2.0 * (nu > 0 ? nu : 0.0); }

namespace detail {
double bessel_j_series(double nu, double x);
double bessel_j_asymptotic(double nu, double x);
}  // namespace detail

/// Generalized Laguerre polynomial L_n^{[alpha]}(x) via the ascending
/// three-term recurrence.
double laguerre(int n, double alpha, double x);

/// L_n^{[alpha]}(x) in sign/log form; never overflows. Degree -1 is 0.
SignedLog laguerre_log(int n, double alpha, double x);

/// Monic p_n(x) = (-1)^n n! L_n(x), kept in sign/log form.
SignedLog laguerre_monic(int n, double alpha, double x);

double weight(double alpha, double x);
double log_weight(double alpha, double x);

/// log h_n, where h_n = Gamma(n+alpha+1)/Gamma(n+1) is the squared norm of L_n.
double laguerre_log_norm(int n, double alpha);

/// Finite-difference derivative of L_n^{[alpha]} paired with the identity
/// dL_n^{[alpha]}/dx = -L_{n-1}^{[alpha+1]}.
struct DerivativeCheck {
  double lhs;
  double rhs;
};
DerivativeCheck laguerre_derivative_check(int n, double alpha, double x, double step = 1e-5);

/// Orthonormal Laguerre functions
///   phi_m(x) = x^{alpha/2} e^{-x/2} L_m^{[alpha]}(x) / sqrt(h_m),  m = 0..n_max,
/// evaluated with running rescaling so nothing overflows before the final
/// exponentiation. Entries that underflow come back as 0.
std::vector<double> laguerre_functions(int n_max, double alpha, double x);

/// w(x)^{1/2} L_n^{[alpha]}(x) evaluated in log space.
double weighted_laguerre(int n, double alpha, double x);

}  // namespace hardedge
