#include "hardedge/specfun.hpp"

#include <array>
#include <limits>
#include <numbers>
#include <string>

namespace hardedge {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Lanczos approximation, g = 7, nine terms.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double zm1) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (zm1 + static_cast<double>(i));
  return a;
}

// Laguerre recurrence carried with a running log scale. Returns L_n in
// sign/log form.
SignedLog scaled_laguerre(int n, double alpha, double x) {
  double prev = 1.0;
  if (n == 0) return SignedLog::from(1.0);
  double cur = 1.0 + alpha - x;
  double log_scale = 0.0;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150) {
      prev /= mag;
      cur /= mag;
      log_scale += std::log(mag);
    }
  }
  SignedLog out = SignedLog::from(cur);
  out.log_abs += log_scale;
  return out;
}

}  // namespace

Order::Order(double alpha) : alpha_(alpha) {
  if (!(alpha > -1.0)) throw DomainError("order alpha must satisfy alpha > -1, got " + std::to_string(alpha));
}

void Order::require_non_hitting() const {
  if (!(alpha_ >= 1.0))
    throw DomainError("non-hitting dynamics require alpha >= 1, got " + std::to_string(alpha_));
}

SignedLog SignedLog::from(double v) {
  if (v == 0.0) return {};
  return {std::log(std::abs(v)), v > 0 ? 1 : -1};
}

double gamma_fn(double z) {
  if (!(z > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  if (z > 171.6) throw std::overflow_error("gamma_fn: overflow, use log_gamma");
  if (z == std::floor(z) && z <= 30.0) {
    double f = 1.0;
    for (int k = 2; k < static_cast<int>(z); ++k) f *= k;
    return f;
  }
  if (z < 0.5) return kPi / (std::sin(kPi * z) * gamma_fn(1.0 - z));
  if (z >= 2.0) {
    // Shift down to [1, 2); the product keeps the rounding error linear in
    // the number of factors instead of the size of log Gamma.
    double f = z;
    double prod = 1.0;
    while (f >= 2.0) {
      f -= 1.0;
      prod *= f;
    }
    return prod * gamma_fn(f);
  }
  const double zm1 = z - 1.0;
  const double t = zm1 + kLanczosG + 0.5;
  const double half = std::pow(t, 0.5 * (zm1 + 0.5)) * std::exp(-0.5 * t);
  return std::sqrt(2.0 * kPi) * half * half * lanczos_sum(zm1);
}

double log_gamma(double z) {
  if (!(z > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (z < 10.0) return std::log(gamma_fn(z));
  // Stirling series with Bernoulli corrections.
  const double r = 1.0 / z;
  const double r2 = r * r;
  const double series =
      r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 / 1188.0))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
}

namespace detail {

double bessel_j_series(double nu, double x) {
  const double half = 0.5 * x;
  double term = 0.0;
  const double g = nu + 1.0;
  if (g > 0.0 && g < 170.0) {
    term = std::pow(half, nu) / gamma_fn(g);
  } else if (g >= 170.0) {
    term = std::exp(nu * std::log(half) - log_gamma(g));
  } else {
    // nu + 1 in (-1, 0): Gamma(nu+1) = Gamma(nu+2)/(nu+1)
    term = std::pow(half, nu) * (nu + 1.0) / gamma_fn(nu + 2.0);
  }
  double sum = term;
  const double q = half * half;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (k * (k + nu));
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum) && k > half) break;
  }
  return sum;
}

double bessel_j_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = INFINITY;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    // Terms cycle through the pattern +Q, -P, -Q, +P.
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (mag < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

double bessel_j(double nu, double x) {
  if (!(x >= 0.0)) throw DomainError("bessel_j: argument must be nonnegative");
  if (!(nu > -2.0)) throw DomainError("bessel_j: order must exceed -2");
  if (nu <= -1.0) {
    // J_{nu} = (2(nu+1)/x) J_{nu+1} - J_{nu+2}
    if (x == 0.0) {
      if (nu == -1.0) return 0.0;
      return (nu + 1.0) / gamma_fn(nu + 2.0) > 0 ? INFINITY : -INFINITY;
    }
    return 2.0 * (nu + 1.0) / x * bessel_j(nu + 1.0, x) - bessel_j(nu + 2.0, x);
  }
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : INFINITY;
  }
  if (nu <= 3.0) {
    if (x <= bessel_switch_point(nu)) return detail::bessel_j_series(nu, x);
    return detail::bessel_j_asymptotic(nu, x);
  }
  if (x <= 12.0 || x <= nu) return detail::bessel_j_series(nu, x);
  // High order with x > max(12, nu): upward recurrence from two orders in
  // (1, 3] is stable while the order stays below x.
  const int steps = static_cast<int>(std::ceil(nu - 3.0));
  double order = nu - steps;
  double jm = bessel_j(order - 1.0, x);
  double j = bessel_j(order, x);
  for (int k = 0; k < steps; ++k) {
    const double next = 2.0 * order / x * j - jm;
    jm = j;
    j = next;
    order += 1.0;
  }
  return j;
}

double laguerre(int n, double alpha, double x) {
  if (n < 0) throw DomainError("laguerre: degree must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

SignedLog laguerre_log(int n, double alpha, double x) {
  if (n < -1) throw DomainError("laguerre_log: degree must be >= -1");
  if (n == -1) return {};
  return scaled_laguerre(n, alpha, x);
}

SignedLog laguerre_monic(int n, double alpha, double x) {
  if (n < 0) throw DomainError("laguerre_monic: degree must be nonnegative");
  SignedLog l = scaled_laguerre(n, alpha, x);
  if (l.sign == 0) return l;
  l.log_abs += log_gamma(n + 1.0);
  if (n % 2 == 1) l.sign = -l.sign;
  return l;
}

double log_weight(double alpha, double x) {
  if (!(x > 0.0)) throw DomainError("weight: argument must be positive");
  return alpha * std::log(x) - x;
}

double weight(double alpha, double x) { return std::exp(log_weight(alpha, x)); }

double laguerre_log_norm(int n, double alpha) { return log_gamma(n + alpha + 1.0) - log_gamma(n + 1.0); }

DerivativeCheck laguerre_derivative_check(int n, double alpha, double x, double step) {
  if (n < 1) throw DomainError("laguerre_derivative_check: n must be >= 1");
  const double lhs = (laguerre(n, alpha, x + step) - laguerre(n, alpha, x - step)) / (2.0 * step);
  return {lhs, -laguerre(n - 1, alpha + 1.0, x)};
}

std::vector<double> laguerre_functions(int n_max, double alpha, double x) {
  if (n_max < 0) throw DomainError("laguerre_functions: n_max must be nonnegative");
  if (!(x >= 0.0)) throw DomainError("laguerre_functions: argument must be nonnegative");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  double half_log_w;
  if (x == 0.0) {
    if (alpha > 0.0) return out;
    if (alpha < 0.0) throw DomainError("laguerre_functions: singular at x = 0 for alpha < 0");
    half_log_w = 0.0;
  } else {
    half_log_w = 0.5 * (alpha * std::log(x) - x);
  }
  // psi_m = L_m / sqrt(h_m) obeys
  //   sqrt((m+1)(m+1+alpha)) psi_{m+1} = (2m+1+alpha-x) psi_m - sqrt(m(m+alpha)) psi_{m-1}
  std::vector<double> scaled(out.size());
  std::vector<double> log_scale(out.size());
  double ls = -0.5 * log_gamma(alpha + 1.0);
  double prev = 0.0;
  double cur = 1.0;
  scaled[0] = cur;
  log_scale[0] = ls;
  for (int m = 0; m < n_max; ++m) {
    const double next = ((2.0 * m + 1.0 + alpha - x) * cur - std::sqrt(m * (m + alpha)) * prev) /
                        std::sqrt((m + 1.0) * (m + 1.0 + alpha));
    prev = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150) {
      prev /= mag;
      cur /= mag;
      ls += std::log(mag);
    }
    scaled[m + 1] = cur;
    log_scale[m + 1] = ls;
  }
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (scaled[m] == 0.0) continue;
    const double la = std::log(std::abs(scaled[m])) + log_scale[m] + half_log_w;
    out[m] = std::copysign(std::exp(la), scaled[m]);
  }
  return out;
}

double weighted_laguerre(int n, double alpha, double x) {
  const SignedLog l = scaled_laguerre(n, alpha, x);
  if (l.sign == 0) return 0.0;
  return l.sign * std::exp(l.log_abs + 0.5 * log_weight(alpha, x));
}

}  // namespace hardedge
