#include "hardedge/kernels.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace hardedge {

namespace {

using Derivs = std::array<double, 4>;

constexpr std::array<double, 4> kFactorial = {1.0, 1.0, 2.0, 6.0};

// For K(x,y) = c (u(x) v(y) - v(x) u(y)) / (x - y), expand u and v about
// the midpoint m with half-width h = (y - x)/2. Only odd total orders
// survive; dividing by -2h leaves even powers of h, so the result is
// symmetric in (x, y) bit for bit.
double symmetric_taylor(const Derivs& u, const Derivs& v, double c, double h) {
  double sum = 0.0;
  for (int j = 0; j <= 3; ++j) {
    for (int k = 0; k <= 3 - j; ++k) {
      const int order = j + k;
      if (order % 2 == 0) continue;
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      const double hp = order == 1 ? 1.0 : h * h;
      sum += sign * hp / (kFactorial[j] * kFactorial[k]) * (u[j] * v[k] - v[j] * u[k]);
    }
  }
  return -0.5 * c * sum;
}

bool in_diagonal_band(double x_he, double y_he) {
  const double mid = 0.5 * (x_he + y_he);
  return std::abs(x_he - y_he) < kDiagonalBand * std::max(1.0, std::sqrt(mid));
}

double binom(int k, int j) {
  double r = 1.0;
  for (int i = 1; i <= j; ++i) r = r * (k - j + i) / i;
  return r;
}

// --- Bessel kernel pieces, in the variable t = x (B(t) = J_a(sqrt t)). ---

// d^j/dt^j of r(t) = 1 - a^2/t.
double bessel_r(int j, double alpha, double t) {
  if (j == 0) return 1.0 - alpha * alpha / t;
  double fact = 1.0;
  for (int i = 2; i <= j; ++i) fact *= i;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return -alpha * alpha * sign * fact / std::pow(t, j + 1);
}

struct BesselDerivs {
  Derivs a;  // A(t) = sqrt(t) J_{a+1}(sqrt t)
  Derivs b;  // B(t) = J_a(sqrt t)
};

BesselDerivs bessel_derivs(double alpha, double t) {
  const double z = std::sqrt(t);
  std::array<double, 5> b{};
  b[0] = bessel_j(alpha, z);
  const double a0 = z * bessel_j(alpha + 1.0, z);
  b[1] = (alpha * b[0] - a0) / (2.0 * t);
  // 4t B'' + 4B' + (1 - a^2/t) B = 0, differentiated k times.
  for (int k = 0; k + 2 <= 4; ++k) {
    double s = 4.0 * (k + 1) * b[k + 1];
    for (int j = 0; j <= k; ++j) s += binom(k, j) * bessel_r(j, alpha, t) * b[k - j];
    b[k + 2] = -s / (4.0 * t);
  }
  BesselDerivs out;
  for (int k = 0; k < 4; ++k) {
    out.b[k] = b[k];
    // A = aB - 2tB'  =>  A^(k) = a B^(k) - 2t B^(k+1) - 2k B^(k)
    out.a[k] = alpha * b[k] - 2.0 * t * b[k + 1] - 2.0 * k * b[k];
  }
  return out;
}

// --- Laguerre functions phi_{N-2}, phi_{N-1}, phi_N at one point. ---

struct TopFunctions {
  double m2 = 0.0, m1 = 0.0, m0 = 0.0;
};

TopFunctions top_functions(int n, double alpha, double x) {
  double p2 = 0.0, p1 = 0.0, cur = 1.0;
  double ls = -0.5 * log_gamma(alpha + 1.0);
  for (int m = 0; m < n; ++m) {
    const double next = ((2.0 * m + 1.0 + alpha - x) * cur - std::sqrt(m * (m + alpha)) * p1) /
                        std::sqrt((m + 1.0) * (m + 1.0 + alpha));
    p2 = p1;
    p1 = cur;
    cur = next;
    const double mag = std::abs(cur);
    if (mag > 1e150) {
      p2 /= mag;
      p1 /= mag;
      cur /= mag;
      ls += std::log(mag);
    }
  }
  const double scale_log = ls + 0.5 * (alpha * std::log(x) - x);
  auto finish = [&](double v) { return v == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(v)) + scale_log), v); };
  return {finish(p2), finish(p1), finish(cur)};
}

// Polynomial parts P = L_{N-1}/sqrt(h_{N-1}), Q = L_N/sqrt(h_N) and their
// derivatives at x, all expressed relative to a shared exp(log_scale).
// First derivatives come from dL_n^{[a]}/dx = -L_{n-1}^{[a+1]}, which has
// no cancellation near x = 0.
struct PolyParts {
  Derivs p{}, q{};
  double log_scale = 0.0;
};

PolyParts poly_parts(int n, double alpha, double x) {
  const double hp = 0.5 * laguerre_log_norm(n - 1, alpha);
  const double hq = 0.5 * laguerre_log_norm(n, alpha);
  SignedLog vals[4] = {laguerre_log(n - 1, alpha, x), laguerre_log(n, alpha, x), laguerre_log(n - 2, alpha + 1.0, x),
                       laguerre_log(n - 1, alpha + 1.0, x)};
  vals[0].log_abs -= hp;
  vals[1].log_abs -= hq;
  vals[2].log_abs -= hp;
  vals[3].log_abs -= hq;
  vals[2].sign = -vals[2].sign;
  vals[3].sign = -vals[3].sign;
  double ls = -INFINITY;
  for (const auto& v : vals)
    if (v.sign != 0) ls = std::max(ls, v.log_abs);
  auto rel = [&](const SignedLog& v) { return v.sign == 0 ? 0.0 : v.sign * std::exp(v.log_abs - ls); };
  PolyParts out;
  out.log_scale = ls;
  out.p[0] = rel(vals[0]);
  out.q[0] = rel(vals[1]);
  out.p[1] = rel(vals[2]);
  out.q[1] = rel(vals[3]);
  // x f'' + (a+1-x) f' + m f = 0, differentiated k times.
  auto extend = [&](Derivs& f, int m) {
    for (int k = 0; k + 2 <= 3; ++k) f[k + 2] = -((k + alpha + 1.0 - x) * f[k + 1] + (m - k) * f[k]) / x;
  };
  extend(out.p, n - 1);
  extend(out.q, n);
  return out;
}

void require_positive(double x, double y, const char* what) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError(std::string(what) + ": arguments must be positive");
}

}  // namespace

double BesselKernel::operator()(double x, double y) const {
  require_positive(x, y, "BesselKernel");
  if (in_diagonal_band(x, y)) {
    const double mid = 0.5 * (x + y);
    const BesselDerivs d = bessel_derivs(alpha_, mid);
    return symmetric_taylor(d.a, d.b, 0.5, 0.5 * (y - x));
  }
  const double sx = std::sqrt(x), sy = std::sqrt(y);
  const double ax = sx * bessel_j(alpha_ + 1.0, sx), bx = bessel_j(alpha_, sx);
  const double ay = sy * bessel_j(alpha_ + 1.0, sy), by = bessel_j(alpha_, sy);
  const double num = ax * by - bx * ay;
  return num / (2.0 * (x - y));
}

double BesselKernel::diagonal(double x) const {
  require_positive(x, x, "BesselKernel::diagonal");
  const double s = std::sqrt(x);
  const double ja = bessel_j(alpha_, s);
  return 0.25 * (ja * ja - bessel_j(alpha_ + 1.0, s) * bessel_j(alpha_ - 1.0, s));
}

LaguerreKernel::LaguerreKernel(Order alpha, int n, Scale scale) : alpha_(alpha.value()), n_(n), scale_(scale) {
  if (n < 1) throw DomainError("LaguerreKernel: ensemble size must be positive");
}

double LaguerreKernel::operator()(double x, double y) const {
  require_positive(x, y, "LaguerreKernel");
  const double xm = to_matrix(x), ym = to_matrix(y);
  const double f = hard_edge_factor(n_);
  if (!in_diagonal_band(xm * f, ym * f)) return christoffel_darboux(x, y);
  const double mid = 0.5 * (xm + ym);
  const PolyParts pp = poly_parts(n_, alpha_, mid);
  const double c = std::sqrt(static_cast<double>(n_) * (n_ + alpha_));
  const double weights = 0.5 * (alpha_ * std::log(xm) - xm) + 0.5 * (alpha_ * std::log(ym) - ym) + 2.0 * pp.log_scale;
  return prefactor() * std::exp(weights) * symmetric_taylor(pp.p, pp.q, c, 0.5 * (ym - xm));
}

double LaguerreKernel::christoffel_darboux(double x, double y) const {
  require_positive(x, y, "LaguerreKernel");
  const double xm = to_matrix(x), ym = to_matrix(y);
  const TopFunctions tx = top_functions(n_, alpha_, xm);
  const TopFunctions ty = top_functions(n_, alpha_, ym);
  const double c = std::sqrt(static_cast<double>(n_) * (n_ + alpha_));
  return prefactor() * c * (tx.m1 * ty.m0 - tx.m0 * ty.m1) / (xm - ym);
}

double LaguerreKernel::sum_form(double x, double y) const {
  require_positive(x, y, "LaguerreKernel");
  const std::vector<double> fx = laguerre_functions(n_ - 1, alpha_, to_matrix(x));
  const std::vector<double> fy = laguerre_functions(n_ - 1, alpha_, to_matrix(y));
  double s = 0.0;
  for (int m = 0; m < n_; ++m) s += fx[m] * fy[m];
  return prefactor() * s;
}

double LaguerreKernel::confluent_diagonal(double x) const {
  require_positive(x, x, "LaguerreKernel");
  const double xm = to_matrix(x);
  const double base = log_weight(alpha_, xm) + log_gamma(n_ + 1.0) - log_gamma(n_ + alpha_);
  auto product = [&](const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0 || b.sign == 0) return 0.0;
    return a.sign * b.sign * std::exp(base + a.log_abs + b.log_abs);
  };
  const double t1 = product(laguerre_log(n_ - 1, alpha_ + 1.0, xm), laguerre_log(n_ - 1, alpha_, xm));
  const double t2 = product(laguerre_log(n_, alpha_, xm), laguerre_log(n_ - 2, alpha_ + 1.0, xm));
  return prefactor() * (t1 - t2);
}

double m_alpha(int n, double alpha, double x) {
  if (n < 1) throw DomainError("m_alpha: n must be positive");
  if (!(x > 0.0)) throw DomainError("m_alpha: argument must be positive");
  const double base = (alpha + 0.5) * std::log(x) - x;
  auto product = [&](const SignedLog& a, const SignedLog& b) {
    if (a.sign == 0 || b.sign == 0) return 0.0;
    return a.sign * b.sign * std::exp(base + a.log_abs + b.log_abs);
  };
  return product(laguerre_log(n - 1, alpha + 1.0, x), laguerre_log(n - 1, alpha, x)) -
         product(laguerre_log(n, alpha, x), laguerre_log(n - 2, alpha + 1.0, x));
}

PalmKernel::PalmKernel(LaguerreKernel base, double x, double floor) : base_(base), x_(x), kxx_(0.0) {
  if (!(x > 0.0)) throw DomainError("PalmKernel: conditioning point must be positive");
  kxx_ = base_(x, x);
  if (!(kxx_ > floor))
    throw KernelError("PalmKernel: kernel diagonal at the conditioning point is below the floor");
}

double PalmKernel::operator()(double y, double z) const {
  return base_(y, z) - base_(y, x_) * base_(x_, z) / kxx_;
}

double correlation_from_matrix(const KernelMatrix& m) {
  const std::size_t n = m.entries.size();
  double diag_product = 1.0;
  for (std::size_t i = 0; i < n; ++i) diag_product *= std::abs(m.entries(i, i));
  const double det = determinant(m.entries);
  if (det >= 0.0) return det;
  if (det >= -1e-10 * diag_product) return 0.0;
  std::ostringstream msg;
  msg << "correlation_fn: negative determinant " << det << " beyond roundoff (kernel not PSD?)";
  throw KernelError(msg.str());
}

DiagnosticReport kernel_convergence_report(Order alpha, std::span<const int> n_list, std::span<const double> grid,
                                           double target) {
  DiagnosticReport report;
  report.name = "kernel-convergence";
  report.params["alpha"] = alpha.value();
  report.params["n_list"] = std::vector<int>(n_list.begin(), n_list.end());
  report.params["grid_points"] = grid.size();
  report.params["grid_min"] = grid.empty() ? 0.0 : grid.front();
  report.params["grid_max"] = grid.empty() ? 0.0 : grid.back();

  const BesselKernel limit(alpha);
  std::vector<double> exact(grid.size() * grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) exact[i * grid.size() + j] = limit(grid[i], grid[j]);

  double previous = INFINITY;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    if (k > 0 && n_list[k] <= n_list[k - 1]) throw DomainError("kernel_convergence_report: N list must increase");
    const LaguerreKernel kn(alpha, n_list[k]);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i; j < grid.size(); ++j)
        sup = std::max(sup, std::abs(kn(grid[i], grid[j]) - exact[i * grid.size() + j]));
    const bool last = k + 1 == n_list.size();
    const bool pass = sup < previous && (!last || sup < target);
    report.add("sup_error_N=" + std::to_string(n_list[k]), sup, last ? target : previous, pass);
    previous = sup;
  }
  return report;
}

}  // namespace hardedge
