#include "hardedge/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "hardedge/linalg.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

namespace {

// Kronrod 15 abscissae (positive half, descending) with the embedded
// 7-point Gauss weights at the odd positions.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw QuadratureError("gauss_legendre: n must be positive");
  GaussRule r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(r.nodes.begin(), r.nodes.end());
  std::reverse(r.weights.begin(), r.weights.end());
  return r;
}

GaussRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw QuadratureError("gauss_laguerre: n must be positive");
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(k * (k + alpha));
  const TridiagonalEigen eig = tridiagonal_eigen(diag, off, true);
  GaussRule r{eig.values, std::vector<double>(n)};
  const double mu0 = gamma_fn(alpha + 1.0);
  for (int k = 0; k < n; ++k) r.weights[k] = mu0 * eig.first_components[k] * eig.first_components[k];
  return r;
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts) {
  return integrate(f, a, b, std::span<const double>{}, opts);
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                     const QuadOptions& opts) {
  QuadResult out;
  if (a == b) return out;
  if (b < a) {
    out = integrate(f, b, a, breaks, opts);
    out.value = -out.value;
    return out;
  }
  std::vector<double> cuts{a};
  for (double p : breaks)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gk15(f, cuts[i], cuts[i + 1]);
    out.evaluations += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int splits = 0;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (splits >= opts.max_subdivisions) {
      out.converged = false;
      break;
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    const Panel left = gk15(f, worst.a, mid);
    const Panel right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  return out;
}

double require_converged(const QuadResult& r, const char* what) {
  if (!r.converged || !std::isfinite(r.value))
    throw QuadratureError(std::string(what) + ": adaptive quadrature did not converge");
  return r.value;
}

}  // namespace hardedge
