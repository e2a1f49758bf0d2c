#include "hardedge/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hardedge/dynamics.hpp"
#include "hardedge/ensemble.hpp"
#include "hardedge/kernels.hpp"
#include "hardedge/linalg.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o << v;
  return o.str();
}

constexpr int kPanelNodes = 8;
constexpr double kPanelWidth = 3.0;  // in u = sqrt(y); eigenvalue spacing in u is at least pi

}  // namespace

void TailIntegralSpec::validate() const {
  Order a(alpha);
  (void)a;
  if (n < 1) throw std::invalid_argument("tail integral: N must be positive");
  if (!(s > 0.0)) throw std::invalid_argument("tail integral: cutoff s must be positive");
  if (!(x > 0.0) || !(x <= r)) throw std::invalid_argument("tail integral: base point must lie in (0, r]");
  if (!(omega > 0.0)) throw std::invalid_argument("tail integral: omega must be positive");
}

double tail_upper_limit(int n) {
  const double m = hard_edge_factor(n);
  return m * (m + 10.0 * std::cbrt(m) + 20.0);
}

// ---------------------------------------------------------------------------

namespace {

struct TailGrid {
  std::vector<double> y, w;  // nodes and dy-weights
};

TailGrid tail_grid(int n, double x, std::span<const double> s_list, double omega) {
  const double smin = *std::min_element(s_list.begin(), s_list.end());
  const double umax = std::sqrt(tail_upper_limit(n));
  std::vector<double> left, right;
  if (x > smin) {
    left = {0.0, std::sqrt(x - smin)};
    for (double s : s_list)
      if (x > s) left.push_back(std::sqrt(x - s));
  }
  right = {std::sqrt(x + smin), umax};
  for (double s : s_list) right.push_back(std::sqrt(x + s));
  for (double b : {omega * n, 4.0 * n * omega}) right.push_back(std::sqrt(b));

  const GaussRule gl = gauss_legendre(kPanelNodes);
  const double pole = std::sqrt(x);
  TailGrid g;
  auto fill = [&](std::vector<double> br) {
    if (br.empty()) return;
    std::sort(br.begin(), br.end());
    const double lo = br.front(), hi = br.back();
    br.erase(std::remove_if(br.begin(), br.end(), [&](double b) { return b < lo || b > hi; }), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      // panels no wider than their distance to the pole of 1/|x - y|, so
      // the grading is geometric next to the excluded window
      double a = br[k];
      const double b = br[k + 1];
      while (a < b) {
        double h = std::min(kPanelWidth, b - a);
        auto gap = [&](double lo, double hi) { return std::max(0.0, std::max(lo - pole, pole - hi)); };
        while (h > gap(a, a + h) && h > 1e-3 * kPanelWidth) h *= 0.5;
        if (b - (a + h) < 1e-12 * b) h = b - a;
        const double c = a + 0.5 * h;
        for (int q = 0; q < kPanelNodes; ++q) {
          const double u = c + 0.5 * h * gl.nodes[q];
          g.y.push_back(u * u);
          g.w.push_back(0.5 * h * gl.weights[q] * 2.0 * u);
        }
        a += h;
      }
    }
  };
  fill(left);
  fill(right);
  return g;
}

// rows of psi_m(y) = phi_m(y / 4N) / sqrt(4N), m < N
Eigen::MatrixXd feature_matrix(double alpha, int n, std::span<const double> ys) {
  const double f = hard_edge_factor(n);
  Eigen::MatrixXd psi(static_cast<Eigen::Index>(ys.size()), n);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const std::vector<double> phi = laguerre_functions(n - 1, alpha, ys[i] / f);
    for (int m = 0; m < n; ++m) psi(static_cast<Eigen::Index>(i), m) = phi[m] / std::sqrt(f);
  }
  return psi;
}

}  // namespace

std::vector<TailIntegrals> tail_integrals(Order alpha, int n, double x, std::span<const double> s_list,
                                          double omega) {
  if (s_list.empty()) throw std::invalid_argument("tail_integrals: empty cutoff list");
  for (double s : s_list)
    if (!(s > 0.0)) throw std::invalid_argument("tail_integrals: cutoffs must be positive");
  if (n < 1 || !(x > 0.0) || !(omega > 0.0)) throw std::invalid_argument("tail_integrals: bad N, x or omega");

  std::vector<double> sorted(s_list.begin(), s_list.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t ns = sorted.size();

  const TailGrid g = tail_grid(n, x, sorted, omega);
  const std::size_t m = g.y.size();
  const Eigen::MatrixXd psi = feature_matrix(alpha.value(), n, g.y);
  const double xv[] = {x};
  const Eigen::RowVectorXd px = feature_matrix(alpha.value(), n, xv).row(0);
  const double kxx = px.squaredNorm();
  if (!(kxx > 0.0)) throw std::domain_error("tail_integrals: kernel vanishes at the base point");

  // level[i]: number of sorted cutoffs whose region contains node i
  std::vector<std::size_t> level(m);
  std::vector<double> rho(m), kx(m), inv(m), wt(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double dist = std::abs(g.y[i] - x);
    level[i] = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), dist) - sorted.begin());
    rho[i] = psi.row(static_cast<Eigen::Index>(i)).squaredNorm();
    kx[i] = psi.row(static_cast<Eigen::Index>(i)).dot(px);
    inv[i] = 1.0 / dist;
    wt[i] = g.w[i] * inv[i];
  }

  // per-level accumulators; suffix sums give the value for each cutoff
  std::vector<double> a(ns + 1), b(ns + 1), c1(ns + 1), d1(ns + 1), far(ns + 1), c2(ns + 1), d2(ns + 1), kk(ns + 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t l = level[i];
    const double palm = kx[i] * kx[i] / kxx;
    a[l] += wt[i] * rho[i];
    b[l] += wt[i] * palm;
    c1[l] += wt[i] * inv[i] * rho[i];
    d1[l] += wt[i] * inv[i] * palm;
    if (g.y[i] >= omega * n) far[l] += wt[i] * rho[i];
  }

  constexpr Eigen::Index kBlock = 128;
  for (Eigen::Index r0 = 0; r0 < static_cast<Eigen::Index>(m); r0 += kBlock) {
    const Eigen::Index rows = std::min<Eigen::Index>(kBlock, static_cast<Eigen::Index>(m) - r0);
    const Eigen::MatrixXd kb = psi.middleRows(r0, rows) * psi.transpose();
    for (Eigen::Index bi = 0; bi < rows; ++bi) {
      const std::size_t i = static_cast<std::size_t>(r0 + bi);
      if (level[i] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t l = std::min(level[i], level[j]);
        if (l == 0) continue;
        const double kij = kb(bi, static_cast<Eigen::Index>(j));
        const double ww = wt[i] * wt[j];
        const double k2 = kij * kij;
        c2[l] += ww * (rho[i] * rho[j] - k2);
        kk[l] += ww * k2;
        d2[l] += ww * std::abs(-kx[i] * kx[i] * rho[j] - kx[j] * kx[j] * rho[i] + 2.0 * kx[i] * kx[j] * kij) / kxx;
      }
    }
  }

  std::vector<TailIntegrals> by_sorted(ns);
  TailIntegrals acc;
  for (std::size_t l = ns; l >= 1; --l) {
    acc.a += a[l];
    acc.b += b[l];
    acc.c_single += c1[l];
    acc.d_single += d1[l];
    acc.a_far += far[l];
    acc.c_pair += c2[l];
    acc.d_pair += d2[l];
    acc.kernel_pair += kk[l];
    acc.s = sorted[l - 1];
    by_sorted[l - 1] = acc;
  }
  std::vector<TailIntegrals> out;
  for (double s : s_list) out.push_back(by_sorted[std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin()]);
  return out;
}

namespace {

double adaptive_tail(const TailIntegralSpec& spec, bool palm) {
  spec.validate();
  const LaguerreKernel k(Order(spec.alpha), spec.n);
  const double x = spec.x, s = spec.s;
  const double kxx = k.diagonal(x);
  auto integrand = [&](double u) {
    const double y = u * u;
    const double dens = palm ? std::pow(k(y, x), 2) / kxx : k.diagonal(y);
    return 2.0 * u * dens / std::abs(x - y);
  };
  QuadOptions opts;
  opts.abs_tol = 1e-8;
  opts.rel_tol = 1e-10;
  opts.max_subdivisions = 50000;
  const double umax = std::sqrt(tail_upper_limit(spec.n));
  double total = 0.0;
  if (x > s) total += require_converged(integrate(integrand, 0.0, std::sqrt(x - s), opts), "tail integral (left)");
  const double ulo = std::sqrt(x + s);
  std::vector<double> br;
  for (double u = ulo + kPanelWidth; u < umax; u += kPanelWidth) br.push_back(u);
  br.push_back(std::sqrt(spec.omega * spec.n));
  br.push_back(std::sqrt(4.0 * spec.n * spec.omega));
  std::sort(br.begin(), br.end());
  total += require_converged(integrate(integrand, ulo, umax, br, opts), "tail integral");
  return total;
}

TailIntegrals grid_tail(const TailIntegralSpec& spec) {
  spec.validate();
  const double s[] = {spec.s};
  return tail_integrals(Order(spec.alpha), spec.n, spec.x, s, spec.omega)[0];
}

}  // namespace

double tail_integral_A(const TailIntegralSpec& spec) { return adaptive_tail(spec, false); }
double tail_integral_B(const TailIntegralSpec& spec) { return adaptive_tail(spec, true); }
double tail_integral_C(const TailIntegralSpec& spec) { return grid_tail(spec).c(); }
double tail_integral_D(const TailIntegralSpec& spec) { return grid_tail(spec).d(); }

DiagnosticReport tail_trend_report(Order alpha, const TailTrendOptions& o, Table* raw) {
  if (o.n_list.empty() || o.x_list.empty() || o.s_list.empty()) throw std::invalid_argument("tails: empty grid");
  for (double x : o.x_list)
    if (!(x > 0.0 && x <= o.r)) throw std::invalid_argument("tails: base points must lie in (0, r]");
  const std::size_t nn = o.n_list.size(), nx = o.x_list.size();
  std::vector<std::vector<TailIntegrals>> res(nn * nx);
  parallel_for(nn * nx, o.workers, [&](std::size_t k) {
    res[k] = tail_integrals(alpha, o.n_list[k / nx], o.x_list[k % nx], o.s_list, o.omega);
  });

  DiagnosticReport r;
  r.name = "tails";
  r.params["alpha"] = alpha.value();
  r.params["n_list"] = o.n_list;
  r.params["x_list"] = o.x_list;
  r.params["s_list"] = o.s_list;
  r.params["omega"] = o.omega;
  r.params["r"] = o.r;
  const double level = 2.0 / o.omega + o.margin;
  r.params["level_threshold"] = level;

  const char* names[] = {"A", "B", "C", "D"};
  auto pick = [](const TailIntegrals& t, int which) {
    switch (which) {
      case 0: return t.a;
      case 1: return t.b;
      case 2: return t.c();
      default: return t.d();
    }
  };
  // s in the order given; monotone means non-increasing along increasing s
  std::vector<std::size_t> order(o.s_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return o.s_list[p] < o.s_list[q]; });
  const std::size_t smax = order.back();
  std::size_t nmax = 0;
  for (std::size_t i = 0; i < nn; ++i)
    if (o.n_list[i] > o.n_list[nmax]) nmax = i;

  for (std::size_t in = 0; in < nn; ++in)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const auto& v = res[in * nx + ix];
      const std::string tag = "_N" + std::to_string(o.n_list[in]) + "_x" + fmt(o.x_list[ix]);
      for (int w = 0; w < 4; ++w) {
        double rise = -INFINITY;
        for (std::size_t k = 0; k + 1 < order.size(); ++k)
          rise = std::max(rise, pick(v[order[k + 1]], w) - pick(v[order[k]], w));
        if (order.size() < 2) rise = 0.0;
        r.add(std::string(names[w]) + tag + "_max_increase_in_s", rise, 0.0, rise <= 0.0);
      }
      const double bound = o.n_list[in] / (o.n_list[in] * o.omega - o.r);
      r.add("A_far" + tag + "_vs_bound", v[smax].a_far, bound, v[smax].a_far <= bound);
    }
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const auto& v = res[nmax * nx + ix][smax];
    const std::string tag = "_N" + std::to_string(o.n_list[nmax]) + "_x" + fmt(o.x_list[ix]) + "_s" + fmt(o.s_list[smax]);
    for (int w = 0; w < 4; ++w) r.add(std::string(names[w]) + tag, pick(v, w), level, pick(v, w) <= level);
  }

  if (raw) {
    raw->columns = {"alpha", "n", "x", "s", "A", "B", "C", "D", "C_single", "C_pair", "D_single", "D_pair", "A_far"};
    raw->rows.clear();
    for (std::size_t in = 0; in < nn; ++in)
      for (std::size_t ix = 0; ix < nx; ++ix)
        for (const auto& t : res[in * nx + ix])
          raw->rows.push_back({alpha.value(), static_cast<double>(o.n_list[in]), o.x_list[ix], t.s, t.a, t.b, t.c(), t.d(),
                               t.c_single, t.c_pair, t.d_single, t.d_pair, t.a_far});
  }
  return r;
}

// ---------------------------------------------------------------------------

double lemma52_sup(Order alpha, int n, double omega) {
  if (n < 1 || !(omega > 0.0)) throw std::invalid_argument("lemma52: bad N or omega");
  const LaguerreKernel k(alpha, n);
  const double hi = hard_edge_factor(n) * omega;
  if (!(hi > 1.0)) throw std::invalid_argument("lemma52: empty range [1, 4 N omega]");
  auto g = [&](double u) { return u * k.diagonal(u * u); };
  const double u0 = 1.0, u1 = std::sqrt(hi), h = 0.01;
  const int steps = static_cast<int>(std::ceil((u1 - u0) / h));
  double best = g(u0), ubest = u0;
  for (int i = 1; i <= steps; ++i) {
    const double u = std::min(u1, u0 + i * h);
    const double v = g(u);
    if (v > best) {
      best = v;
      ubest = u;
    }
  }
  // golden-section refinement around the best grid point
  double a = std::max(u0, ubest - h), b = std::min(u1, ubest + h);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 60; ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - ratio * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + ratio * (b - a);
      gd = g(d);
    }
  }
  return std::max({best, gc, gd});
}

DiagnosticReport lemma52_report(Order alpha, std::span<const int> n_list, double omega, double rel_tol, Table* raw) {
  if (n_list.size() < 2) throw std::invalid_argument("lemma52: need at least two N values");
  DiagnosticReport r;
  r.name = "lemma52";
  r.params["alpha"] = alpha.value();
  r.params["n_list"] = std::vector<int>(n_list.begin(), n_list.end());
  r.params["omega"] = omega;
  std::vector<double> sups;
  for (int n : n_list) {
    sups.push_back(lemma52_sup(alpha, n, omega));
    r.add("sup_sqrt_x_rho_N" + std::to_string(n), sups.back(), NAN, std::isfinite(sups.back()));
  }
  for (std::size_t i = 1; i < sups.size(); ++i) {
    const double rel = std::abs(sups[i] - sups[i - 1]) / sups[i - 1];
    r.add("relative_change_N" + std::to_string(n_list[i - 1]) + "_N" + std::to_string(n_list[i]), rel, rel_tol,
          rel < rel_tol);
  }
  if (raw) {
    raw->columns = {"alpha", "n", "omega", "sup_sqrt_x_rho"};
    raw->rows.clear();
    for (std::size_t i = 0; i < sups.size(); ++i)
      raw->rows.push_back({alpha.value(), static_cast<double>(n_list[i]), omega, sups[i]});
  }
  return r;
}

// ---------------------------------------------------------------------------

void HilbSpec::validate() const {
  Order a(alpha);
  (void)a;
  if (n_list.size() < 2) throw std::invalid_argument("hilb: need at least two degrees");
  for (int n : n_list)
    if (n < 1) throw std::invalid_argument("hilb: degrees must be positive");
  if (!(x_lo > 0.0) || !(x_hi > x_lo)) throw std::invalid_argument("hilb: need 0 < x_lo < x_hi");
  if (points < 2) throw std::invalid_argument("hilb: need at least two grid points");
}

double hilb_log_amplitude(int n, double alpha) {
  const double nbar = n + 0.5 * (alpha + 1.0);
  return log_gamma(n + 1.0 + alpha) - log_gamma(n + 1.0) - 0.5 * alpha * std::log(nbar);
}

double hilb_normalized_residual(int n, double alpha, double x) {
  const double nbar = n + 0.5 * (alpha + 1.0);
  const double resid =
      weighted_laguerre(n, alpha, x) - std::exp(hilb_log_amplitude(n, alpha)) * bessel_j(alpha, std::sqrt(4.0 * nbar * x));
  return std::abs(resid) * std::pow(static_cast<double>(n), 0.75 - 0.5 * alpha) / std::pow(x, 1.25);
}

DiagnosticReport hilb_residual(const HilbSpec& spec, Table* raw) {
  spec.validate();
  DiagnosticReport r;
  r.name = "hilb";
  r.params["alpha"] = spec.alpha;
  r.params["n_list"] = spec.n_list;
  r.params["x_lo"] = spec.x_lo;
  r.params["x_hi"] = spec.x_hi;
  r.params["points"] = spec.points;
  if (raw) {
    raw->columns = {"alpha", "n", "x", "normalized_residual"};
    raw->rows.clear();
  }
  std::vector<double> ln, ls;
  for (int n : spec.n_list) {
    double sup = 0.0;
    for (int i = 0; i < spec.points; ++i) {
      const double x = spec.x_lo + (spec.x_hi - spec.x_lo) * i / (spec.points - 1);
      const double v = hilb_normalized_residual(n, spec.alpha, x);
      sup = std::max(sup, v);
      if (raw) raw->rows.push_back({spec.alpha, static_cast<double>(n), x, v});
    }
    r.add("normalized_sup_n" + std::to_string(n), sup, NAN, std::isfinite(sup));
    ln.push_back(std::log(static_cast<double>(n)));
    ls.push_back(std::log(sup));
  }
  const double mx = std::accumulate(ln.begin(), ln.end(), 0.0) / ln.size();
  const double my = std::accumulate(ls.begin(), ls.end(), 0.0) / ls.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ln.size(); ++i) {
    num += (ln[i] - mx) * (ls[i] - my);
    den += (ln[i] - mx) * (ln[i] - mx);
  }
  const double slope = num / den;
  r.add("log_slope", slope, spec.max_slope, slope <= spec.max_slope);
  return r;
}

// ---------------------------------------------------------------------------

TestFunction parse_test_function(const std::string& name) {
  if (name == "zero" || name == "0") return TestFunction::zero;
  if (name == "bump" || name == "1") return TestFunction::bump;
  if (name == "wide-bump" || name == "2") return TestFunction::wide_bump;
  if (name == "cylindrical" || name == "3") return TestFunction::cylindrical;
  throw std::invalid_argument("unknown test function '" + name + "' (expected zero, bump, wide-bump or cylindrical)");
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::zero: return "zero";
    case TestFunction::bump: return "bump";
    case TestFunction::wide_bump: return "wide-bump";
    default: return "cylindrical";
  }
}

std::vector<TestFunction> ibp_family() { return {TestFunction::bump, TestFunction::wide_bump, TestFunction::cylindrical}; }

namespace {

TestValue smooth_bump(double x, double lo, double hi) {
  const double t = (2.0 * x - lo - hi) / (hi - lo);
  if (!(std::abs(t) < 1.0)) return {0.0, 0.0};
  const double q = 1.0 - t * t;
  const double f = std::exp(-1.0 / q);
  return {f, f * (-2.0 * t / (q * q)) * (2.0 / (hi - lo))};
}

}  // namespace

TestValue evaluate_test_function(TestFunction fn, std::span<const double> config, std::size_t i) {
  const double x = config[i];
  switch (fn) {
    case TestFunction::zero: return {0.0, 0.0};
    case TestFunction::bump: return smooth_bump(x, 1.0, 3.0);
    case TestFunction::wide_bump: return smooth_bump(x, 2.0, 8.0);
    case TestFunction::cylindrical: {
      int count = 0;
      for (std::size_t j = 0; j < config.size(); ++j)
        if (j != i && config[j] >= 0.0 && config[j] <= 2.0) ++count;
      const double g = 1.0 / (1.0 + count);
      const TestValue b = smooth_bump(x, 1.0, 3.0);
      return {b.f * g, b.df * g};
    }
  }
  return {0.0, 0.0};
}

namespace {

struct Moments {
  double sum = 0.0, sq = 0.0;
  void add(double v) {
    sum += v;
    sq += v * v;
  }
  double mean(double n) const { return sum / n; }
  double se(double n) const {
    const double m = sum / n;
    return std::sqrt(std::max(0.0, (sq / n - m * m) * n / (n - 1.0)) / n);
  }
};

std::vector<DiagnosticReport> ibp_reports(Order alpha, int n, std::span<const TestFunction> fns, const IbpOptions& o) {
  if (o.draws < 2) throw std::invalid_argument("ibp: need at least two draws");
  const auto draws = sample_batch(EnsembleSpec(alpha, n, o.seed), static_cast<std::size_t>(o.draws), o.workers);
  const std::size_t nf = fns.size();
  std::vector<double> lhs(draws.size() * nf), rhs(draws.size() * nf);
  parallel_for(draws.size(), o.workers, [&](std::size_t k) {
    const std::vector<double>& x = draws[k].points;
    for (std::size_t f = 0; f < nf; ++f) {
      double l = 0.0, rr = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const TestValue t = evaluate_test_function(fns[f], x, i);
        if (t.f == 0.0 && t.df == 0.0) continue;
        l += log_derivative(alpha, n, i, x) * t.f;
        rr -= t.df;
      }
      lhs[k * nf + f] = l;
      rhs[k * nf + f] = rr;
    }
  });
  std::vector<DiagnosticReport> out;
  const double m = static_cast<double>(draws.size());
  for (std::size_t f = 0; f < nf; ++f) {
    Moments ml, mr, md;
    for (std::size_t k = 0; k < draws.size(); ++k) {
      ml.add(lhs[k * nf + f]);
      mr.add(rhs[k * nf + f]);
      md.add(lhs[k * nf + f] - rhs[k * nf + f]);
    }
    DiagnosticReport r;
    r.name = "ibp_" + to_string(fns[f]);
    r.params["alpha"] = alpha.value();
    r.params["n"] = n;
    r.params["draws"] = o.draws;
    r.params["seed"] = o.seed;
    r.params["test_function"] = to_string(fns[f]);
    const double se_l = ml.se(m), se_d = md.se(m);
    if (se_l > 0.2 * std::abs(ml.mean(m))) r.params["warning"] = "insufficient draws: SE of lhs exceeds 20% of |lhs|";
    r.add("lhs", ml.mean(m), NAN, true);
    r.add("rhs", mr.mean(m), NAN, true);
    r.add("se_lhs", se_l, NAN, true);
    r.add("se_rhs", mr.se(m), NAN, true);
    r.add("se_difference", se_d, NAN, true);
    const double z = se_d > 0.0 ? std::abs(md.mean(m)) / se_d : (md.mean(m) == 0.0 ? 0.0 : INFINITY);
    r.add("abs_difference_in_se", z, o.max_z, z <= o.max_z);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

DiagnosticReport ibp_identity_check(Order alpha, int n, TestFunction fn, const IbpOptions& o) {
  const TestFunction one[] = {fn};
  return ibp_reports(alpha, n, one, o)[0];
}

DiagnosticReport ibp_family_check(Order alpha, int n, const IbpOptions& o) {
  const std::vector<TestFunction> fam = ibp_family();
  DiagnosticReport r = merge_reports("ibp", ibp_reports(alpha, n, fam, o));
  r.params["alpha"] = alpha.value();
  r.params["n"] = n;
  r.params["draws"] = o.draws;
  r.params["seed"] = o.seed;
  return r;
}

// ---------------------------------------------------------------------------

DiagnosticReport nystrom_report(Order alpha, double L, int m, double eps) {
  if (!(L > 0.0) || m < 2) throw std::invalid_argument("nystrom: need L > 0 and m >= 2");
  const BesselKernel k(alpha);
  const GaussRule gl = gauss_legendre(m);
  const double ul = std::sqrt(L);
  std::vector<double> x(m), sw(m);
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * ul * (gl.nodes[i] + 1.0);
    x[i] = u * u;
    sw[i] = std::sqrt(0.5 * ul * gl.weights[i] * 2.0 * u);
  }
  Matrix a(m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double v = sw[i] * k(x[i], x[j]) * sw[j];
      a(i, j) = v;
      a(j, i) = v;
    }
  const std::vector<double> ev = symmetric_eigenvalues(a);
  DiagnosticReport r;
  r.name = "nystrom";
  r.params["alpha"] = alpha.value();
  r.params["L"] = L;
  r.params["m"] = m;
  r.add("min_eigenvalue", ev.front(), -eps, ev.front() >= -eps);
  r.add("max_eigenvalue", ev.back(), 1.0 + eps, ev.back() <= 1.0 + eps);
  return r;
}

}  // namespace hardedge
