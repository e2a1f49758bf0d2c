#include "hardedge/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "hardedge/linalg.hpp"
#include "hardedge/quadrature.hpp"
#include "hardedge/rng.hpp"

namespace hardedge {

Sampler parse_sampler(const std::string& name) {
  if (name == "tridiagonal") return Sampler::tridiagonal;
  if (name == "hkpv" || name == "dpp-hkpv") return Sampler::hkpv;
  throw std::invalid_argument("unknown sampler '" + name + "' (expected tridiagonal or hkpv)");
}

std::string to_string(Sampler s) { return s == Sampler::tridiagonal ? "tridiagonal" : "hkpv"; }

bool PointConfiguration::valid() const {
  if (points.empty()) return true;
  if (!(points.front() > 0.0)) return false;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1])) return false;
  return true;
}

EnsembleSpec::EnsembleSpec(Order a, int size, std::uint64_t s, Sampler smp) : alpha(a), n(size), seed(s), sampler(smp) {
  if (size < 1) throw std::invalid_argument("ensemble size N must be at least 1");
}

PointConfiguration to_hardedge(PointConfiguration c, int n) {
  if (c.scale == Scale::hardedge) return c;
  for (double& x : c.points) x *= hard_edge_factor(n);
  c.scale = Scale::hardedge;
  return c;
}

PointConfiguration to_matrix(PointConfiguration c, int n) {
  if (c.scale == Scale::matrix) return c;
  for (double& x : c.points) x /= hard_edge_factor(n);
  c.scale = Scale::matrix;
  return c;
}

std::vector<double> tridiagonal_model_eigenvalues(double alpha, int n, std::uint64_t seed, std::uint64_t draw,
                                                  std::uint64_t attempt) {
  if (!(alpha > -1.0)) throw DomainError("chi sampler: alpha must exceed -1");
  Rng rng = make_rng(seed, draw, Stage::tridiagonal, attempt);
  // chi_{2m} = sqrt(2 Gamma(m, 1))
  auto chi2m = [&](double m) { return std::sqrt(2.0 * std::gamma_distribution<double>(m, 1.0)(rng)); };
  // Lower bidiagonal B: diagonal chi_{2(alpha+N-i)}, subdiagonal chi_{2(N-1-i)}, i = 0..N-1.
  std::vector<double> d(n), s(n > 1 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) {
    d[i] = chi2m(alpha + n - i);
    if (i + 1 < n) s[i] = chi2m(n - 1 - i);
  }
  // T = B B^T
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  for (int i = 0; i < n; ++i) {
    diag[i] = d[i] * d[i] + (i > 0 ? s[i - 1] * s[i - 1] : 0.0);
    if (i + 1 < n) off[i] = d[i] * s[i];
  }
  std::vector<double> lambda = tridiagonal_eigen(diag, off).values;
  // the model's weight is e^{-lambda/2}
  for (double& v : lambda) v *= 0.5;
  return lambda;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kHkpvPanels = 2000;
constexpr int kPanelNodes = 20;

const GaussRule& panel_rule() {
  static const GaussRule rule = gauss_legendre(kPanelNodes);
  return rule;
}

}  // namespace

std::vector<double> HkpvSampler::features(double x) const {
  std::vector<double> phi = laguerre_functions(n_ - 1, alpha_, x);
  phi.resize(n_);
  return phi;
}

HkpvSampler::HkpvSampler(double alpha, int n) : alpha_(alpha), n_(n) {
  if (!(alpha > -1.0)) throw DomainError("hkpv sampler: alpha must exceed -1");
  if (n < 1) throw std::invalid_argument("hkpv sampler: N must be at least 1");
  const double edge = 4.0 * n;
  upper_ = edge + 10.0 * std::cbrt(edge) + 40.0;
  // panels uniform in u = sqrt(x); integrate in u so the x^alpha behaviour
  // at the origin becomes the milder u^{2 alpha + 1}
  const double umax = std::sqrt(upper_);
  grid_.resize(kHkpvPanels + 1);
  for (int m = 0; m <= kHkpvPanels; ++m) grid_[m] = std::pow(umax * m / kHkpvPanels, 2);
  grid_.back() = upper_;
  const GaussRule& rule = panel_rule();
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  cum_.assign(grid_.size(), std::vector<double>(nn, 0.0));
  for (int m = 0; m < kHkpvPanels; ++m) {
    const double ua = std::sqrt(grid_[m]), ub = std::sqrt(grid_[m + 1]);
    const double half = 0.5 * (ub - ua), mid = 0.5 * (ub + ua);
    std::vector<double> acc(nn, 0.0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double u = mid + half * rule.nodes[q];
      const double w = rule.weights[q] * half * 2.0 * u;
      const std::vector<double> v = features(u * u);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc[a * n + b] += w * v[a] * v[b];
    }
    for (std::size_t k = 0; k < nn; ++k) cum_[m + 1][k] = cum_[m][k] + acc[k];
  }
  double trace = 0.0;
  for (int a = 0; a < n; ++a) trace += cum_.back()[a * n + a];
  if (std::abs(trace - n) > 1e-8 * n)
    throw SamplerError("hkpv sampler: tabulated Gram trace " + std::to_string(trace) + " differs from N");
}

double HkpvSampler::density_panel_integral(const std::vector<double>& proj, double a, double b) const {
  if (b <= a) return 0.0;
  const GaussRule& rule = panel_rule();
  const double ua = std::sqrt(a), ub = std::sqrt(b);
  const double half = 0.5 * (ub - ua), mid = 0.5 * (ub + ua);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = mid + half * rule.nodes[q];
    const std::vector<double> v = features(u * u);
    double quad = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) quad += proj[i * n_ + j] * v[i] * v[j];
    s += rule.weights[q] * half * 2.0 * u * quad;
  }
  return s;
}

std::vector<double> HkpvSampler::sample_matrix_scale(std::uint64_t seed, std::uint64_t draw) const {
  Rng rng = make_rng(seed, draw, Stage::hkpv);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = n_;
  std::vector<double> proj(static_cast<std::size_t>(n) * n, 0.0);  // I - sum e e^T
  for (int i = 0; i < n; ++i) proj[i * n + i] = 1.0;
  auto cdf_at = [&](std::size_t m) {
    double s = 0.0;
    for (std::size_t k = 0; k < proj.size(); ++k) s += proj[k] * cum_[m][k];
    return s;
  };
  auto density = [&](double x) {
    const std::vector<double> v = features(x);
    double quad = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) quad += proj[i * n + j] * v[i] * v[j];
    return std::max(quad, 0.0);
  };

  std::vector<double> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double mass = cdf_at(grid_.size() - 1);
    const double target = unif(rng) * mass;
    // panel containing the target
    std::size_t lo = 0, hi = grid_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (cdf_at(mid) < target ? lo : hi) = mid;
    }
    const double base = cdf_at(lo);
    const double want = target - base;
    // Newton in u = sqrt(x) on the panel, safeguarded by bisection
    double ua = std::sqrt(grid_[lo]), ub = std::sqrt(grid_[hi]);
    double u = 0.5 * (ua + ub);
    for (int it = 0; it < 100; ++it) {
      const double f = density_panel_integral(proj, grid_[lo], u * u) - want;
      if (f > 0.0) ub = u; else ua = u;
      const double slope = density(u * u) * 2.0 * u;
      double next = slope > 0.0 ? u - f / slope : 0.5 * (ua + ub);
      if (!(next > ua && next < ub)) next = 0.5 * (ua + ub);
      if (std::abs(next - u) <= 1e-14 * std::max(1.0, u) || ub - ua <= 1e-15 * std::max(1.0, u)) {
        u = next;
        break;
      }
      u = next;
    }
    const double x = u * u;
    out.push_back(x);
    // Gram-Schmidt: append the normalized projected feature vector
    const std::vector<double> v = features(x);
    std::vector<double> pv(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pv[i] += proj[i * n + j] * v[j];
    double norm2 = 0.0;
    for (double c : pv) norm2 += c * c;
    if (!(norm2 > 0.0)) throw SamplerError("hkpv sampler: degenerate projection");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) proj[i * n + j] -= pv[i] * pv[j] / norm2;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxAttempts = 3;

PointConfiguration draw_once(const EnsembleSpec& spec, std::uint64_t draw, const HkpvSampler* hkpv) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PointConfiguration c;
    c.scale = Scale::matrix;
    try {
      if (spec.sampler == Sampler::tridiagonal) {
        c.points = tridiagonal_model_eigenvalues(spec.alpha.value(), spec.n, spec.seed, draw, attempt);
      } else {
        if (attempt > 0) break;  // the hkpv stream has no retry variant
        c.points = hkpv->sample_matrix_scale(spec.seed, draw);
      }
    } catch (const EigenSolverError&) {
      continue;
    }
    std::sort(c.points.begin(), c.points.end());
    c = to_hardedge(std::move(c), spec.n);
    if (c.valid() && static_cast<int>(c.size()) == spec.n) return c;
  }
  throw SamplerError("draw " + std::to_string(draw) + ": no valid configuration after retries");
}

}  // namespace

PointConfiguration sample(const EnsembleSpec& spec, std::uint64_t draw) {
  if (spec.sampler == Sampler::hkpv) {
    const HkpvSampler hkpv(spec.alpha.value(), spec.n);
    return draw_once(spec, draw, &hkpv);
  }
  return draw_once(spec, draw, nullptr);
}

std::vector<PointConfiguration> sample_batch(const EnsembleSpec& spec, std::size_t count, int workers) {
  if (count == 0) throw std::invalid_argument("sample_batch: count must be positive");
  std::unique_ptr<HkpvSampler> hkpv;
  if (spec.sampler == Sampler::hkpv) hkpv = std::make_unique<HkpvSampler>(spec.alpha.value(), spec.n);
  std::vector<PointConfiguration> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    try {
      out[i] = draw_once(spec, i, hkpv.get());
    } catch (const SamplerError&) {
      throw;
    } catch (const std::exception& e) {
      throw SamplerError("draw " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

double log_density(Order alpha, int n, std::span<const double> x) {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("log_density: configuration has " + std::to_string(x.size()) + " points, expected " +
                                std::to_string(n));
  const double a = alpha.value();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) return -INFINITY;
    s += -x[i] / hard_edge_factor(n) + a * std::log(x[i]);
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double gap = std::abs(x[j] - x[i]);
      if (gap == 0.0) return -INFINITY;
      s += 2.0 * std::log(gap);
    }
  }
  return s;
}

}  // namespace hardedge
