#include "hardedge/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace hardedge {

namespace {

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) throw EstimatorError("need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw EstimatorError("bin edges must be strictly increasing");
}

// Bin index of x in [edges.front(), edges.back()), or -1.
long bin_of(std::span<const double> edges, double x) {
  if (x < edges.front() || x >= edges.back()) return -1;
  return static_cast<long>(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
}

}  // namespace

double BinnedDensity::density(std::size_t i) const { return counts[i] / (static_cast<double>(draws) * width(i)); }

double BinnedDensity::stderr_(std::size_t i) const {
  return std::sqrt(counts[i]) / (static_cast<double>(draws) * width(i));
}

double BinnedDensity::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < bins(); ++i) s += density(i) * width(i);
  return s;
}

BinnedDensity& BinnedDensity::merge(const BinnedDensity& other) {
  if (other.edges != edges) throw EstimatorError("merge: bin edges differ");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  draws += other.draws;
  return *this;
}

double PairDensity2D::area(std::size_t i, std::size_t j) const {
  return (edges_y[i + 1] - edges_y[i]) * (edges_z[j + 1] - edges_z[j]);
}

double PairDensity2D::density(std::size_t i, std::size_t j) const {
  return counts[i * (edges_z.size() - 1) + j] / (static_cast<double>(draws) * area(i, j));
}

double PairDensity2D::stderr_(std::size_t i, std::size_t j) const {
  const std::size_t k = i * (edges_z.size() - 1) + j;
  const double d = static_cast<double>(draws);
  const double mean = counts[k] / d;
  const double var = draws > 1 ? std::max(0.0, (squares[k] - d * mean * mean) / (d - 1.0)) : mean;
  return std::sqrt(var / d) / area(i, j);
}

PairDensity2D& PairDensity2D::merge(const PairDensity2D& other) {
  if (other.edges_y != edges_y || other.edges_z != edges_z) throw EstimatorError("merge: cell edges differ");
  for (std::size_t k = 0; k < counts.size(); ++k) {
    counts[k] += other.counts[k];
    squares[k] += other.squares[k];
  }
  draws += other.draws;
  return *this;
}

BinnedDensity estimate_rho1(std::span<const PointConfiguration> draws, std::span<const double> edges) {
  if (draws.empty()) throw EstimatorError("estimate_rho1: no draws");
  check_edges(edges);
  BinnedDensity h{{edges.begin(), edges.end()}, std::vector<double>(edges.size() - 1, 0.0), draws.size()};
  for (const auto& c : draws)
    for (double x : c.points)
      if (const long b = bin_of(edges, x); b >= 0) h.counts[b] += 1.0;
  return h;
}

PairDensity2D estimate_rho2(std::span<const PointConfiguration> draws, std::span<const double> edges_y,
                            std::span<const double> edges_z) {
  if (draws.empty()) throw EstimatorError("estimate_rho2: no draws");
  check_edges(edges_y);
  check_edges(edges_z);
  const std::size_t ny = edges_y.size() - 1, nz = edges_z.size() - 1;
  PairDensity2D p{{edges_y.begin(), edges_y.end()},
                  {edges_z.begin(), edges_z.end()},
                  std::vector<double>(ny * nz, 0.0),
                  std::vector<double>(ny * nz, 0.0),
                  draws.size()};
  std::vector<double> cy(ny), cz(nz), cell(ny * nz);
  for (const auto& c : draws) {
    std::fill(cy.begin(), cy.end(), 0.0);
    std::fill(cz.begin(), cz.end(), 0.0);
    std::fill(cell.begin(), cell.end(), 0.0);
    for (double x : c.points) {
      const long by = bin_of(edges_y, x), bz = bin_of(edges_z, x);
      if (by >= 0) cy[by] += 1.0;
      if (bz >= 0) cz[bz] += 1.0;
      // a point cannot pair with itself
      if (by >= 0 && bz >= 0) cell[by * nz + bz] -= 1.0;
    }
    for (std::size_t i = 0; i < ny; ++i)
      for (std::size_t j = 0; j < nz; ++j) {
        const double k = cy[i] * cz[j] + cell[i * nz + j];
        p.counts[i * nz + j] += k;
        p.squares[i * nz + j] += k * k;
      }
  }
  return p;
}

std::vector<double> auto_edges(std::span<const PointConfiguration> draws, std::size_t bins) {
  if (draws.empty()) throw EstimatorError("auto_edges: no draws");
  if (bins == 0) throw EstimatorError("auto_edges: need at least one bin");
  std::vector<double> pooled;
  for (const auto& c : draws) pooled.insert(pooled.end(), c.points.begin(), c.points.end());
  if (pooled.empty()) throw EstimatorError("auto_edges: draws contain no points");
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> edges{0.0};
  for (std::size_t b = 1; b < bins; ++b) {
    const double q = pooled[b * pooled.size() / bins];
    if (q > edges.back()) edges.push_back(q);
  }
  // the last edge sits just above the largest point so it is counted
  edges.push_back(std::nextafter(pooled.back(), INFINITY) * (1.0 + 1e-12));
  return edges;
}

double kolmogorov_q(double t) {
  if (t < 1e-3) return 1.0;
  if (t < 1.18) {
    // small-t form of the same series (Jacobi theta transformation)
    const double y = std::exp(-M_PI * M_PI / (8.0 * t * t));
    double s = 0.0;
    for (int k = 1; k < 40; k += 2) s += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / t * s, 0.0, 1.0);
  }
  double s = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    s += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EstimatorError("ks_distance: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((en + 0.12 + 0.11 / en) * d)};
}

std::vector<double> smallest_points(std::span<const PointConfiguration> draws) {
  std::vector<double> out;
  out.reserve(draws.size());
  for (const auto& c : draws) {
    if (c.points.empty()) throw EstimatorError("smallest_points: empty configuration");
    out.push_back(*std::min_element(c.points.begin(), c.points.end()));
  }
  return out;
}

}  // namespace hardedge
