#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardedge/ensemble.hpp"

namespace hardedge {

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-bin mean point count divided by bin width.
struct BinnedDensity {
  std::vector<double> edges;
  std::vector<double> counts;  // total points per bin over all draws
  std::size_t draws = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double density(std::size_t i) const;
  /// Poisson standard error sqrt(count) / (draws * width).
  double stderr_(std::size_t i) const;
  /// Sum of density * width over all bins.
  double integral() const;
  /// Combines partial histograms built on identical edges.
  BinnedDensity& merge(const BinnedDensity& other);
};

/// Ordered pair counts per cell; a cell met by both coordinates counts
/// k (k - 1) pairs.
struct PairDensity2D {
  std::vector<double> edges_y, edges_z;
  std::vector<double> counts;   // row-major, y index major
  std::vector<double> squares;  // per-draw squared counts, for standard errors
  std::size_t draws = 0;

  double area(std::size_t i, std::size_t j) const;
  double density(std::size_t i, std::size_t j) const;
  /// Standard error from the per-draw sample variance.
  double stderr_(std::size_t i, std::size_t j) const;
  PairDensity2D& merge(const PairDensity2D& other);
};

BinnedDensity estimate_rho1(std::span<const PointConfiguration> draws, std::span<const double> edges);
PairDensity2D estimate_rho2(std::span<const PointConfiguration> draws, std::span<const double> edges_y,
                            std::span<const double> edges_z);

/// Equal-count edges: `bins` bins whose pilot counts are as equal as the
/// pooled sample allows, spanning all points.
std::vector<double> auto_edges(std::span<const PointConfiguration> draws, std::size_t bins);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
KsResult ks_distance(std::span<const double> a, std::span<const double> b);

/// Complementary Kolmogorov distribution Q(t) = 2 sum (-1)^{k-1} e^{-2 k^2 t^2}.
double kolmogorov_q(double t);

/// Smallest point of each draw.
std::vector<double> smallest_points(std::span<const PointConfiguration> draws);

}  // namespace hardedge
