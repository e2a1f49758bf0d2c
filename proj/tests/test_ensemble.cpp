#include <doctest.h>

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>

#include "hardedge/ensemble.hpp"
#include "hardedge/estimators.hpp"
#include "hardedge/quadrature.hpp"

using namespace hardedge;

namespace {

double bin_average(const LaguerreKernel& k, double a, double b) {
  return integrate([&](double y) { return k(y, y); }, a, b, {1e-12, 1e-10, 500}).value / (b - a);
}

}  // namespace

TEST_CASE("N = 1, alpha = 1: single particle follows Gamma(2, scale 4)") {
  const EnsembleSpec spec(Order(1.0), 1, 11);
  const auto draws = sample_batch(spec, 100000, 1);
  double sum = 0.0, sq = 0.0;
  for (const auto& c : draws) {
    REQUIRE(c.size() == 1);
    sum += c.points[0];
    sq += c.points[0] * c.points[0];
  }
  const double n = static_cast<double>(draws.size());
  const double mean = sum / n, se = std::sqrt((sq / n - mean * mean) / n);
  // oracle: mean of x e^{-x/4} by independent incomplete-gamma quadrature
  const double oracle = 4.0 * boost::math::tgamma(3.0) / boost::math::tgamma(2.0);
  CHECK(oracle == doctest::Approx(8.0));
  CHECK(std::abs(mean - oracle) < 4.0 * se);
  // CDF at the median of Gamma(2, 4)
  const double med = 4.0 * boost::math::gamma_p_inv(2.0, 0.5);
  const double below = std::count_if(draws.begin(), draws.end(), [&](const auto& c) { return c.points[0] < med; }) / n;
  CHECK(std::abs(below - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("draws are positive, strictly ordered and of size N") {
  for (double a : {-0.5, 0.0, 1.0, 3.5})
    for (int n : {1, 2, 7, 60}) {
      const auto draws = sample_batch(EnsembleSpec(Order(a), n, 3), 200, 1);
      for (const auto& c : draws) {
        CHECK(c.size() == static_cast<std::size_t>(n));
        CHECK(c.valid());
        CHECK(c.scale == Scale::hardedge);
      }
    }
}

TEST_CASE("N = 2, alpha = 1: histogram of points matches the kernel diagonal") {
  const int n = 2;
  const auto draws = sample_batch(EnsembleSpec(Order(1.0), n, 5), 100000, 1);
  // equal-count bins keep every bin far above 500 counts
  const std::vector<double> edges = auto_edges(draws, 20);
  const BinnedDensity h = estimate_rho1(draws, edges);
  const LaguerreKernel k{Order(1.0), n};
  double worst = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] < 500) continue;
    const double exact = bin_average(k, edges[i], edges[i + 1]);
    worst = std::max(worst, std::abs(h.density(i) - exact) / exact);
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("expected count in [0, r] matches the integral of rho1") {
  const int n = 10;
  const double r = 25.0;
  const auto draws = sample_batch(EnsembleSpec(Order(1.0), n, 9), 20000, 1);
  std::vector<double> counts;
  for (const auto& c : draws) counts.push_back(std::count_if(c.points.begin(), c.points.end(), [&](double x) { return x <= r; }));
  const double m = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  double var = 0.0;
  for (double v : counts) var += (v - m) * (v - m);
  const double se = std::sqrt(var / (counts.size() - 1) / counts.size());
  const LaguerreKernel k{Order(1.0), n};
  const double exact = integrate([&](double y) { return k(y, y); }, 0.0, r, {1e-12, 1e-12, 500}).value;
  CHECK(std::abs(m - exact) <= 3.0 * se);
}

TEST_CASE("tridiagonal and HKPV samplers agree at N = 3") {
  const auto tri = sample_batch(EnsembleSpec(Order(1.0), 3, 21, Sampler::tridiagonal), 10000, 1);
  const auto dpp = sample_batch(EnsembleSpec(Order(1.0), 3, 22, Sampler::hkpv), 10000, 1);
  for (const auto& c : dpp) CHECK(c.size() == 3);
  const KsResult ks = ks_distance(smallest_points(tri), smallest_points(dpp));
  CHECK(ks.p_value > 0.01);
  std::vector<double> big_tri, big_dpp;
  for (const auto& c : tri) big_tri.push_back(c.points.back());
  for (const auto& c : dpp) big_dpp.push_back(c.points.back());
  CHECK(ks_distance(big_tri, big_dpp).p_value > 0.01);
}

TEST_CASE("HKPV sampler matches the kernel diagonal at N = 2") {
  const auto draws = sample_batch(EnsembleSpec(Order(0.5), 2, 4, Sampler::hkpv), 20000, 1);
  std::vector<double> edges;
  for (double e = 0.0; e <= 60.0; e += 4.0) edges.push_back(e);
  const BinnedDensity h = estimate_rho1(draws, edges);
  const LaguerreKernel k{Order(0.5), 2};
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (h.counts[i] < 100) continue;
    CHECK(std::abs(h.density(i) - bin_average(k, edges[i], edges[i + 1])) <= 3.0 * h.stderr_(i));
  }
}

TEST_CASE("sample_batch is independent of the worker count") {
  for (Sampler s : {Sampler::tridiagonal, Sampler::hkpv}) {
    const EnsembleSpec spec(Order(1.0), 4, 77, s);
    const auto one = sample_batch(spec, 64, 1);
    const auto eight = sample_batch(spec, 64, 8);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].points == eight[i].points);
    CHECK(sample(spec, 5).points == one[5].points);
  }
  CHECK_THROWS_AS(sample_batch(EnsembleSpec(Order(1.0), 4, 1), 0, 1), std::invalid_argument);
  CHECK_THROWS(EnsembleSpec(Order(1.0), 0));
  CHECK_THROWS_AS(Order(-1.5), DomainError);
}

TEST_CASE("log_density") {
  const double one[] = {3.0};
  CHECK(log_density(Order(0.0), 1, one) == doctest::Approx(-0.75));
  const double p[] = {1.0, 4.0, 2.5}, q[] = {2.5, 1.0, 4.0};
  CHECK(log_density(Order(1.0), 3, p) == doctest::Approx(log_density(Order(1.0), 3, q)).epsilon(1e-15));
  const double expect = -(7.5) / 12.0 + std::log(10.0) + 2.0 * (std::log(3.0) + std::log(1.5) + std::log(1.5));
  CHECK(log_density(Order(1.0), 3, p) == doctest::Approx(expect).epsilon(1e-14));
  const double coll[] = {1.0, 1.0}, neg[] = {-1.0, 2.0};
  CHECK(log_density(Order(1.0), 2, coll) == -INFINITY);
  CHECK(log_density(Order(1.0), 2, neg) == -INFINITY);
  CHECK_THROWS(log_density(Order(1.0), 3, one));
}

TEST_CASE("scale conversion round-trips") {
  PointConfiguration c{{0.5, 2.0}, Scale::matrix};
  const auto he = to_hardedge(c, 5);
  CHECK(he.points[0] == 10.0);
  CHECK(to_matrix(he, 5).points == c.points);
  CHECK(to_hardedge(he, 5).points == he.points);
}
