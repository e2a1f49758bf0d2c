#pragma once

// Exact sampling of the finite-N Laguerre beta = 2 ensemble with density
//   c_N exp(-sum x_i / 4N) prod x_j^alpha prod_{k<l} |x_k - x_l|^2
// on the hard-edge scale, plus its unnormalized log-density.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardedge/kernels.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Sampler { tridiagonal, hkpv };

Sampler parse_sampler(const std::string& name);
std::string to_string(Sampler s);

/// Strictly increasing positive points on the given scale.
struct PointConfiguration {
  std::vector<double> points;
  Scale scale = Scale::hardedge;

  std::size_t size() const { return points.size(); }
  /// True when 0 < x_1 < x_2 < ... .
  bool valid() const;
};

struct EnsembleSpec {
  Order alpha;
  int n = 1;
  std::uint64_t seed = 0;
  Sampler sampler = Sampler::tridiagonal;

  EnsembleSpec(Order a, int size, std::uint64_t s = 0, Sampler smp = Sampler::tridiagonal);
};

/// The single place where the matrix scale (weight x^alpha e^{-x}) and the
/// hard-edge scale are related.
PointConfiguration to_hardedge(PointConfiguration c, int n);
PointConfiguration to_matrix(PointConfiguration c, int n);

/// One exact draw; `draw` selects the independent random stream.
PointConfiguration sample(const EnsembleSpec& spec, std::uint64_t draw = 0);

/// count independent draws, identical for any worker count.
std::vector<PointConfiguration> sample_batch(const EnsembleSpec& spec, std::size_t count, int workers);

/// Log-density without the normalizer log c_N. Returns -inf for collisions
/// and nonpositive coordinates. Points need not be sorted.
double log_density(Order alpha, int n, std::span<const double> hardedge_points);

/// Eigenvalues of the beta = 2 Laguerre bidiagonal model, matrix scale.
/// Exposed for testing; `sample` wraps it with ordering and retry checks.
std::vector<double> tridiagonal_model_eigenvalues(double alpha, int n, std::uint64_t seed, std::uint64_t draw,
                                                  std::uint64_t attempt = 0);

/// Sequential projection-DPP sampler for the rank-N Laguerre kernel. The
/// cumulative Gram matrices of phi_0..phi_{N-1} are tabulated once per
/// (alpha, N) and shared by all draws.
class HkpvSampler {
 public:
  HkpvSampler(double alpha, int n);
  std::vector<double> sample_matrix_scale(std::uint64_t seed, std::uint64_t draw) const;
  double upper_limit() const { return upper_; }

 private:
  double density_panel_integral(const std::vector<double>& proj, double a, double b) const;
  std::vector<double> features(double x) const;

  double alpha_;
  int n_;
  double upper_;
  std::vector<double> grid_;              // panel edges in x
  std::vector<std::vector<double>> cum_;  // cumulative n*n Gram matrices at each edge
};

}  // namespace hardedge
