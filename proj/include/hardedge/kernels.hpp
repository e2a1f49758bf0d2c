#pragma once

// Determinantal kernels: the Bessel hard-edge kernel, the finite-N Laguerre
// Christoffel-Darboux kernel (matrix scale or hard-edge scale), its reduced
// Palm deflation, and correlation functions as kernel determinants.

#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include "hardedge/linalg.hpp"
#include "hardedge/report.hpp"
#include "hardedge/specfun.hpp"

namespace hardedge {

/// Factor between the Laguerre matrix scale (weight x^alpha e^{-x}) and the
/// hard-edge scale used everywhere else: y = 4N x.
constexpr double hard_edge_factor(int n) { return 4.0 * n; }

/// Pairs closer than kDiagonalBand * max(1, sqrt(x)) (hard-edge units) are
/// evaluated from a symmetric Taylor expansion instead of the 0/0 ratio.
inline constexpr double kDiagonalBand = 1e-4;

enum class Scale { matrix, hardedge };

template <class K>
concept Kernel = requires(const K& k, double x, double y) {
  { k(x, y) } -> std::convertible_to<double>;
};

class BesselKernel {
 public:
  explicit BesselKernel(Order alpha) : alpha_(alpha.value()) {}

  double alpha() const { return alpha_; }
  double operator()(double x, double y) const;
  /// Closed-form diagonal (1/4){J_a^2 - J_{a+1} J_{a-1}} at sqrt(x).
  double diagonal(double x) const;

 private:
  double alpha_;
};

class LaguerreKernel {
 public:
  LaguerreKernel(Order alpha, int n, Scale scale = Scale::hardedge);

  double alpha() const { return alpha_; }
  int size() const { return n_; }
  Scale scale() const { return scale_; }

  /// Christoffel-Darboux ratio off the diagonal, symmetric Taylor form in
  /// the diagonal band.
  double operator()(double x, double y) const;
  double diagonal(double x) const { return (*this)(x, x); }

  /// Direct sum of N orthonormal-function products (reference form).
  double sum_form(double x, double y) const;
  /// Unblended Christoffel-Darboux ratio; undefined at x == y.
  double christoffel_darboux(double x, double y) const;
  /// Diagonal from the Laguerre-product identity
  ///   k(x,x) = w(x) Gamma(N+1)/Gamma(N+alpha) {L_{N-1}^{[a+1]} L_{N-1}^{[a]} - L_N^{[a]} L_{N-2}^{[a+1]}}.
  double confluent_diagonal(double x) const;

 private:
  double to_matrix(double x) const { return scale_ == Scale::hardedge ? x / hard_edge_factor(n_) : x; }
  double prefactor() const { return scale_ == Scale::hardedge ? 1.0 / hard_edge_factor(n_) : 1.0; }

  double alpha_;
  int n_;
  Scale scale_;
};

/// M_alpha^n(x) = w_{a+1}^{1/2} L_{n-1}^{[a+1]} w_a^{1/2} L_{n-1}^{[a]}
///              - w_a^{1/2} L_n^{[a]} w_{a+1}^{1/2} L_{n-2}^{[a+1]}.
double m_alpha(int n, double alpha, double x);

/// Reduced Palm kernel of a finite-N kernel conditioned on a point at x.
class PalmKernel {
 public:
  static constexpr double kDefaultFloor = 1e-14;

  PalmKernel(LaguerreKernel base, double x, double floor = kDefaultFloor);

  double conditioning_point() const { return x_; }
  const LaguerreKernel& base() const { return base_; }
  double operator()(double y, double z) const;

 private:
  LaguerreKernel base_;
  double x_;
  double kxx_;
};

struct KernelMatrix {
  std::vector<double> points;
  Matrix entries;
};

template <Kernel K>
KernelMatrix kernel_matrix(const K& k, std::span<const double> points) {
  KernelMatrix m{{points.begin(), points.end()}, Matrix(points.size())};
  for (std::size_t i = 0; i < points.size(); ++i) {
    m.entries(i, i) = k(points[i], points[i]);
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double v = k(points[i], points[j]);
      m.entries(i, j) = v;
      m.entries(j, i) = v;
    }
  }
  return m;
}

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// det of the kernel matrix, with roundoff-level negatives clamped to 0.
/// Throws on duplicate points and on a genuinely negative determinant.
double correlation_from_matrix(const KernelMatrix& m);

template <Kernel K>
double correlation_fn(const K& k, std::span<const double> points) {
  if (points.empty()) throw KernelError("correlation_fn: need at least one point");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) throw KernelError("correlation_fn: duplicate points");
  return correlation_from_matrix(kernel_matrix(k, points));
}

/// sup |K_alpha^N - K_alpha| over grid x grid for each N. Passes when the
/// sequence is strictly decreasing and the last value is below target.
DiagnosticReport kernel_convergence_report(Order alpha, std::span<const int> n_list, std::span<const double> grid,
                                           double target = 0.05);

}  // namespace hardedge
