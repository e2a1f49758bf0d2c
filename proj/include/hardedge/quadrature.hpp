#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hardedge {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// n-point Gauss-Laguerre rule for the weight x^alpha e^{-x} on (0, inf),
/// built by Golub-Welsch from the Laguerre Jacobi matrix.
GaussRule gauss_laguerre(int n, double alpha);

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b]. The
/// integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are tolerated.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadOptions& opts = {});

/// Same as integrate, with the interval pre-split at the given interior
/// breakpoints (points outside (a, b) are ignored).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breaks,
                     const QuadOptions& opts = {});

/// Throws QuadratureError when the result did not meet its tolerance.
double require_converged(const QuadResult& r, const char* what);

}  // namespace hardedge
