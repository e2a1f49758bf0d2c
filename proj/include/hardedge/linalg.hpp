#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hardedge {

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct TridiagonalEigen {
  std::vector<double> values;            // ascending
  std::vector<double> first_components;  // first entry of each unit eigenvector, if requested
};

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and off-diagonal (size n-1) by implicit QL with Wilkinson shifts.
TridiagonalEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag,
                                   bool want_first_components = false);

/// Determinant by LU with partial pivoting.
double determinant(Matrix m);

/// Eigenvalues (ascending) of a symmetric matrix.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

}  // namespace hardedge
