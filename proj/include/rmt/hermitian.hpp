#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rmt {

using Complex = std::complex<double>;

/// Dense N x N complex Hermitian matrix, stored full and row-major.
///
/// set() writes both (i,j) and (j,i) so conjugate symmetry holds by
/// construction; diagonal entries are forced real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n);

  static HermitianMatrix identity(std::size_t n);

  /// Validates a full row-major array: finite entries, exact conjugate
  /// symmetry, real diagonal.
  static HermitianMatrix from_dense(std::size_t n, std::span<const Complex> entries);

  std::size_t size() const noexcept { return n_; }

  Complex operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }

  /// Sets entry (i,j) and its mirror. For i == j the imaginary part must be 0.
  void set(std::size_t i, std::size_t j, Complex value);

  /// Multiplies every entry by a real factor.
  void scale(double factor);

  std::span<const Complex> data() const noexcept { return a_; }

  double max_abs() const;
  double trace() const;
  /// Tr(H^2) = sum |H_ij|^2.
  double trace_of_square() const;
  bool all_finite() const;

  /// H + c I.
  HermitianMatrix shifted(double c) const;

  /// y = H x.
  std::vector<Complex> apply(std::span<const Complex> x) const;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

/// Eigenvalues in ascending order. Householder reduction to a real symmetric
/// tridiagonal matrix followed by implicit QL with Wilkinson-type shifts.
/// Non-finite entries raise a parameter error.
std::vector<double> eigenvalues_hermitian(const HermitianMatrix& h);

struct EigenSystem {
  std::vector<double> values;   // ascending
  std::vector<Complex> vectors;  // vector k occupies [k*n, (k+1)*n)
  std::size_t n = 0;

  std::span<const Complex> vector(std::size_t k) const { return {vectors.data() + k * n, n}; }
};

/// Eigenvalues plus unit eigenvectors, for residual verification.
EigenSystem eigensystem_hermitian(const HermitianMatrix& h);

/// ||H v - lambda v||_2.
double residual_norm(const HermitianMatrix& h, double lambda, std::span<const Complex> v);

}  // namespace rmt
