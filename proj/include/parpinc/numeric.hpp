// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra and unitary DFT primitives.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace parpinc {

using cplx = std::complex<double>;

// Column-major storage (Eigen default) throughout.
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficiencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const ComplexVector& v, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);

// Cholesky factor L of A*A^H for a wide, full-row-rank A.
class GramFactorization {
 public:
  const ComplexMatrix& lower() const { return lower_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  // Solves (A*A^H) w = b.
  ComplexVector solve(const ComplexVector& b) const;

 private:
  friend GramFactorization gram_factorize(const ComplexMatrix& a);
  GramFactorization(ComplexMatrix lower, Eigen::Index rows, Eigen::Index cols)
      : lower_(std::move(lower)), rows_(rows), cols_(cols) {}

  ComplexMatrix lower_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
};

// Relative pivot threshold: a squared pivot below this fraction of the
// largest Gram diagonal entry is treated as rank deficiency.
inline constexpr double kGramPivotTolerance = 1e-12;

// Requires rows <= cols. Throws RankDeficiencyError on a small pivot.
GramFactorization gram_factorize(const ComplexMatrix& a);

ComplexVector gram_solve(const GramFactorization& f, const ComplexVector& b);

// Unitary DFT of fixed length: forward(t)_k = n^{-1/2} sum_m t_m e^{-j2pi km/n}.
// Backed by an FFTW plan that is created once per length and shared.
// forward/inverse are safe to call concurrently.
class UnitaryDft {
 public:
  explicit UnitaryDft(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

  ComplexVector forward(const ComplexVector& in) const;
  ComplexVector inverse(const ComplexVector& in) const;

  struct Plans;

 private:
  std::size_t n_;
  double scale_;
  std::shared_ptr<const Plans> plans_;
};

ComplexVector dft_unitary(const ComplexVector& t);
ComplexVector idft_unitary(const ComplexVector& x);

}  // namespace parpinc
