// SPDX-License-Identifier: Apache-2.0

#include "parpinc/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace parpinc {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return r % n;
}

cplx Rng::complex_normal() {
  // |z|^2 = -log(u1) is Exp(1); the phase is uniform.
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

ComplexVector Rng::complex_normal_vector(Eigen::Index n) {
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
  return v;
}

ComplexMatrix Rng::complex_normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  ComplexMatrix m(rows, cols);
  // Column-major fill order.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
  }
  return m;
}

}  // namespace parpinc
