// SPDX-License-Identifier: Apache-2.0

#include "parpinc/numeric.hpp"
#include "parpinc/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

using namespace parpinc;

namespace {

// O(n^2) unitary DFT straight from the definition.
ComplexVector naive_dft(const ComplexVector& t, double sign) {
  const Eigen::Index n = t.size();
  ComplexVector out = ComplexVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * m) % n) / n;
      out[k] += t[m] * std::polar(1.0, angle);
    }
  }
  return out / std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_CASE("gram_factorize: identity and diagonal") {
  const ComplexMatrix eye = ComplexMatrix::Identity(3, 3);
  const auto f = gram_factorize(eye);
  CHECK((f.lower() - eye).norm() == doctest::Approx(0.0));

  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 2.0;
  const auto g = gram_factorize(a);
  CHECK((g.lower() - 2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-15);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 2);
}

TEST_CASE("gram_factorize: L L^H reproduces A A^H") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.below(8));
    const Eigen::Index n = m + static_cast<Eigen::Index>(rng.below(12));
    const ComplexMatrix a = rng.complex_normal_matrix(m, n);
    const auto f = gram_factorize(a);
    const ComplexMatrix gram = a * a.adjoint();
    const ComplexMatrix& l = f.lower();
    CHECK((gram - l * l.adjoint()).norm() <= 1e-10 * gram.norm());
    // Strictly lower part only below the diagonal, real positive diagonal.
    for (Eigen::Index i = 0; i < m; ++i) {
      CHECK(l(i, i).imag() == 0.0);
      CHECK(l(i, i).real() > 0.0);
      for (Eigen::Index j = i + 1; j < m; ++j) CHECK(l(i, j) == cplx(0.0, 0.0));
    }
  }
}

TEST_CASE("gram_factorize: rejects rank deficiency and tall matrices") {
  Rng rng(3);
  ComplexMatrix a = rng.complex_normal_matrix(3, 6);
  a.row(2) = a.row(0) * cplx(0.5, -2.0);
  CHECK_THROWS_AS(gram_factorize(a), RankDeficiencyError);
  CHECK_THROWS_AS(gram_factorize(ComplexMatrix::Zero(2, 4)), RankDeficiencyError);
  CHECK_THROWS_AS(gram_factorize(rng.complex_normal_matrix(5, 3)), DimensionError);

  ComplexMatrix bad = rng.complex_normal_matrix(2, 4);
  bad(1, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(gram_factorize(bad), std::invalid_argument);
}

TEST_CASE("gram_solve: examples and residual") {
  const auto fi = gram_factorize(ComplexMatrix::Identity(2, 2));
  ComplexVector b(2);
  b << cplx(1, 0), cplx(0, 2);
  CHECK((gram_solve(fi, b) - b).norm() < 1e-15);

  const auto f4 = gram_factorize(2.0 * ComplexMatrix::Identity(2, 2));
  ComplexVector b4(2);
  b4 << 4.0, 8.0;
  ComplexVector expect(2);
  expect << 1.0, 2.0;
  CHECK((gram_solve(f4, b4) - expect).norm() < 1e-15);

  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const ComplexMatrix a = rng.complex_normal_matrix(4, 8);
    const ComplexVector rhs = rng.complex_normal_vector(4);
    const ComplexVector w = gram_solve(gram_factorize(a), rhs);
    CHECK((a * a.adjoint() * w - rhs).norm() <= 1e-10 * rhs.norm());
    // Multiply back then solve again.
    const ComplexVector v = rng.complex_normal_vector(4);
    const ComplexVector back = gram_solve(gram_factorize(a), a * a.adjoint() * v);
    CHECK((back - v).norm() <= 1e-9 * v.norm());
  }
  CHECK_THROWS_AS(gram_solve(f4, ComplexVector::Ones(3)), DimensionError);
}

TEST_CASE("dft: examples") {
  CHECK(dft_unitary(ComplexVector::Zero(8)).norm() == 0.0);

  ComplexVector e1 = ComplexVector::Zero(4);
  e1[0] = 1.0;
  const ComplexVector f = dft_unitary(e1);
  for (Eigen::Index k = 0; k < 4; ++k) {
    CHECK(std::abs(f[k] - cplx(0.5, 0.0)) < 1e-15);
  }
}

TEST_CASE("dft: matches the defining sum, inverse pair, Parseval") {
  Rng rng(21);
  for (Eigen::Index n : {1, 2, 3, 7, 16, 60, 128, 2048}) {
    const ComplexVector t = rng.complex_normal_vector(n);
    const ComplexVector x = dft_unitary(t);
    if (n <= 128) {
      CHECK((x - naive_dft(t, -1.0)).norm() <= 1e-12 * t.norm());
      CHECK((idft_unitary(t) - naive_dft(t, 1.0)).norm() <= 1e-12 * t.norm());
    }
    const double peak = t.cwiseAbs().maxCoeff();
    CHECK((idft_unitary(x) - t).cwiseAbs().maxCoeff() <= 1e-12 * peak);
    CHECK(std::abs(x.squaredNorm() - t.squaredNorm()) <= 1e-10 * t.squaredNorm());
  }
}

TEST_CASE("dft: span interface, aliasing and size checks") {
  Rng rng(8);
  const UnitaryDft dft(32);
  CHECK(dft.size() == 32);
  ComplexVector t = rng.complex_normal_vector(32);
  const ComplexVector expect = dft.forward(t);
  dft.forward(std::span<const cplx>(t.data(), 32), std::span<cplx>(t.data(), 32));
  CHECK((t - expect).norm() == 0.0);
  CHECK_THROWS_AS(dft.forward(ComplexVector::Zero(31)), DimensionError);
}

TEST_CASE("dft: concurrent use agrees with serial use") {
  Rng rng(9);
  std::vector<ComplexVector> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(rng.complex_normal_vector(512));
  std::vector<ComplexVector> serial;
  for (const auto& v : inputs) serial.push_back(dft_unitary(v));

  std::vector<ComplexVector> parallel(inputs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      pool.emplace_back([&, i] {
        const UnitaryDft local(512);
        parallel[i] = local.forward(inputs[i]);
      });
    }
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(parallel[i] == serial[i]);
}

TEST_CASE("require_finite") {
  ComplexVector v = ComplexVector::Ones(3);
  CHECK_NOTHROW(require_finite(v, "v"));
  v[1] = cplx(0.0, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(require_finite(v, "v"), std::invalid_argument);
}
