// SPDX-License-Identifier: Apache-2.0

#include "parpinc/metrics.hpp"
#include "parpinc/projections.hpp"
#include "parpinc/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

using namespace parpinc;

namespace {

ComplexVector real_vec(std::initializer_list<double> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("par: examples") {
  CHECK(par(real_vec({1, 1, 1, 1})) == 1.0);
  CHECK(par(real_vec({1, 0, 0, 0})) == 4.0);
  CHECK(par(real_vec({2, 1, 1})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(par(ComplexVector::Zero(3)), std::invalid_argument);
}

TEST_CASE("par: range, equality case and phase invariance") {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(40));
    const ComplexVector x = rng.complex_normal_vector(n);
    const double p = par(x);
    CHECK(p >= 1.0 - 1e-12);
    CHECK(p <= static_cast<double>(n) * (1.0 + 1e-12));
    const cplx rot = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    CHECK(par(rot * x) == doctest::Approx(p).epsilon(1e-12));

    ComplexVector flat(n);
    for (Eigen::Index i = 0; i < n; ++i) flat[i] = std::polar(1.7, 2.0 * std::numbers::pi * rng.uniform());
    CHECK(std::abs(par(flat) - 1.0) <= 1e-12);
  }
}

TEST_CASE("pinc: examples and phase invariance") {
  Rng rng(2);
  const ComplexVector ls = rng.complex_normal_vector(6);
  CHECK(pinc(ls, ls) == 1.0);
  CHECK(pinc(2.0 * ls, ls) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(pinc(real_vec({3, 4}), real_vec({1, 0})) == 25.0);
  CHECK(pinc(std::polar(1.0, 0.3) * ls, ls) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(pinc(ls, ComplexVector::Zero(6)), std::invalid_argument);
}

TEST_CASE("pinc_frobenius: examples") {
  Rng rng(3);
  const ComplexMatrix t = rng.complex_normal_matrix(5, 3);
  CHECK(pinc_frobenius(t, t) == 1.0);
  CHECK(pinc_frobenius(0.5 * t, t) == doctest::Approx(0.25).epsilon(1e-15));
  ComplexMatrix ones = ComplexMatrix::Ones(2, 2);
  CHECK(pinc_frobenius(ones, ComplexMatrix::Identity(2, 2)) == 2.0);
  CHECK_THROWS_AS(pinc_frobenius(t, ComplexMatrix::Zero(5, 3)), std::invalid_argument);
}

TEST_CASE("trade-off identity for feasible points") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const ComplexMatrix a = rng.complex_normal_matrix(5, 12);
    const AffineSystem sys(a, rng.complex_normal_vector(5));
    const ComplexVector x = proj_affine(sys, rng.complex_normal_vector(12));
    const ComplexVector& ls = sys.least_squares();
    const double lhs = par(x) * pinc(x, ls);
    const double rhs = 12.0 * x.cwiseAbs2().maxCoeff() / ls.squaredNorm();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
    CHECK(pinc(x, ls) >= 1.0 - 1e-9);
  }
}

TEST_CASE("dB conversions") {
  CHECK(to_db(10.0) == 10.0);
  CHECK(to_db(1.0) == 0.0);
  CHECK(from_db(20.0) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(from_db(to_db(3.7)) == doctest::Approx(3.7).epsilon(1e-14));
}

TEST_CASE("evm_residual and oob_residual") {
  Rng rng(6);
  const int w_count = 6;
  SubcarrierMask used{false, true, true, false, true, true};
  std::vector<ComplexMatrix> h;
  ComplexMatrix s = ComplexMatrix::Zero(2, w_count);
  ComplexMatrix x = ComplexMatrix::Zero(4, w_count);
  for (int w = 0; w < w_count; ++w) {
    h.push_back(rng.complex_normal_matrix(2, 4));
    if (!used[static_cast<std::size_t>(w)]) continue;
    s.col(w) = rng.complex_normal_vector(2);
    x.col(w) = AffineSystem(h.back(), s.col(w)).least_squares();
  }
  CHECK(evm_residual(x, h, s, used) <= 1e-10);
  CHECK(oob_residual(x, used) == 0.0);

  ComplexMatrix bumped = x;
  bumped(2, 4) += 1e-3;
  CHECK(evm_residual(bumped, h, s, used) > 0.0);

  ComplexMatrix leak = x;
  leak(1, 3) = cplx(0.0, 2.5e-7);
  CHECK(oob_residual(leak, used) == 2.5e-7);

  // Random feasible frame from the affine projection.
  ComplexMatrix feas = ComplexMatrix::Zero(4, w_count);
  for (int w = 0; w < w_count; ++w) {
    if (!used[static_cast<std::size_t>(w)]) continue;
    feas.col(w) = proj_affine(AffineSystem(h[static_cast<std::size_t>(w)], s.col(w)),
                              rng.complex_normal_vector(4));
  }
  CHECK(evm_residual(feas, h, s, used) <= 1e-9);

  CHECK_THROWS_AS(oob_residual(x, SubcarrierMask(3, true)), DimensionError);
}

TEST_CASE("ccdf_percentile: examples") {
  std::vector<double> hundred(100);
  std::iota(hundred.begin(), hundred.end(), 1.0);
  CHECK(ccdf_percentile(hundred, 0.99) == 99.0);
  std::vector<double> same(17, 4.25);
  CHECK(ccdf_percentile(same, 0.99) == 4.25);
  const std::vector<double> four{40, 10, 30, 20};
  CHECK(ccdf_percentile(four, 0.5) == 20.0);
  CHECK(ccdf_percentile(four, 1.0) == 40.0);
  CHECK_THROWS_AS(ccdf_percentile(std::vector<double>{}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ccdf_percentile(four, 0.0), std::invalid_argument);
}

TEST_CASE("ccdf_percentile: nearest rank against a direct sort, monotone in target") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.below(300);
    std::vector<double> v(n);
    for (auto& x : v) x = 20.0 * rng.uniform() - 5.0;
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double prev = -1e300;
    for (int pct = 1; pct <= 100; ++pct) {
      const double target = pct / 100.0;
      const double got = ccdf_percentile(v, target);
      // Smallest sample whose empirical CDF reaches the target.
      std::size_t k = 0;
      while (static_cast<double>(k + 1) * 100.0 < static_cast<double>(pct * n)) ++k;
      CHECK(got == sorted[k]);
      CHECK(got >= prev);
      prev = got;
    }
  }
}

TEST_CASE("percentile_resolvable and CcdfCurve") {
  CHECK(percentile_resolvable(100, 0.99));
  CHECK_FALSE(percentile_resolvable(99, 0.99));
  CHECK(percentile_resolvable(2, 0.5));

  const CcdfCurve c({3.0, 1.0, 2.0, 2.0});
  CHECK(c.count() == 4);
  CHECK(std::is_sorted(c.sorted().begin(), c.sorted().end()));
  CHECK(c.exceedance(0.0) == 1.0);
  CHECK(c.exceedance(2.0) == 0.25);
  CHECK(c.exceedance(3.0) == 0.0);
  CHECK(c.percentile(0.5) == 2.0);
  CHECK_THROWS_AS(CcdfCurve({}), std::invalid_argument);
}
