// SPDX-License-Identifier: Apache-2.0

#include "parpinc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace parpinc {

double to_db(double linear) { return 10.0 * std::log10(linear); }

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double par(const ComplexVector& x) {
  const double power = x.squaredNorm();
  if (!(power > 0.0)) throw std::invalid_argument("par: zero vector");
  const double peak = x.cwiseAbs2().maxCoeff();
  return static_cast<double>(x.size()) * peak / power;
}

double pinc(const ComplexVector& x, const ComplexVector& x_ls) {
  const double ref = x_ls.squaredNorm();
  if (!(ref > 0.0)) throw std::invalid_argument("pinc: zero LS reference");
  return x.squaredNorm() / ref;
}

double pinc_frobenius(const ComplexMatrix& t, const ComplexMatrix& t_ls) {
  const double ref = t_ls.squaredNorm();
  if (!(ref > 0.0)) throw std::invalid_argument("pinc_frobenius: zero LS reference");
  return t.squaredNorm() / ref;
}

double evm_residual(const ComplexMatrix& x,
                    std::span<const ComplexMatrix> channel,
                    const ComplexMatrix& s, const SubcarrierMask& used) {
  const auto w_count = static_cast<std::size_t>(x.cols());
  if (used.size() != w_count || channel.size() != w_count ||
      static_cast<std::size_t>(s.cols()) != w_count) {
    throw DimensionError("evm_residual: subcarrier count mismatch");
  }
  double worst = 0.0;
  for (std::size_t w = 0; w < w_count; ++w) {
    if (!used[w]) continue;
    const auto col = static_cast<Eigen::Index>(w);
    const double ref = s.col(col).norm();
    const double err = (s.col(col) - channel[w] * x.col(col)).norm();
    worst = std::max(worst, ref > 0.0 ? err / ref : err);
  }
  return worst;
}

double oob_residual(const ComplexMatrix& x, const SubcarrierMask& used) {
  if (used.size() != static_cast<std::size_t>(x.cols())) {
    throw DimensionError("oob_residual: subcarrier count mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index w = 0; w < x.cols(); ++w) {
    if (used[static_cast<std::size_t>(w)] || x.rows() == 0) continue;
    worst = std::max(worst, x.col(w).cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

std::size_t nearest_rank(std::size_t n, double target) {
  if (n == 0) throw std::invalid_argument("ccdf_percentile: empty sample set");
  if (!(target > 0.0 && target <= 1.0)) {
    throw std::invalid_argument("ccdf_percentile: target must lie in (0, 1]");
  }
  // The slack keeps products like 0.07 * 100 from rounding up a rank.
  const double r = std::ceil(target * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(r, 1.0)), 1, n);
}

}  // namespace

double ccdf_percentile(std::span<const double> samples, double target) {
  const std::size_t k = nearest_rank(samples.size(), target);
  std::vector<double> v(samples.begin(), samples.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

bool percentile_resolvable(std::size_t count, double target) {
  if (target >= 1.0) return count >= 1;
  const double needed = std::ceil(1.0 / (1.0 - target) - 1e-9);
  return static_cast<double>(count) >= needed;
}

CcdfCurve::CcdfCurve(std::vector<double> samples_db) : sorted_(std::move(samples_db)) {
  if (sorted_.empty()) throw std::invalid_argument("CcdfCurve: no samples");
  std::sort(sorted_.begin(), sorted_.end());
}

double CcdfCurve::exceedance(double z) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), z);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double CcdfCurve::percentile(double target) const {
  return sorted_[nearest_rank(sorted_.size(), target) - 1];
}

}  // namespace parpinc
