// SPDX-License-Identifier: Apache-2.0
//
// PAR / PINC, precoding-constraint residuals, and empirical CCDF statistics.

#pragma once

#include "parpinc/numeric.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace parpinc {

// One entry per subcarrier; true = carries data.
using SubcarrierMask = std::vector<bool>;

double to_db(double linear);
double from_db(double db);

// Peak-to-average power ratio N*|x|_inf^2 / |x|_2^2, in [1, N].
// Throws std::invalid_argument for the zero vector.
double par(const ComplexVector& x);

// Power increase |x|^2 / |x_ls|^2 relative to the least-squares solution.
double pinc(const ComplexVector& x, const ComplexVector& x_ls);
double pinc_frobenius(const ComplexMatrix& t, const ComplexMatrix& t_ls);

// max_w |s_w - H_w x_w|_2 / |s_w|_2 over used subcarriers w.
// x is B x W, s is U x W, channel[w] is U x B.
double evm_residual(const ComplexMatrix& x,
                    std::span<const ComplexMatrix> channel,
                    const ComplexMatrix& s, const SubcarrierMask& used);

// max |x_{b,w}| over unused subcarriers w.
double oob_residual(const ComplexMatrix& x, const SubcarrierMask& used);

struct TradeoffPoint {
  int iter = 0;
  double par_db = 0.0;
  double pinc_db = 0.0;
};

// Nearest-rank quantile: the ceil(target * n)-th smallest sample.
// Throws std::invalid_argument on an empty set or target outside (0, 1].
double ccdf_percentile(std::span<const double> samples, double target);

// Fewer than ceil(1 / (1 - target)) samples cannot resolve the tail.
bool percentile_resolvable(std::size_t count, double target);

// Empirical CCDF over dB samples.
class CcdfCurve {
 public:
  explicit CcdfCurve(std::vector<double> samples_db);

  std::span<const double> sorted() const { return sorted_; }
  std::size_t count() const { return sorted_.size(); }

  // Fraction of samples strictly greater than z.
  double exceedance(double z) const;
  double percentile(double target) const;

 private:
  std::vector<double> sorted_;
};

}  // namespace parpinc
