// SPDX-License-Identifier: Apache-2.0

#include "parpinc/numeric.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace parpinc {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

void require_finite(const ComplexVector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

GramFactorization gram_factorize(const ComplexMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m == 0 || m > n) {
    throw DimensionError("gram_factorize: expected a wide matrix, got " +
                         dims(m, n));
  }
  require_finite(a, "gram_factorize");

  const ComplexMatrix gram = a * a.adjoint();
  const double max_diag = gram.diagonal().real().maxCoeff();
  if (!(max_diag > 0.0)) {
    throw RankDeficiencyError("gram_factorize: zero matrix");
  }

  ComplexMatrix lower = ComplexMatrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double d = gram(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(lower(j, k));
    if (!(d > kGramPivotTolerance * max_diag)) {
      throw RankDeficiencyError("gram_factorize: pivot " + std::to_string(j) +
                                " = " + std::to_string(d) +
                                " below tolerance (max diagonal " +
                                std::to_string(max_diag) + ")");
    }
    const double ljj = std::sqrt(d);
    lower(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < m; ++i) {
      cplx s = gram(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= lower(i, k) * std::conj(lower(j, k));
      lower(i, j) = s / ljj;
    }
  }
  return GramFactorization(std::move(lower), m, n);
}

ComplexVector GramFactorization::solve(const ComplexVector& b) const {
  if (b.size() != rows_) {
    throw DimensionError("gram_solve: rhs length " + std::to_string(b.size()) +
                         ", expected " + std::to_string(rows_));
  }
  ComplexVector y = lower_.triangularView<Eigen::Lower>().solve(b);
  return lower_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

ComplexVector gram_solve(const GramFactorization& f, const ComplexVector& b) {
  return f.solve(b);
}

// ---------------------------------------------------------------------------
// Unitary DFT

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex g_planner_mutex;

}  // namespace

struct UnitaryDft::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit Plans(std::size_t n) {
    std::lock_guard lock(g_planner_mutex);
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (fwd == nullptr || bwd == nullptr) {
      throw std::runtime_error("UnitaryDft: FFTW planning failed for n=" +
                               std::to_string(n));
    }
  }
  ~Plans() {
    std::lock_guard lock(g_planner_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

namespace {

std::shared_ptr<const UnitaryDft::Plans> cached_plans(std::size_t n);

}  // namespace

UnitaryDft::UnitaryDft(std::size_t n)
    : n_(n), scale_(n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0) {
  if (n == 0) throw DimensionError("UnitaryDft: zero length");
  plans_ = cached_plans(n);
}

namespace {

void run_plan(fftw_plan plan, std::size_t n, double scale,
              std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() != n || out.size() != n) {
    throw DimensionError("UnitaryDft: length mismatch (plan " +
                         std::to_string(n) + ", in " + std::to_string(in.size()) +
                         ", out " + std::to_string(out.size()) + ")");
  }
  // Plans are out-of-place; stage aliased input through a copy.
  std::vector<cplx> staged;
  const cplx* src = in.data();
  if (src == out.data()) {
    staged.assign(in.begin(), in.end());
    src = staged.data();
  }
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(src)),
                   reinterpret_cast<fftw_complex*>(out.data()));
  for (auto& v : out) v *= scale;
}

}  // namespace

void UnitaryDft::forward(std::span<const cplx> in, std::span<cplx> out) const {
  run_plan(plans_->fwd, n_, scale_, in, out);
}

void UnitaryDft::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  run_plan(plans_->bwd, n_, scale_, in, out);
}

ComplexVector UnitaryDft::forward(const ComplexVector& in) const {
  ComplexVector out(in.size());
  forward(std::span<const cplx>(in.data(), static_cast<std::size_t>(in.size())),
          std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

ComplexVector UnitaryDft::inverse(const ComplexVector& in) const {
  ComplexVector out(in.size());
  inverse(std::span<const cplx>(in.data(), static_cast<std::size_t>(in.size())),
          std::span<cplx>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

namespace {

std::shared_ptr<const UnitaryDft::Plans> cached_plans(std::size_t n) {
  static std::mutex cache_mu;
  static std::map<std::size_t, std::shared_ptr<const UnitaryDft::Plans>> cache;
  std::lock_guard lock(cache_mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const UnitaryDft::Plans>(n);
  return slot;
}

}  // namespace

ComplexVector dft_unitary(const ComplexVector& t) {
  if (t.size() == 0) return t;
  return UnitaryDft(static_cast<std::size_t>(t.size())).forward(t);
}

ComplexVector idft_unitary(const ComplexVector& x) {
  if (x.size() == 0) return x;
  return UnitaryDft(static_cast<std::size_t>(x.size())).inverse(x);
}

}  // namespace parpinc
