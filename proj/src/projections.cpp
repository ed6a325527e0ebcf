// SPDX-License-Identifier: Apache-2.0

#include "parpinc/projections.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace parpinc {

// ---------------------------------------------------------------------------
// Affine set

AffineSystem::AffineSystem(ComplexMatrix a, ComplexVector y)
    : a_(std::move(a)), y_(std::move(y)), gram_(gram_factorize(a_)) {
  if (y_.size() != a_.rows()) {
    throw DimensionError("AffineSystem: rhs length " + std::to_string(y_.size()) +
                         " does not match " + std::to_string(a_.rows()) + " rows");
  }
  require_finite(y_, "AffineSystem");
  x_ls_ = a_.adjoint() * gram_.solve(y_);
}

double AffineSystem::relative_residual(const ComplexVector& x) const {
  const double err = (a_ * x - y_).norm();
  const double ref = y_.norm();
  return ref > 0.0 ? err / ref : err;
}

ComplexVector proj_affine(const AffineSystem& sys, const ComplexVector& z) {
  if (z.size() != sys.cols()) {
    throw DimensionError("proj_affine: vector length " + std::to_string(z.size()) +
                         ", expected " + std::to_string(sys.cols()));
  }
  const ComplexVector r = sys.matrix() * z - sys.rhs();
  return z - sys.matrix().adjoint() * sys.gram().solve(r);
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

// rho within the dB round-off slack of N means no PAR constraint at all.
double ratio_to_alpha(double rho, double dim) {
  if (std::abs(rho - dim) <= 1e-9 * dim) return 1.0;
  return std::clamp(rho / dim, 1.0 / dim, 1.0);
}

}  // namespace

ParPincBounds::ParPincBounds(double alpha, double power_cap)
    : alpha_(alpha), power_cap_(power_cap) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("ParPincBounds: alpha must lie in (0, 1], got " +
                                std::to_string(alpha));
  }
  if (!(power_cap > 0.0)) {
    throw std::invalid_argument("ParPincBounds: power cap must be positive");
  }
}

ParPincBounds ParPincBounds::from_ratios(double rho, double xi, std::size_t n,
                                         double ls_power) {
  if (n == 0) throw std::invalid_argument("ParPincBounds: zero length");
  const double dim = static_cast<double>(n);
  // Allow round-off from dB conversions at the endpoints.
  if (!(rho >= 1.0 - 1e-12 && rho <= dim * (1.0 + 1e-9))) {
    throw std::invalid_argument("ParPincBounds: PAR bound must lie in [1, N], got " +
                                std::to_string(rho));
  }
  if (!(xi >= 1.0 - 1e-12) || std::isnan(xi)) {
    throw std::invalid_argument("ParPincBounds: PINC bound must be >= 1, got " +
                                std::to_string(xi));
  }
  if (!(ls_power > 0.0) || !std::isfinite(ls_power)) {
    throw std::invalid_argument("ParPincBounds: LS power must be positive and finite");
  }
  return ParPincBounds(ratio_to_alpha(rho, dim), std::max(xi, 1.0) * ls_power);
}

ParPincBounds ParPincBounds::from_db(double rho_db, double xi_db, std::size_t n,
                                     double ls_power) {
  return from_ratios(std::pow(10.0, rho_db / 10.0), std::pow(10.0, xi_db / 10.0), n,
                     ls_power);
}

ParPincBounds ParPincBounds::par_only(double rho, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ParPincBounds: zero length");
  const double dim = static_cast<double>(n);
  if (!(rho >= 1.0 - 1e-12 && rho <= dim * (1.0 + 1e-9))) {
    throw std::invalid_argument("ParPincBounds: PAR bound must lie in [1, N], got " +
                                std::to_string(rho));
  }
  return ParPincBounds(ratio_to_alpha(rho, dim), kNoPowerCap);
}

ParPincBounds ParPincBounds::from_alpha(double alpha, double power_cap) {
  return ParPincBounds(alpha, power_cap);
}

const char* to_string(ParCase c) {
  switch (c) {
    case ParCase::kZeroInput: return "zero-input";
    case ParCase::kVacuous: return "vacuous";
    case ParCase::kFeasible: return "feasible";
    case ParCase::kZeroTail: return "zero-tail";
    case ParCase::kScaledTail: return "scaled-tail";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PAR + power projection

namespace {

struct SortedMagnitudes {
  std::vector<std::size_t> order;  // descending magnitude
  std::vector<double> mag;         // mag[k] = |z_{order[k]}|
  std::vector<double> tail_power;  // tail_power[k] = sum_{j >= k} mag[j]^2
};

SortedMagnitudes sort_magnitudes(const ComplexVector& z) {
  const auto n = static_cast<std::size_t>(z.size());
  SortedMagnitudes s;
  s.order.resize(n);
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::vector<double> abs_z(n);
  for (std::size_t i = 0; i < n; ++i) abs_z[i] = std::abs(z[static_cast<Eigen::Index>(i)]);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return abs_z[a] > abs_z[b]; });
  s.mag.resize(n);
  for (std::size_t k = 0; k < n; ++k) s.mag[k] = abs_z[s.order[k]];
  // Accumulate from the small end.
  s.tail_power.assign(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) s.tail_power[k] = s.tail_power[k + 1] + s.mag[k] * s.mag[k];
  return s;
}

bool par_satisfied(const SortedMagnitudes& s, double alpha) {
  return s.mag.empty() || s.mag[0] * s.mag[0] <= alpha * s.tail_power[0];
}

IndexSet search_index_set(const SortedMagnitudes& s, double alpha) {
  const std::size_t n = s.mag.size();
  const double tie = kTieTolerance * s.mag[0];
  for (std::size_t l = 1; l < n; ++l) {
    const double headroom = 1.0 - alpha * static_cast<double>(l);
    if (headroom < kClipHeadroom) break;  // L < 1/alpha is required
    const bool unique = s.mag[l - 1] - s.mag[l] > tie;
    if (!unique) continue;
    const double threshold = std::sqrt(alpha / headroom) * std::sqrt(s.tail_power[l]);
    const bool tail_ok = s.mag[l] <= threshold * (1.0 + 1e-12);
    const bool head_ok = threshold < s.mag[l - 1];
    if (tail_ok && head_ok) {
      IndexSet out;
      out.indices.assign(s.order.begin(), s.order.begin() + static_cast<std::ptrdiff_t>(l));
      out.count = l;
      out.zero_tail = s.mag[l] == 0.0;
      return out;
    }
  }
  throw ProjectionError("determine_index_set: no clipping set with L < 1/alpha (alpha = " +
                        std::to_string(alpha) + ", N = " + std::to_string(n) + ")");
}

void check_alpha_for_length(double alpha, Eigen::Index n) {
  if (alpha * static_cast<double>(n) < 1.0 - 1e-9) {
    throw std::invalid_argument("proj_par_power: alpha = " + std::to_string(alpha) +
                                " is below 1/N for N = " + std::to_string(n));
  }
}

// Power-ball step shared by all branches. Returns the scale applied.
double apply_power_cap(const ParPincBounds& bounds, double power, KktWorkspace& kkt) {
  kkt.power_unclipped = power;
  if (bounds.has_power_cap() && power > bounds.power_cap()) {
    kkt.power = bounds.power_cap();
    return std::sqrt(bounds.power_cap() / power);
  }
  kkt.power = power;
  return 1.0;
}

}  // namespace

IndexSet determine_index_set(const ComplexVector& z, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("determine_index_set: alpha must lie in (0, 1]");
  }
  require_finite(z, "determine_index_set");
  const SortedMagnitudes s = sort_magnitudes(z);
  if (par_satisfied(s, alpha) || alpha >= 1.0) return {};
  return search_index_set(s, alpha);
}

ParProjection proj_par_power_detailed(const ParPincBounds& bounds, const ComplexVector& z) {
  require_finite(z, "proj_par_power");
  const Eigen::Index n = z.size();
  ParProjection out;
  KktWorkspace& kkt = out.kkt;
  kkt.u.assign(static_cast<std::size_t>(n), 0.0);

  const double z_power = z.squaredNorm();
  if (n == 0 || z_power == 0.0) {
    out.x = z;
    kkt.kind = ParCase::kZeroInput;
    return out;
  }
  check_alpha_for_length(bounds.alpha(), n);
  const double alpha = bounds.alpha();

  const SortedMagnitudes s = sort_magnitudes(z);
  if (alpha >= 1.0 || par_satisfied(s, alpha)) {
    kkt.kind = alpha >= 1.0 ? ParCase::kVacuous : ParCase::kFeasible;
    const double scale = apply_power_cap(bounds, z_power, kkt);
    out.x = scale * z;
    // (1 + v) x = z
    kkt.v = 1.0 / scale - 1.0;
    kkt.t = 1.0;
    return out;
  }

  kkt.clipped = search_index_set(s, alpha);
  const std::size_t l = kkt.clipped.count;
  const double headroom = 1.0 - alpha * static_cast<double>(l);
  double head_l1 = 0.0;
  for (std::size_t k = 0; k < l; ++k) head_l1 += s.mag[k];
  const double tail_norm = std::sqrt(s.tail_power[l]);

  ComplexVector x_unclipped(n);
  double power_unclipped = 0.0;
  if (kkt.clipped.zero_tail) {
    kkt.kind = ParCase::kZeroTail;
    power_unclipped = alpha * head_l1 * head_l1;
    const double fill =
        std::sqrt(headroom * power_unclipped / static_cast<double>(n - static_cast<Eigen::Index>(l)));
    x_unclipped.setConstant(cplx(fill, 0.0));
  } else {
    kkt.kind = ParCase::kScaledTail;
    const double q = std::sqrt(headroom) * tail_norm + std::sqrt(alpha) * head_l1;
    power_unclipped = q * q;
    x_unclipped = (std::sqrt(headroom * power_unclipped) / tail_norm) * z;
  }
  const double clip_level = std::sqrt(alpha * power_unclipped);
  for (std::size_t k = 0; k < l; ++k) {
    const auto i = static_cast<Eigen::Index>(s.order[k]);
    x_unclipped[i] = (clip_level / s.mag[k]) * z[i];
  }

  const double scale = apply_power_cap(bounds, power_unclipped, kkt);
  out.x = scale * x_unclipped;

  // Duals of the returned point.
  kkt.beta.resize(l);
  kkt.gamma.resize(l);
  for (std::size_t k = 0; k < l; ++k) kkt.gamma[k] = head_l1 / s.mag[k];
  double u_sum = 0.0;
  if (kkt.kind == ParCase::kZeroTail) {
    kkt.v = scale < 1.0 ? std::sqrt(alpha / bounds.power_cap()) * head_l1 - 1.0 : 0.0;
    kkt.epsilon = std::sqrt(headroom * kkt.power / static_cast<double>(n - static_cast<Eigen::Index>(l)));
    for (std::size_t k = 0; k < l; ++k) {
      const double u = (kkt.v + 1.0) * s.mag[k] / (alpha * head_l1);
      kkt.u[s.order[k]] = u;
      u_sum += u;
    }
  } else {
    const double q = std::sqrt(power_unclipped);
    kkt.v = scale < 1.0 ? q / std::sqrt(bounds.power_cap()) - 1.0 : 0.0;
    const double v_plus_t = (1.0 + kkt.v) * tail_norm / (std::sqrt(headroom) * q);
    for (std::size_t k = 0; k < l; ++k) {
      kkt.beta[k] = std::sqrt(headroom) * s.mag[k] / (std::sqrt(alpha) * tail_norm);
      const double u = (kkt.beta[k] - 1.0) * v_plus_t;
      kkt.u[s.order[k]] = u;
      u_sum += u;
    }
  }
  kkt.t = 1.0 - alpha * u_sum;
  return out;
}

ComplexVector proj_par_power(const ParPincBounds& bounds, const ComplexVector& z) {
  return proj_par_power_detailed(bounds, z).x;
}

ComplexVector proj_power_ball(double power_cap, const ComplexVector& x) {
  if (!(power_cap > 0.0)) throw std::invalid_argument("proj_power_ball: cap must be positive");
  const double power = x.squaredNorm();
  if (power <= power_cap) return x;
  return std::sqrt(power_cap / power) * x;
}

ComplexVector proj_par_only(double alpha, const ComplexVector& z) {
  return proj_par_power(ParPincBounds::from_alpha(alpha, ParPincBounds::kNoPowerCap), z);
}

KktCertificate verify_kkt(const ParPincBounds& bounds, const ComplexVector& z,
                          const ParProjection& projection) {
  const ComplexVector& x = projection.x;
  const KktWorkspace& kkt = projection.kkt;
  if (x.size() != z.size() || kkt.u.size() != static_cast<std::size_t>(z.size())) {
    throw DimensionError("verify_kkt: size mismatch");
  }
  KktCertificate cert;
  const double z_peak = z.size() > 0 ? z.cwiseAbs().maxCoeff() : 0.0;
  const double x_power = x.squaredNorm();
  if (z_peak == 0.0 || x_power == 0.0) {
    cert.stationarity = (x - z).cwiseAbs().maxCoeff();
    return cert;
  }
  const double alpha = bounds.alpha();
  const double cap = bounds.power_cap();

  std::vector<bool> in_set(static_cast<std::size_t>(z.size()), false);
  for (auto i : kkt.clipped.indices) in_set[i] = true;

  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double u = kkt.u[static_cast<std::size_t>(i)];
    const double c = u + kkt.v + kkt.t;
    cert.stationarity = std::max(cert.stationarity, std::abs(c * x[i] - z[i]) / z_peak);
    const double gap = (std::norm(x[i]) - alpha * x_power) / x_power;
    cert.slackness = std::max(cert.slackness, std::abs(u * gap));
    cert.primal = std::max(cert.primal, gap);
    cert.dual = std::max(cert.dual, -u);
    if (in_set[static_cast<std::size_t>(i)] != (u > 0.0)) cert.support_matches = false;
  }
  if (bounds.has_power_cap()) {
    const double gap = (x_power - cap) / cap;
    cert.slackness = std::max(cert.slackness, std::abs(kkt.v * gap));
    cert.primal = std::max(cert.primal, gap);
  }
  cert.dual = std::max(cert.dual, -kkt.v);
  cert.primal = std::max(cert.primal, 0.0);
  return cert;
}

}  // namespace parpinc
