// SPDX-License-Identifier: Apache-2.0
//
// Orthogonal projections onto the affine solution set {x : Ax = y} and onto
// the PAR + power-bounded set
//
//   D = { x : |x_i|^2 <= alpha |x|^2 for all i,  |x|^2 <= P },
//
// where alpha = rho / N for a PAR bound rho and P is an absolute power cap.
// D is nonconvex; proj_par_power returns the KKT point obtained by clipping
// the L largest-magnitude entries to a common level and rescaling the rest,
// followed by a power-ball rescale. The dual variables of that point are
// reported so callers can certify it.

#pragma once

#include "parpinc/numeric.hpp"

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace parpinc {

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The constraint y = Ax with a cached factorization of A A^H.
class AffineSystem {
 public:
  AffineSystem(ComplexMatrix a, ComplexVector y);

  const ComplexMatrix& matrix() const { return a_; }
  const ComplexVector& rhs() const { return y_; }
  const GramFactorization& gram() const { return gram_; }
  const ComplexVector& least_squares() const { return x_ls_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }

  // |Ax - y|_2 / |y|_2 (absolute when y = 0).
  double relative_residual(const ComplexVector& x) const;

 private:
  ComplexMatrix a_;
  ComplexVector y_;
  GramFactorization gram_;
  ComplexVector x_ls_;
};

ComplexVector proj_affine(const AffineSystem& sys, const ComplexVector& z);

// PAR bound rho and power cap P for vectors of a fixed length.
class ParPincBounds {
 public:
  static constexpr double kNoPowerCap = std::numeric_limits<double>::infinity();

  // rho in [1, N] (linear), xi >= 1 (linear); P = xi * ls_power.
  static ParPincBounds from_ratios(double rho, double xi, std::size_t n,
                                   double ls_power);
  static ParPincBounds from_db(double rho_db, double xi_db, std::size_t n,
                               double ls_power);
  // PAR bound only (P = infinity).
  static ParPincBounds par_only(double rho, std::size_t n);
  // Raw parameters: 0 < alpha <= 1, P > 0 or infinite.
  static ParPincBounds from_alpha(double alpha, double power_cap);

  double alpha() const { return alpha_; }
  double power_cap() const { return power_cap_; }
  bool has_power_cap() const { return power_cap_ < kNoPowerCap; }

 private:
  ParPincBounds(double alpha, double power_cap);
  double alpha_;
  double power_cap_;
};

enum class ParCase {
  kZeroInput,   // z = 0, returned unchanged
  kVacuous,     // alpha = 1: only the power cap applies
  kFeasible,    // PAR(z) <= rho: magnitudes kept, power cap applied
  kZeroTail,    // clipped set I, z zero off I: tail filled at a constant level
  kScaledTail,  // clipped set I, tail rescaled proportionally
};

const char* to_string(ParCase c);

struct IndexSet {
  std::vector<std::size_t> indices;  // descending |z_i|, ties by index
  std::size_t count = 0;             // L
  bool zero_tail = false;            // z restricted to I^c is zero
};

// Relative magnitude tolerance under which two entries count as tied.
inline constexpr double kTieTolerance = 1e-12;
// Candidates with 1 - alpha*L below this are rejected.
inline constexpr double kClipHeadroom = 1e-12;

// Smallest L whose L largest-magnitude entries form a unique set I with
//   max_{I^c} |z_i| <= sqrt(alpha / (1 - alpha L)) |z_{I^c}|_2 < min_I |z_i|.
// Empty when z already satisfies the PAR bound. Throws ProjectionError if no
// L < 1/alpha qualifies.
IndexSet determine_index_set(const ComplexVector& z, double alpha);

// Duals and intermediate quantities of a projection onto D.
struct KktWorkspace {
  ParCase kind = ParCase::kZeroInput;
  IndexSet clipped;
  std::vector<double> u;      // per-entry PAR duals; > 0 exactly on I
  double v = 0.0;             // power-cap dual
  double t = 1.0;             // 1 - alpha * sum(u)
  double power_unclipped = 0.0;  // P' before the power-ball step
  double power = 0.0;            // |x|^2 of the returned point
  std::vector<double> beta;   // Case 2 ratios on I (order of clipped.indices)
  std::vector<double> gamma;  // |z_I|_1 / |z_i| on I
  double epsilon = 0.0;       // Case 1 fill magnitude on I^c
};

struct ParProjection {
  ComplexVector x;
  KktWorkspace kkt;
};

ParProjection proj_par_power_detailed(const ParPincBounds& bounds,
                                      const ComplexVector& z);
ComplexVector proj_par_power(const ParPincBounds& bounds, const ComplexVector& z);

// min{1, sqrt(P) / |x|_2} x.
ComplexVector proj_power_ball(double power_cap, const ComplexVector& x);

ComplexVector proj_par_only(double alpha, const ComplexVector& z);

// Largest violation of each KKT condition at (x, u, v); all normalized to be
// scale-free (stationarity by |z|_inf, products and constraints by |x|^2, P).
struct KktCertificate {
  double stationarity = 0.0;
  double slackness = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  bool support_matches = true;  // u_i > 0 exactly on the clipped set

  bool holds(double tol) const {
    return stationarity <= tol && slackness <= tol && primal <= tol &&
           dual <= tol && support_matches;
  }
};

KktCertificate verify_kkt(const ParPincBounds& bounds, const ComplexVector& z,
                          const ParProjection& projection);

}  // namespace parpinc
