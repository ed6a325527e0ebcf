// SPDX-License-Identifier: Apache-2.0

#include "parpinc/apm.hpp"

#include <stdexcept>
#include <string>

namespace parpinc {

void ApmConfig::validate() const {
  if (!(rho_db >= 0.0)) throw std::invalid_argument("ApmConfig: rho_db must be >= 0");
  if (!(xi_db >= 0.0)) throw std::invalid_argument("ApmConfig: xi_db must be >= 0");
  if (k_max < 1) throw std::invalid_argument("ApmConfig: k_max must be >= 1");
}

ApmResult apm_solve(const AffineSystem& sys, const ApmConfig& cfg,
                    const IterateObserver& observer) {
  cfg.validate();
  const ComplexVector& x_ls = sys.least_squares();
  const double ls_power = x_ls.squaredNorm();
  if (!(ls_power > 0.0)) {
    throw std::invalid_argument("apm_solve: least-squares solution is zero (y = 0)");
  }
  const auto bounds =
      ParPincBounds::from_db(cfg.rho_db, cfg.xi_db, static_cast<std::size_t>(sys.cols()), ls_power);

  ApmResult result;
  auto record = [&](int k, const ComplexVector& x) {
    if (cfg.record_trace) {
      result.trace.points.push_back({k, to_db(par(x)), to_db(pinc(x, x_ls))});
      result.trace.residuals.push_back(sys.relative_residual(x));
    }
    if (observer) observer(k, x);
  };

  // x^(0) = 0 and the first D-projection is skipped, so x^(1) = x_ls.
  ComplexVector x = x_ls;
  record(1, x);
  for (int k = 2; k <= cfg.k_max; ++k) {
    x = proj_affine(sys, proj_par_power(bounds, x));
    record(k, x);
  }

  result.trace.final_residual = sys.relative_residual(x);
  result.trace.final_par_db = to_db(par(x));
  result.trace.final_pinc_db = to_db(pinc(x, x_ls));
  result.x = std::move(x);
  return result;
}

}  // namespace parpinc
