// SPDX-License-Identifier: Apache-2.0
//
// Alternating projections between {x : Ax = y} and the PAR/PINC set. The
// first iterate is the least-squares solution; every later iterate is
// proj_affine(proj_par_power(previous)). Runs a fixed number of iterations.

#pragma once

#include "parpinc/metrics.hpp"
#include "parpinc/projections.hpp"

#include <functional>
#include <vector>

namespace parpinc {

struct ApmConfig {
  double rho_db = 0.0;
  double xi_db = 0.0;
  int k_max = 1;
  bool record_trace = true;

  void validate() const;
};

struct ApmTrace {
  std::vector<TradeoffPoint> points;
  std::vector<double> residuals;  // |Ax - y| / |y| per recorded iterate
  double final_residual = 0.0;
  double final_par_db = 0.0;
  double final_pinc_db = 0.0;
};

struct ApmResult {
  ComplexVector x;
  ApmTrace trace;
};

// Called with (k, x^(k)) for k = 1..k_max.
using IterateObserver = std::function<void(int, const ComplexVector&)>;

ApmResult apm_solve(const AffineSystem& sys, const ApmConfig& cfg,
                    const IterateObserver& observer = {});

}  // namespace parpinc
