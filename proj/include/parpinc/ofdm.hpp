// SPDX-License-Identifier: Apache-2.0
//
// Massive MU-MIMO-OFDM downlink: tapped Gaussian channels, least-squares
// (zero-forcing) precoding, and joint precoding + PAR reduction by
// alternating projections.
//
// Conventions
//   X (B x W): frequency-domain precoder output, column w = x_w.
//   T (W x B): time-domain antenna signals, column b = t_b, T = F^H X^T with
//              the unitary DFT F.
//   H_w (U x B) = sum_l H_l exp(-j 2 pi w l / W), w = 0..W-1.

#pragma once

#include "parpinc/metrics.hpp"
#include "parpinc/numeric.hpp"
#include "parpinc/projections.hpp"
#include "parpinc/random.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace parpinc {

struct Constellation {
  std::vector<cplx> points;

  // Square 16-QAM scaled to unit average energy.
  static Constellation qam16();
  double mean_energy() const;
};

// Default used-subcarrier layout: W * 1200 / 2048 used bins (1200 at
// W = 2048, the LTE 20 MHz numerology) split evenly on both sides of an
// unused DC bin; everything else is guard band.
SubcarrierMask default_subcarrier_mask(int subcarriers);

// Parses whitespace-separated 0/1 flags, one per subcarrier; '#' starts a
// comment. Throws std::runtime_error with the path on failure.
SubcarrierMask load_subcarrier_mask(const std::string& path, int subcarriers);

struct OfdmScenario {
  int bs_antennas = 128;
  int users = 16;
  int subcarriers = 2048;
  SubcarrierMask used;
  int taps = 4;
  Constellation constellation = Constellation::qam16();
  int trials = 100;
  std::uint64_t seed = 1;
  int k_max = 20;
  double rho_db = 3.0;
  double xi_db = 0.3;

  // The configuration of the published MU-MIMO-OFDM experiment.
  static OfdmScenario reference();

  std::size_t used_count() const;
  void validate() const;
};

struct ChannelRealization {
  std::vector<ComplexMatrix> taps;  // U x B each
  std::vector<ComplexMatrix> freq;  // U x B per subcarrier
};

ChannelRealization generate_channel(const OfdmScenario& scenario, Rng& rng);

// U x W; zero on unused subcarriers.
ComplexMatrix generate_symbols(const OfdmScenario& scenario, Rng& rng);

struct PrecodeFrame {
  ComplexMatrix x;  // B x W
  ComplexMatrix t;  // W x B

  static PrecodeFrame from_frequency(ComplexMatrix x, const UnitaryDft& dft);
  static PrecodeFrame from_time(ComplexMatrix t, const UnitaryDft& dft);
};

// Per-subcarrier constraint systems H_w x_w = s_w, factorized once.
class SubcarrierSystems {
 public:
  SubcarrierSystems(const ChannelRealization& channel, const ComplexMatrix& symbols,
                    const SubcarrierMask& used);

  int antennas() const { return antennas_; }
  int subcarriers() const { return static_cast<int>(systems_.size()); }

  // Column-wise proj_affine on used subcarriers; unused columns set to zero.
  ComplexMatrix project(const ComplexMatrix& x) const;
  ComplexMatrix least_squares() const;

 private:
  int antennas_;
  std::vector<std::optional<AffineSystem>> systems_;
};

PrecodeFrame ls_precode(const ChannelRealization& channel, const ComplexMatrix& symbols,
                        const SubcarrierMask& used);

struct JppIterationStats {
  int iter = 0;
  std::vector<double> antenna_par_db;  // one per BS antenna
  double pinc_db = 0.0;                // Frobenius PINC vs. the LS frame
  double evm = 0.0;
  double oob = 0.0;
};

struct JppTrace {
  std::vector<JppIterationStats> iterations;
};

struct JppIterate {
  int iter;
  const PrecodeFrame& frame;
  const PrecodeFrame& ls_frame;
  // Time-domain signals right after the per-antenna PAR projection; null
  // for the first (LS) iterate.
  const ComplexMatrix* par_projected;
};

using JppObserver = std::function<void(const JppIterate&)>;

struct JppResult {
  PrecodeFrame frame;
  JppTrace trace;
};

JppResult jpp_apm_precode(const ChannelRealization& channel, const ComplexMatrix& symbols,
                          const OfdmScenario& scenario, const JppObserver& observer = {});

// Scales X and T by 1 / |X|_F. Throws std::invalid_argument on a zero frame.
PrecodeFrame normalize_unit_power(const PrecodeFrame& frame);

}  // namespace parpinc
