// SPDX-License-Identifier: Apache-2.0

#include "parpinc/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace parpinc {

Constellation Constellation::qam16() {
  Constellation c;
  const double scale = 1.0 / std::sqrt(10.0);
  for (int re : {-3, -1, 1, 3}) {
    for (int im : {-3, -1, 1, 3}) c.points.emplace_back(re * scale, im * scale);
  }
  return c;
}

double Constellation::mean_energy() const {
  if (points.empty()) return 0.0;
  double e = 0.0;
  for (const auto& p : points) e += std::norm(p);
  return e / static_cast<double>(points.size());
}

SubcarrierMask default_subcarrier_mask(int subcarriers) {
  if (subcarriers < 2) throw std::invalid_argument("default_subcarrier_mask: need W >= 2");
  const auto w = static_cast<std::size_t>(subcarriers);
  // At least one bin, never touching DC from both sides.
  const std::size_t half =
      std::min(std::max<std::size_t>(w * 600 / 2048, 1), std::max<std::size_t>((w - 1) / 2, 1));
  SubcarrierMask mask(w, false);
  for (std::size_t k = 1; k <= half; ++k) {
    mask[k] = true;
    mask[w - k] = true;
  }
  return mask;
}

SubcarrierMask load_subcarrier_mask(const std::string& path, int subcarriers) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mask file '" + path + "'");
  SubcarrierMask mask;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      if (tok != "0" && tok != "1") {
        throw std::runtime_error("mask file '" + path + "': unexpected token '" + tok + "'");
      }
      mask.push_back(tok == "1");
    }
  }
  if (mask.size() != static_cast<std::size_t>(subcarriers)) {
    throw std::runtime_error("mask file '" + path + "': " + std::to_string(mask.size()) +
                             " flags for " + std::to_string(subcarriers) + " subcarriers");
  }
  return mask;
}

OfdmScenario OfdmScenario::reference() {
  OfdmScenario s;
  s.used = default_subcarrier_mask(s.subcarriers);
  return s;
}

std::size_t OfdmScenario::used_count() const {
  std::size_t n = 0;
  for (bool b : used) n += b ? 1 : 0;
  return n;
}

void OfdmScenario::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("OfdmScenario: " + msg); };
  if (users < 1) fail("need at least one user");
  if (users >= bs_antennas) fail("need fewer users than BS antennas");
  if (subcarriers < 2) fail("need at least two subcarriers");
  if (used.size() != static_cast<std::size_t>(subcarriers)) fail("mask length differs from W");
  if (used_count() == 0) fail("no used subcarriers");
  if (taps < 1 || taps > subcarriers) fail("tap count must lie in [1, W]");
  if (constellation.points.empty()) fail("empty constellation");
  if (std::abs(constellation.mean_energy() - 1.0) > 1e-12) fail("constellation energy is not 1");
  if (trials < 1) fail("need at least one trial");
  if (k_max < 1) fail("k_max must be >= 1");
  if (!(rho_db >= 0.0) || !(xi_db >= 0.0)) fail("bounds must be >= 0 dB");
  if (std::pow(10.0, rho_db / 10.0) > subcarriers * (1.0 + 1e-9)) fail("PAR bound exceeds W");
}

ChannelRealization generate_channel(const OfdmScenario& scenario, Rng& rng) {
  const Eigen::Index u = scenario.users;
  const Eigen::Index b = scenario.bs_antennas;
  const int w_count = scenario.subcarriers;
  ChannelRealization ch;
  ch.taps.reserve(static_cast<std::size_t>(scenario.taps));
  for (int l = 0; l < scenario.taps; ++l) ch.taps.push_back(rng.complex_normal_matrix(u, b));

  ch.freq.assign(static_cast<std::size_t>(w_count), ComplexMatrix::Zero(u, b));
  for (int w = 0; w < w_count; ++w) {
    ComplexMatrix& h = ch.freq[static_cast<std::size_t>(w)];
    h = ch.taps[0];
    for (int l = 1; l < scenario.taps; ++l) {
      // Reduce w*l mod W before forming the angle.
      const auto k = static_cast<long long>(w) * l % w_count;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / w_count;
      h += std::polar(1.0, angle) * ch.taps[static_cast<std::size_t>(l)];
    }
  }
  return ch;
}

ComplexMatrix generate_symbols(const OfdmScenario& scenario, Rng& rng) {
  ComplexMatrix s = ComplexMatrix::Zero(scenario.users, scenario.subcarriers);
  const auto& pts = scenario.constellation.points;
  for (Eigen::Index w = 0; w < scenario.subcarriers; ++w) {
    if (!scenario.used[static_cast<std::size_t>(w)]) continue;
    for (Eigen::Index u = 0; u < scenario.users; ++u) s(u, w) = pts[rng.below(pts.size())];
  }
  return s;
}

PrecodeFrame PrecodeFrame::from_frequency(ComplexMatrix x, const UnitaryDft& dft) {
  const Eigen::Index b_count = x.rows();
  const Eigen::Index w_count = x.cols();
  if (static_cast<std::size_t>(w_count) != dft.size()) {
    throw DimensionError("PrecodeFrame: DFT length differs from W");
  }
  PrecodeFrame f;
  f.t.resize(w_count, b_count);
  ComplexVector row(w_count);
  for (Eigen::Index b = 0; b < b_count; ++b) {
    row = x.row(b).transpose();
    dft.inverse(std::span<const cplx>(row.data(), static_cast<std::size_t>(w_count)),
                std::span<cplx>(f.t.col(b).data(), static_cast<std::size_t>(w_count)));
  }
  f.x = std::move(x);
  return f;
}

PrecodeFrame PrecodeFrame::from_time(ComplexMatrix t, const UnitaryDft& dft) {
  const Eigen::Index w_count = t.rows();
  const Eigen::Index b_count = t.cols();
  if (static_cast<std::size_t>(w_count) != dft.size()) {
    throw DimensionError("PrecodeFrame: DFT length differs from W");
  }
  PrecodeFrame f;
  f.x.resize(b_count, w_count);
  ComplexVector spectrum(w_count);
  for (Eigen::Index b = 0; b < b_count; ++b) {
    dft.forward(std::span<const cplx>(t.col(b).data(), static_cast<std::size_t>(w_count)),
                std::span<cplx>(spectrum.data(), static_cast<std::size_t>(w_count)));
    f.x.row(b) = spectrum.transpose();
  }
  f.t = std::move(t);
  return f;
}

SubcarrierSystems::SubcarrierSystems(const ChannelRealization& channel,
                                     const ComplexMatrix& symbols, const SubcarrierMask& used)
    : antennas_(channel.freq.empty() ? 0 : static_cast<int>(channel.freq.front().cols())) {
  const std::size_t w_count = used.size();
  if (channel.freq.size() != w_count || static_cast<std::size_t>(symbols.cols()) != w_count) {
    throw DimensionError("SubcarrierSystems: subcarrier count mismatch");
  }
  systems_.resize(w_count);
  for (std::size_t w = 0; w < w_count; ++w) {
    if (!used[w]) continue;
    try {
      systems_[w].emplace(channel.freq[w], symbols.col(static_cast<Eigen::Index>(w)));
    } catch (const RankDeficiencyError& e) {
      throw RankDeficiencyError("subcarrier " + std::to_string(w) + ": " + e.what());
    }
  }
}

ComplexMatrix SubcarrierSystems::project(const ComplexMatrix& x) const {
  if (x.cols() != subcarriers() || x.rows() != antennas_) {
    throw DimensionError("SubcarrierSystems::project: frame shape mismatch");
  }
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t w = 0; w < systems_.size(); ++w) {
    const auto col = static_cast<Eigen::Index>(w);
    if (systems_[w]) {
      out.col(col) = proj_affine(*systems_[w], x.col(col));
    } else {
      out.col(col).setZero();
    }
  }
  return out;
}

ComplexMatrix SubcarrierSystems::least_squares() const {
  ComplexMatrix out = ComplexMatrix::Zero(antennas_, subcarriers());
  for (std::size_t w = 0; w < systems_.size(); ++w) {
    if (systems_[w]) out.col(static_cast<Eigen::Index>(w)) = systems_[w]->least_squares();
  }
  return out;
}

PrecodeFrame ls_precode(const ChannelRealization& channel, const ComplexMatrix& symbols,
                        const SubcarrierMask& used) {
  const SubcarrierSystems systems(channel, symbols, used);
  const UnitaryDft dft(used.size());
  return PrecodeFrame::from_frequency(systems.least_squares(), dft);
}

namespace {

JppIterationStats frame_stats(int iter, const PrecodeFrame& frame, const PrecodeFrame& ls,
                              const ChannelRealization& channel, const ComplexMatrix& symbols,
                              const SubcarrierMask& used) {
  JppIterationStats st;
  st.iter = iter;
  st.antenna_par_db.reserve(static_cast<std::size_t>(frame.t.cols()));
  for (Eigen::Index b = 0; b < frame.t.cols(); ++b) {
    st.antenna_par_db.push_back(to_db(par(frame.t.col(b))));
  }
  st.pinc_db = to_db(pinc_frobenius(frame.t, ls.t));
  st.evm = evm_residual(frame.x, channel.freq, symbols, used);
  st.oob = oob_residual(frame.x, used);
  return st;
}

}  // namespace

JppResult jpp_apm_precode(const ChannelRealization& channel, const ComplexMatrix& symbols,
                          const OfdmScenario& scenario, const JppObserver& observer) {
  scenario.validate();
  const SubcarrierSystems systems(channel, symbols, scenario.used);
  const UnitaryDft dft(static_cast<std::size_t>(scenario.subcarriers));

  const PrecodeFrame ls = PrecodeFrame::from_frequency(systems.least_squares(), dft);
  const double ls_power = ls.t.squaredNorm();
  if (!(ls_power > 0.0)) throw std::invalid_argument("jpp_apm_precode: LS frame is zero");

  // Per-antenna PAR bound (no per-antenna power cap) and one global cap.
  const double alpha =
      ParPincBounds::par_only(from_db(scenario.rho_db), static_cast<std::size_t>(scenario.subcarriers))
          .alpha();
  const double power_cap = from_db(scenario.xi_db) * ls_power;

  JppResult result;
  auto record = [&](int k, const PrecodeFrame& frame, const ComplexMatrix* clipped) {
    result.trace.iterations.push_back(frame_stats(k, frame, ls, channel, symbols, scenario.used));
    if (observer) observer(JppIterate{k, frame, ls, clipped});
  };

  PrecodeFrame frame = ls;
  record(1, frame, nullptr);
  for (int k = 2; k <= scenario.k_max; ++k) {
    ComplexMatrix t = frame.t;
    for (Eigen::Index b = 0; b < t.cols(); ++b) t.col(b) = proj_par_only(alpha, t.col(b));
    const ComplexMatrix clipped = t;
    const double power = t.squaredNorm();
    if (power > power_cap) t *= std::sqrt(power_cap / power);

    const PrecodeFrame spectral = PrecodeFrame::from_time(std::move(t), dft);
    frame = PrecodeFrame::from_frequency(systems.project(spectral.x), dft);
    record(k, frame, &clipped);
  }
  result.frame = std::move(frame);
  return result;
}

PrecodeFrame normalize_unit_power(const PrecodeFrame& frame) {
  const double norm = frame.x.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("normalize_unit_power: zero frame");
  return PrecodeFrame{frame.x / norm, frame.t / norm};
}

}  // namespace parpinc
