// SPDX-License-Identifier: Apache-2.0

#include "parpinc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace parpinc {

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) { set(key, format_number(value)); }

void RunManifest::set(const std::string& key, std::int64_t value) {
  set(key, std::to_string(value));
}

void RunManifest::set(const std::string& key, std::uint64_t value) {
  set(key, std::to_string(value));
}

std::optional<std::string> RunManifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t index) {
  return derive_seed(master, static_cast<std::uint64_t>(index));
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void stamp_common(RunManifest& m, const std::string& experiment, std::uint64_t seed) {
  m.set("experiment", experiment);
  m.set("artifact_version", std::string(kArtifactVersion));
  m.set("timestamp", utc_timestamp());
  m.set("rng_algorithm", std::string(kRngAlgorithm));
  m.set("trial_seed_rule", std::string("splitmix64(master ^ splitmix64(trial))"));
  m.set("seed", seed);
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian demo

void GaussianDemoConfig::validate() const {
  if (rows < 1 || cols <= rows) {
    throw std::invalid_argument("gaussian-demo: need 1 <= M < N");
  }
  ApmConfig{rho_db, xi_db, k_max, true}.validate();
  if (trials < 1) throw std::invalid_argument("gaussian-demo: need at least one trial");
  if (std::pow(10.0, rho_db / 10.0) > cols * (1.0 + 1e-9)) {
    throw std::invalid_argument("gaussian-demo: PAR bound exceeds N");
  }
}

GaussianDemoResult run_gaussian_demo(const GaussianDemoConfig& cfg,
                                     const GaussianObserver& observer) {
  cfg.validate();
  GaussianDemoResult out;
  auto& m = out.manifest;
  stamp_common(m, "gaussian-demo", cfg.seed);
  m.set("rows", cfg.rows);
  m.set("cols", cfg.cols);
  m.set("rho_db", cfg.rho_db);
  m.set("xi_db", cfg.xi_db);
  m.set("iters", cfg.k_max);
  m.set("trials", cfg.trials);

  const ApmConfig apm_cfg{cfg.rho_db, cfg.xi_db, cfg.k_max, true};
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t seed = trial_seed(cfg.seed, static_cast<std::size_t>(trial));
    m.set("trial_seed." + std::to_string(trial), seed);
    Rng rng(seed);
    ComplexMatrix a = rng.complex_normal_matrix(cfg.rows, cfg.cols);
    ComplexVector y = rng.complex_normal_vector(cfg.rows);
    const AffineSystem sys(std::move(a), std::move(y));

    IterateObserver hook;
    if (observer) hook = [&](int k, const ComplexVector& x) { observer(trial, sys, k, x); };
    ApmResult run = apm_solve(sys, apm_cfg, hook);

    const auto& tr = run.trace;
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
      ResultRow r;
      r.experiment = "gaussian-demo";
      r.trial = trial;
      r.iter = tr.points[i].iter;
      r.antenna = -1;
      r.par_db = tr.points[i].par_db;
      r.pinc_db = tr.points[i].pinc_db;
      r.evm_resid = tr.residuals[i];
      out.rows.push_back(std::move(r));
    }
    const std::string prefix = "trial." + std::to_string(trial) + ".";
    m.set(prefix + "final_par_db", tr.final_par_db);
    m.set(prefix + "final_pinc_db", tr.final_pinc_db);
    m.set(prefix + "final_residual", tr.final_residual);
    out.runs.push_back(std::move(run));
  }
  return out;
}

// ---------------------------------------------------------------------------
// OFDM experiment

void OfdmExperimentConfig::validate() const {
  scenario.validate();
  if (threads < 1) throw std::invalid_argument("ofdm-sim: threads must be >= 1");
  if (ccdf_iter < 1 || ccdf_iter > scenario.k_max) {
    throw std::invalid_argument("ofdm-sim: ccdf iteration must lie in [1, iters]");
  }
  if (max_redraws < 0) throw std::invalid_argument("ofdm-sim: max_redraws must be >= 0");
}

namespace {

struct TrialOutput {
  std::vector<ResultRow> rows;
  int redraws = 0;
};

TrialOutput run_trial(const OfdmExperimentConfig& cfg, int trial, const OfdmObserver& observer) {
  const OfdmScenario& sc = cfg.scenario;
  Rng rng(trial_seed(sc.seed, static_cast<std::size_t>(trial)));
  TrialOutput out;
  for (;;) {
    const ChannelRealization channel = generate_channel(sc, rng);
    const ComplexMatrix symbols = generate_symbols(sc, rng);
    JppObserver hook;
    if (observer) hook = [&](const JppIterate& it) { observer(trial, it); };
    JppResult res;
    try {
      res = jpp_apm_precode(channel, symbols, sc, hook);
    } catch (const RankDeficiencyError& e) {
      ++out.redraws;
      std::cerr << "ofdm-sim: trial " << trial << ": rank-deficient channel (" << e.what()
                << "), redrawing\n";
      if (out.redraws > cfg.max_redraws) {
        throw std::runtime_error("ofdm-sim: trial " + std::to_string(trial) +
                                 " exceeded the redraw limit");
      }
      continue;
    }
    for (const auto& st : res.trace.iterations) {
      ResultRow frame;
      frame.experiment = "ofdm-sim";
      frame.trial = trial;
      frame.iter = st.iter;
      frame.antenna = -1;
      frame.pinc_db = st.pinc_db;
      frame.evm_resid = st.evm;
      frame.oob_resid = st.oob;
      out.rows.push_back(std::move(frame));
      for (std::size_t b = 0; b < st.antenna_par_db.size(); ++b) {
        ResultRow r;
        r.experiment = "ofdm-sim";
        r.trial = trial;
        r.iter = st.iter;
        r.antenna = static_cast<int>(b);
        r.par_db = st.antenna_par_db[b];
        out.rows.push_back(std::move(r));
      }
    }
    return out;
  }
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_iter;
  for (const auto& r : rows) {
    auto& [pars, pincs] = by_iter[r.iter];
    if (r.antenna >= 0 && r.par_db) pars.push_back(*r.par_db);
    if (r.antenna < 0 && r.pinc_db) pincs.push_back(*r.pinc_db);
    // Frame rows without per-antenna rows (single-vector experiments).
    if (r.antenna < 0 && r.par_db) pars.push_back(*r.par_db);
  }
  std::vector<SummaryRow> out;
  for (const auto& [iter, samples] : by_iter) {
    const auto& [pars, pincs] = samples;
    if (pars.empty() || pincs.empty()) continue;
    out.push_back({iter, ccdf_percentile(pars, kReportPercentile),
                   ccdf_percentile(pincs, kReportPercentile)});
  }
  return out;
}

OfdmExperimentResult run_ofdm_experiment(const OfdmExperimentConfig& cfg,
                                         const OfdmObserver& observer) {
  cfg.validate();
  const int trials = cfg.scenario.trials;
  std::vector<TrialOutput> outputs(static_cast<std::size_t>(trials));

  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      {
        std::lock_guard lock(err_mu);
        if (error) return;
      }
      try {
        outputs[static_cast<std::size_t>(t)] = run_trial(cfg, t, observer);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int n_workers = std::min(cfg.threads, trials);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  OfdmExperimentResult res;
  for (auto& o : outputs) {
    res.redraws += o.redraws;
    res.rows.insert(res.rows.end(), std::make_move_iterator(o.rows.begin()),
                    std::make_move_iterator(o.rows.end()));
  }
  // Trials are already in order; within a trial rows are (iter, antenna).
  std::stable_sort(res.rows.begin(), res.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.trial, a.iter, a.antenna) < std::tie(b.trial, b.iter, b.antenna);
  });
  res.summary = summarize(res.rows);

  if (!percentile_resolvable(static_cast<std::size_t>(trials), kReportPercentile)) {
    std::cerr << "ofdm-sim: " << trials
              << " trials are too few to resolve the PINC 99th percentile\n";
  }

  std::vector<int> ccdf_iters{1};
  if (cfg.ccdf_iter != 1) ccdf_iters.push_back(cfg.ccdf_iter);
  for (int it : ccdf_iters) {
    std::vector<double> pars;
    std::vector<double> pincs;
    for (const auto& r : res.rows) {
      if (r.iter != it) continue;
      if (r.antenna >= 0) pars.push_back(*r.par_db);
      else pincs.push_back(*r.pinc_db);
    }
    std::sort(pars.begin(), pars.end());
    std::sort(pincs.begin(), pincs.end());
    for (double v : pars) res.ccdf.push_back({it, "par", v});
    for (double v : pincs) res.ccdf.push_back({it, "pinc", v});
  }

  const OfdmScenario& sc = cfg.scenario;
  auto& m = res.manifest;
  stamp_common(m, "ofdm-sim", sc.seed);
  m.set("bs_antennas", sc.bs_antennas);
  m.set("users", sc.users);
  m.set("subcarriers", sc.subcarriers);
  m.set("used_subcarriers", static_cast<std::int64_t>(sc.used_count()));
  m.set("mask", cfg.mask_source);
  m.set("taps", sc.taps);
  m.set("constellation", std::string("16-QAM unit energy"));
  m.set("trials", trials);
  m.set("iters", sc.k_max);
  m.set("rho_db", sc.rho_db);
  m.set("xi_db", sc.xi_db);
  m.set("ccdf_iter", cfg.ccdf_iter);
  m.set("threads", cfg.threads);
  m.set("redraws", res.redraws);
  for (int t = 0; t < trials; ++t) {
    m.set("trial_seed." + std::to_string(t), trial_seed(sc.seed, static_cast<std::size_t>(t)));
  }
  return res;
}

}  // namespace parpinc
