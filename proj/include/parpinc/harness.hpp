// SPDX-License-Identifier: Apache-2.0
//
// Seeded experiment drivers and their CSV / manifest outputs.
//
// Trajectory CSV:  experiment,trial,iter,antenna,par_db,pinc_db,evm_resid,oob_resid
//   antenna = -1 marks frame-level rows (PINC and residuals); antenna >= 0
//   rows carry the per-antenna PAR. Fields that do not apply are empty.
// CCDF CSV:        iter,metric,value_db   (one sample per row, ascending)
// Summary CSV:     iter,par_p99_db,pinc_p99_db
// Manifest:        key=value lines.

#pragma once

#include "parpinc/apm.hpp"
#include "parpinc/ofdm.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace parpinc {

inline constexpr std::string_view kArtifactVersion = "0.1.0";
inline constexpr double kReportPercentile = 0.99;

struct ResultRow {
  std::string experiment;
  int trial = 0;
  int iter = 0;
  int antenna = -1;
  std::optional<double> par_db;
  std::optional<double> pinc_db;
  std::optional<double> evm_resid;
  std::optional<double> oob_resid;

  bool operator==(const ResultRow&) const = default;
};

struct CcdfSample {
  int iter = 0;
  std::string metric;  // "par" or "pinc"
  double value_db = 0.0;

  bool operator==(const CcdfSample&) const = default;
};

struct SummaryRow {
  int iter = 0;
  double par_p99_db = 0.0;
  double pinc_p99_db = 0.0;
};

// Ordered key=value record of a run.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, std::uint64_t value);
  void set(const std::string& key, int value) { set(key, static_cast<std::int64_t>(value)); }

  std::optional<std::string> get(const std::string& key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Seed of trial `index` under the master seed.
std::uint64_t trial_seed(std::uint64_t master, std::size_t index);

struct GaussianDemoConfig {
  int rows = 100;
  int cols = 200;
  double rho_db = 0.4;
  double xi_db = 1.6;
  int k_max = 500;
  int trials = 1;  // independent (A, y) instances
  std::uint64_t seed = 1;

  void validate() const;
};

struct GaussianDemoResult {
  std::vector<ResultRow> rows;
  std::vector<ApmResult> runs;  // one per trial
  RunManifest manifest;
};

// Sees every iterate of every trial together with the system it solves.
using GaussianObserver =
    std::function<void(int trial, const AffineSystem&, int iter, const ComplexVector&)>;

GaussianDemoResult run_gaussian_demo(const GaussianDemoConfig& cfg,
                                     const GaussianObserver& observer = {});

struct OfdmExperimentConfig {
  OfdmScenario scenario = OfdmScenario::reference();
  int threads = 1;
  int ccdf_iter = 5;
  std::string mask_source = "default";
  int max_redraws = 100;

  void validate() const;
};

struct OfdmExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<CcdfSample> ccdf;
  int redraws = 0;
  RunManifest manifest;
};

// Called once per (trial, iterate); invoked from worker threads.
using OfdmObserver = std::function<void(int trial, const JppIterate&)>;

OfdmExperimentResult run_ofdm_experiment(const OfdmExperimentConfig& cfg,
                                         const OfdmObserver& observer = {});

// Per-iteration 99th percentiles over rows of one experiment: PAR pooled over
// antenna rows, PINC over frame rows.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

void emit_ccdf(const std::vector<CcdfSample>& samples, const std::filesystem::path& path);
std::vector<CcdfSample> read_ccdf(const std::filesystem::path& path);

void emit_summary(const std::vector<SummaryRow>& rows, const std::filesystem::path& path);
void emit_manifest(const RunManifest& manifest, const std::filesystem::path& path);

// 17 significant digits (round-trips every double).
std::string format_number(double v);

// Flat key=value reader ('#' comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path);

}  // namespace parpinc
