// SPDX-License-Identifier: Apache-2.0
//
// parpinc: command-line driver for the PAR/PINC experiments.
//
//   parpinc gaussian-demo [--seed S] [--rho-db R] [--xi-db X] [--iters K] ...
//   parpinc ofdm-sim      [--seed S] [--rho-db R] [--xi-db X] [--iters K] ...
//   parpinc project       --input vec.txt --rho-db R [--power-cap P]
//
// Every subcommand accepts --config <file> with flat `option-name = value`
// lines ('#' comments); command-line flags take precedence. The file's
// entries are spliced in ahead of the real arguments and every option keeps
// its last value.

#include "parpinc/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace parpinc;

namespace {

ComplexVector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<cplx> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    double re = 0.0;
    double im = 0.0;
    if (!(ss >> re)) continue;
    if (!(ss >> im)) im = 0.0;
    std::string extra;
    if (ss >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 're [im]' per line");
    }
    values.emplace_back(re, im);
  }
  ComplexVector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

struct CommonFlags {
  std::uint64_t seed = 1;
  double rho_db = 0.0;
  double xi_db = 0.0;
  int iters = 1;
  int trials = 1;
  std::string out = "results";
};

// argv with the --config file's entries inserted right after the subcommand.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.size() < 2) return args;
  std::vector<std::string> spliced;
  for (auto [key, value] : read_key_values(path)) {
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    spliced.push_back("--" + key);
    spliced.push_back(value);
  }
  args.insert(args.begin() + 2, spliced.begin(), spliced.end());
  return args;
}

void add_config(CLI::App* sub, std::string& path) {
  sub->add_option("--config", path, "Flat key=value configuration file");
}

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  sub->add_option("--rho-db", f.rho_db, "PAR bound in dB")->capture_default_str();
  sub->add_option("--xi-db", f.xi_db, "PINC bound in dB")->capture_default_str();
  sub->add_option("--iters", f.iters, "Number of APM iterations (K_max)")->capture_default_str();
  sub->add_option("--trials", f.trials, "Monte-Carlo trials")->capture_default_str();
  sub->add_option("--out", f.out, "Output directory")->capture_default_str();
}

int run_gaussian(const CommonFlags& f, int rows, int cols) {
  GaussianDemoConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.rho_db = f.rho_db;
  cfg.xi_db = f.xi_db;
  cfg.k_max = f.iters;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  const auto res = run_gaussian_demo(cfg);

  const fs::path dir(f.out);
  prepare_out_dir(dir);
  emit_csv(res.rows, dir / "trajectory.csv");
  emit_summary(summarize(res.rows), dir / "summary.csv");
  emit_manifest(res.manifest, dir / "manifest.txt");
  for (std::size_t t = 0; t < res.runs.size(); ++t) {
    const auto& tr = res.runs[t].trace;
    std::cout << "trial " << t << ": PAR " << std::fixed << std::setprecision(3)
              << tr.final_par_db << " dB, PINC " << tr.final_pinc_db << " dB after "
              << cfg.k_max << " iterations\n";
  }
  std::cout << "wrote " << dir.string() << "/{trajectory.csv,summary.csv,manifest.txt}\n";
  return 0;
}

int run_ofdm(const CommonFlags& f, int antennas, int users, int subcarriers, int taps,
             const std::string& mask_file, int threads, int ccdf_iter) {
  OfdmExperimentConfig cfg;
  auto& sc = cfg.scenario;
  sc.bs_antennas = antennas;
  sc.users = users;
  sc.subcarriers = subcarriers;
  sc.taps = taps;
  sc.trials = f.trials;
  sc.seed = f.seed;
  sc.k_max = f.iters;
  sc.rho_db = f.rho_db;
  sc.xi_db = f.xi_db;
  if (mask_file.empty()) {
    sc.used = default_subcarrier_mask(subcarriers);
    cfg.mask_source = "default (" + std::to_string(sc.used_count()) + " used, DC unused)";
  } else {
    sc.used = load_subcarrier_mask(mask_file, subcarriers);
    cfg.mask_source = "file:" + mask_file;
  }
  cfg.threads = threads;
  cfg.ccdf_iter = std::min(ccdf_iter, sc.k_max);
  const auto res = run_ofdm_experiment(cfg);

  const fs::path dir(f.out);
  prepare_out_dir(dir);
  emit_csv(res.rows, dir / "trajectory.csv");
  emit_summary(res.summary, dir / "summary.csv");
  emit_ccdf(res.ccdf, dir / "ccdf.csv");
  emit_manifest(res.manifest, dir / "manifest.txt");
  std::cout << "iter  PAR99[dB]  PINC99[dB]\n";
  for (const auto& s : res.summary) {
    std::cout << std::setw(4) << s.iter << "  " << std::fixed << std::setprecision(3)
              << std::setw(9) << s.par_p99_db << "  " << std::setw(10) << s.pinc_p99_db << '\n';
  }
  std::cout << "wrote " << dir.string()
            << "/{trajectory.csv,summary.csv,ccdf.csv,manifest.txt}\n";
  return 0;
}

int run_project(const std::string& input, double rho_db, double power_cap) {
  const ComplexVector z = read_vector(input);
  if (z.size() == 0) throw std::runtime_error("'" + input + "' holds no entries");
  const auto n = static_cast<std::size_t>(z.size());
  const double rho = from_db(rho_db);
  const auto bounds = std::isinf(power_cap)
                          ? ParPincBounds::par_only(rho, n)
                          : ParPincBounds::from_alpha(ParPincBounds::par_only(rho, n).alpha(),
                                                      power_cap);
  const ParProjection proj = proj_par_power_detailed(bounds, z);
  const KktWorkspace& k = proj.kkt;
  const KktCertificate cert = verify_kkt(bounds, z, proj);

  std::cout << std::setprecision(12);
  std::cout << "N = " << n << ", alpha = " << bounds.alpha() << ", P = " << bounds.power_cap()
            << '\n';
  std::cout << "case = " << to_string(k.kind) << ", L = " << k.clipped.count << ", I = {";
  for (std::size_t i = 0; i < k.clipped.indices.size(); ++i) {
    std::cout << (i ? ", " : "") << k.clipped.indices[i];
  }
  std::cout << "}\n";
  std::cout << "P' = " << k.power_unclipped << ", |x|^2 = " << k.power << ", v = " << k.v
            << ", t = " << k.t << '\n';
  if (z.squaredNorm() > 0.0) {
    std::cout << "PAR(z) = " << to_db(par(z)) << " dB, PAR(x) = " << to_db(par(proj.x))
              << " dB\n";
  }
  std::cout << "i  re(x)  im(x)  u\n";
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    std::cout << i << "  " << proj.x[i].real() << "  " << proj.x[i].imag() << "  "
              << k.u[static_cast<std::size_t>(i)] << '\n';
  }
  std::cout << "KKT: stationarity " << cert.stationarity << ", slackness " << cert.slackness
            << ", primal " << cert.primal << ", dual " << cert.dual << ", support "
            << (cert.support_matches ? "ok" : "MISMATCH") << '\n';
  return cert.holds(1e-9) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAR/PINC-bounded precoding by alternating projections"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  CommonFlags gauss;
  gauss.rho_db = 0.4;
  gauss.xi_db = 1.6;
  gauss.iters = 500;
  gauss.out = "results/gaussian-demo";
  int rows = 100;
  int cols = 200;
  auto* g = app.add_subcommand("gaussian-demo", "APM on a complex Gaussian system y = Ax");
  add_config(g, config_path);
  add_common(g, gauss);
  g->add_option("--rows", rows, "Rows M of A")->capture_default_str();
  g->add_option("--cols", cols, "Columns N of A")->capture_default_str();

  CommonFlags ofdm;
  ofdm.rho_db = 3.0;
  ofdm.xi_db = 0.3;
  ofdm.iters = 20;
  ofdm.trials = 100;
  ofdm.out = "results/ofdm-sim";
  int antennas = 128;
  int users = 16;
  int subcarriers = 2048;
  int taps = 4;
  std::string mask_file;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int ccdf_iter = 5;
  auto* o = app.add_subcommand("ofdm-sim", "Joint precoding and PAR reduction, MU-MIMO-OFDM");
  add_config(o, config_path);
  add_common(o, ofdm);
  o->add_option("--bs-antennas", antennas, "BS antennas B")->capture_default_str();
  o->add_option("--users", users, "Single-antenna users U")->capture_default_str();
  o->add_option("--subcarriers", subcarriers, "OFDM subcarriers W")->capture_default_str();
  o->add_option("--taps", taps, "Channel taps")->capture_default_str();
  o->add_option("--mask-file", mask_file, "Used-subcarrier mask (0/1 per subcarrier)");
  o->add_option("--threads", threads, "Worker threads")->capture_default_str();
  o->add_option("--ccdf-iter", ccdf_iter, "Iteration whose CCDF samples are written")
      ->capture_default_str();

  std::string input;
  double proj_rho_db = 0.0;
  double power_cap = ParPincBounds::kNoPowerCap;
  auto* p = app.add_subcommand("project", "Project one vector onto the PAR/power set");
  add_config(p, config_path);
  p->add_option("--input", input, "Vector file, one 're [im]' per line")->required();
  p->add_option("--rho-db", proj_rho_db, "PAR bound in dB")->required();
  p->add_option("--power-cap", power_cap, "Absolute power cap P (default: none)");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    args.pop_back();
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (g->parsed()) return run_gaussian(gauss, rows, cols);
    if (o->parsed()) {
      return run_ofdm(ofdm, antennas, users, subcarriers, taps, mask_file, threads, ccdf_iter);
    }
    if (p->parsed()) return run_project(input, proj_rho_db, power_cap);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
