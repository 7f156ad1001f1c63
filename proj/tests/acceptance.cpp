// Acceptance gate: runs the end-to-end property suite and prints one
// PASS/FAIL line per criterion. Exits non-zero if any criterion fails.
// argv[1] must be the path to the command-line tool (used by the
// determinism criterion).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmn/harness.hpp"

using namespace pmn;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid) - 1, v.end());
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// 1. Closed-form background response equals the scalar recursion.
bool closed_form_identity() {
  OfdmGrid grid;
  const double th = 20.0 * grid.block_period_s();
  for (double alpha : {0.9, 0.95, 0.99, 0.995}) {
    for (double fd = 0.0; fd <= 400.0; fd += 50.0) {
      cplx bg{0.0, 0.0};
      for (int p = 1; p <= 30; ++p) {
        bg = alpha * bg + (1.0 - alpha) * std::exp(cplx(0.0, 2.0 * kPi * fd * th * p));
        if (std::abs(bg - rho_closed_form(alpha, fd, th, p)) > 1e-12) return false;
      }
      if (fd == 0.0) {
        // Zero-Doppler family limit.
        const cplx r = rho_closed_form(alpha, 0.0, th, 30);
        if (std::abs(r - cplx(1.0 - std::pow(alpha, 30), 0.0)) > 1e-12) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 2. Monte Carlo residual noise variance matches the formula; asymptote.
bool noise_suppression() {
  const double alpha = 0.99;
  const int p = 150, dim = 65536;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ClutterState state(dim, 1, alpha, 1.7e-3);
  Eigen::MatrixXcd noise(dim, 1);
  for (int i = 0; i < p; ++i) {
    for (int d = 0; d < dim; ++d) noise(d, 0) = cplx{g(rng), g(rng)};
    state.update(noise);
  }
  const double measured = state.background().squaredNorm() / dim;
  const double expected = residual_noise_var(1.0, alpha, p);
  if (std::abs(measured - expected) > 0.05 * expected) return false;
  const double asym = residual_noise_var(1.0, alpha, 1000000);
  return std::abs(asym - 0.005) < 0.01 * 0.005 + 5e-5;
}

// ---------------------------------------------------------------------------
// 3. Convergence of the background power ratio: flattening time per alpha.
double flatten_time(double alpha, double total_s, std::uint64_t seed) {
  const double th = 1.7e-3;
  const int dim = 1024;
  const int n_total = static_cast<int>(total_s / th);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd clutter(dim, 1);
  for (int d = 0; d < dim; ++d) clutter(d, 0) = cplx{g(rng), g(rng)};

  ClutterState state(dim, 1, alpha, th);
  std::vector<double> ratio(static_cast<std::size_t>(n_total) + 1, 0.0);
  Eigen::MatrixXcd sample(dim, 1);
  for (int i = 1; i <= n_total; ++i) {
    for (int d = 0; d < dim; ++d) sample(d, 0) = clutter(d, 0) + cplx{g(rng), g(rng)};
    state.update(sample);
    ratio[static_cast<std::size_t>(i)] = clutter_power_ratio(state, clutter);
  }

  // Smallest horizon whose last-quartile slope is below 5% of the
  // first-quartile slope.
  for (int n = static_cast<int>(0.2 / th); n <= n_total; n += 10) {
    const int q = n / 4;
    if (q < 2) continue;
    const double early = (ratio[static_cast<std::size_t>(q)] - ratio[1]) / (q * th);
    const double late =
        (ratio[static_cast<std::size_t>(n)] - ratio[static_cast<std::size_t>(n - q)]) /
        (q * th);
    if (early > 0.0 && late < 0.05 * early) return n * th;
  }
  return -1.0;
}

bool clutter_convergence() {
  const double t_fast = flatten_time(0.99, 4.0, 99);
  const double t_slow = flatten_time(0.999, 6.0, 999);
  if (t_fast < 0.15 || t_fast > 1.0) return false;
  if (t_slow < 1.0 || t_slow > 3.5) return false;
  return t_fast < t_slow;
}

// ---------------------------------------------------------------------------
// Shared scenario configs.
const char* kDirectConfig = R"json({
  "mode": "uplink",
  "scheme": "direct",
  "seed": 11,
  "grid": {"n_subcarriers": 128},
  "array": {"k_sources": 4, "m_rx": 4, "m_tx": 1},
  "power": {"thermal_noise": false, "noise_power_w": 0.0},
  "scene": {
    "on_grid": true,
    "clusters": [
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 0},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 1},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 2},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 3}
    ]
  },
  "estimation": {"doppler_blocks": 8}
})json";

const char* kIndirectConfig = R"json({
  "mode": "uplink",
  "scheme": "indirect",
  "seed": 21,
  "grid": {"n_subcarriers": 128},
  "array": {"k_sources": 4, "m_rx": 4, "m_tx": 1},
  "eta_db": 15.0,
  "scene": {
    "on_grid": true,
    "clusters": [
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 0},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 1},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 2},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [20.0, 70.0], "doppler_span_hz": [-300.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 3}
    ]
  },
  "estimation": {"doppler_spacing_blocks": 20}
})json";

const char* kClutterConfig = R"json({
  "mode": "uplink",
  "scheme": "clutter",
  "seed": 31,
  "grid": {"n_subcarriers": 128},
  "array": {"k_sources": 1, "m_rx": 4, "m_tx": 1},
  "eta_db": 15.0,
  "scene": {
    "on_grid": true,
    "clutter_doppler_bound_hz": 0.05,
    "clusters": [
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [200.0, 280.0], "doppler_span_hz": [0.0, 0.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 0, "is_clutter": true},
      {"path_count": [2, 3], "direction_span_deg": [-60.0, 60.0],
       "distance_span_m": [50.0, 80.0], "doppler_span_hz": [100.0, 300.0],
       "direction_offset_deg": [0.0, 0.0], "distance_offset_m": [0.0, 0.0],
       "speed_offset_mps": [0.0, 0.0], "source": 0}
    ]
  },
  "clutter": {"alpha": 0.94, "sample_interval_s": 0.0017, "updates": 150},
  "estimation": {"doppler_spacing_blocks": 20}
})json";

struct SceneScore {
  int eligible = 0;       // truths within 3 dB of the strongest
  int eligible_ok = 0;    // matched with exact bin and tight AoA
  int total_truth = 0;
  int matched = 0;
  bool sources_exact = true;
  double max_sin_err = 0.0;
  double max_doppler_err = 0.0;
  std::vector<double> aoa_errs;
  std::vector<double> doppler_errs;
  int clutter_matched = 0;
};

SceneScore score_run(const RunResult& r, const OfdmGrid& grid,
                     bool dynamic_only_eligibility) {
  SceneScore s;
  s.total_truth = static_cast<int>(r.truth.size());
  s.matched = static_cast<int>(r.report.matches.size());

  double max_power = 0.0;
  for (const auto& t : r.truth) {
    if (dynamic_only_eligibility && t.is_clutter) continue;
    max_power = std::max(max_power, std::norm(t.amp));
  }
  const double floor = max_power * std::pow(10.0, -0.3);
  std::vector<bool> eligible(r.truth.size(), false);
  for (std::size_t i = 0; i < r.truth.size(); ++i) {
    if (dynamic_only_eligibility && r.truth[i].is_clutter) continue;
    if (std::norm(r.truth[i].amp) >= floor) {
      eligible[i] = true;
      ++s.eligible;
    }
  }

  const double half_bin = 0.5 * grid.delay_resolution_s();
  for (const auto& m : r.report.matches) {
    const auto& t = r.truth[static_cast<std::size_t>(m.truth_index)];
    const auto& e = r.estimates[static_cast<std::size_t>(m.est_index)];
    if (t.is_clutter) ++s.clutter_matched;
    const double sin_err = std::abs(m.aoa_phase_err_rad) / kPi;
    s.aoa_errs.push_back(std::abs(m.aoa_phase_err_rad));
    s.doppler_errs.push_back(std::abs(m.doppler_err_hz));
    s.max_sin_err = std::max(s.max_sin_err, sin_err);
    s.max_doppler_err = std::max(s.max_doppler_err, std::abs(m.doppler_err_hz));
    if (e.source != t.source) s.sources_exact = false;
    if (eligible[static_cast<std::size_t>(m.truth_index)] &&
        std::abs(m.delay_err_s) < half_bin * 0.5 &&
        std::abs(m.aoa_phase_err_rad) < 0.05) {
      ++s.eligible_ok;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// 4. Direct scheme, noiseless on-grid desk scale.
bool direct_noiseless() {
  const ExperimentConfig config = ExperimentConfig::from_json(kDirectConfig);
  for (int run = 0; run < 20; ++run) {
    const RunResult r = run_single(config, run);
    if (!r.error.empty()) return false;
    const SceneScore s = score_run(r, config.grid, false);
    if (s.matched != s.total_truth) return false;      // every path recovered
    if (!s.sources_exact) return false;                // classification exact
    if (s.max_sin_err >= 1e-4) return false;           // AoA sin error
    if (s.max_doppler_err >= 1.0) return false;        // Doppler error
    for (const auto& m : r.report.matches) {
      if (std::abs(m.delay_err_s) > 0.25 * config.grid.delay_resolution_s())
        return false;                                  // exact delay bin
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 5. Indirect scheme at the 15 dB reconstruction operating point.
bool indirect_operating_point() {
  ExperimentConfig config = ExperimentConfig::from_json(kIndirectConfig);
  int eligible = 0, eligible_ok = 0;
  std::vector<double> rmse_t20, rmse_t5;

  for (int run = 0; run < 20; ++run) {
    const RunResult r = run_single(config, run);
    if (!r.error.empty()) return false;
    const SceneScore s = score_run(r, config.grid, false);
    eligible += s.eligible;
    eligible_ok += s.eligible_ok;
    if (!s.doppler_errs.empty()) {
      double acc = 0.0;
      for (double d : s.doppler_errs) acc += d * d;
      rmse_t20.push_back(std::sqrt(acc / s.doppler_errs.size()));
    }
  }
  if (eligible == 0 || eligible_ok < 0.9 * eligible) return false;

  ExperimentConfig coarse = config;
  coarse.doppler_spacing_blocks = 5;
  for (int run = 0; run < 20; ++run) {
    const RunResult r = run_single(coarse, run);
    if (!r.error.empty()) return false;
    const SceneScore s = score_run(r, coarse.grid, false);
    if (!s.doppler_errs.empty()) {
      double acc = 0.0;
      for (double d : s.doppler_errs) acc += d * d;
      rmse_t5.push_back(std::sqrt(acc / s.doppler_errs.size()));
    }
  }
  return median(rmse_t20) < median(rmse_t5);
}

// ---------------------------------------------------------------------------
// 6. Off-grid robustness of the indirect scheme.
bool indirect_off_grid() {
  ExperimentConfig config = ExperimentConfig::from_json(kIndirectConfig);
  config.on_grid = false;
  int eligible = 0, matched_eligible = 0;
  std::vector<double> aoa_errs;
  for (int run = 0; run < 20; ++run) {
    const RunResult r = run_single(config, run);
    if (!r.error.empty()) return false;
    double max_power = 0.0;
    for (const auto& t : r.truth) max_power = std::max(max_power, std::norm(t.amp));
    const double floor = max_power * std::pow(10.0, -0.3);
    std::vector<bool> is_eligible(r.truth.size(), false);
    for (std::size_t i = 0; i < r.truth.size(); ++i) {
      if (std::norm(r.truth[i].amp) >= floor) {
        is_eligible[i] = true;
        ++eligible;
      }
    }
    for (const auto& m : r.report.matches) {
      aoa_errs.push_back(std::abs(m.aoa_phase_err_rad));
      if (is_eligible[static_cast<std::size_t>(m.truth_index)]) ++matched_eligible;
    }
  }
  if (eligible == 0 || matched_eligible < 0.6 * eligible) return false;
  return median(aoa_errs) < 0.1;
}

// ---------------------------------------------------------------------------
// 7. Two close angles at one delay: CS resolves, 2D DFT baseline merges.
bool resolution_ordering() {
  OfdmGrid grid;
  grid.n_subcarriers = 128;
  const Allocation alloc = Allocation::full(128, 1);
  const int bin = 40;
  const double sins[2] = {0.1, 0.4};  // below the M=4 Rayleigh width of 0.5

  std::vector<ReconChannel> recons;
  for (int u = 0; u < 2; ++u) {
    PathParams p;
    p.delay_s = bin * grid.delay_resolution_s();
    p.aoa_rad = std::asin(sins[u]);
    p.amp = {1.0, 0.0};
    p.source = u;
    recons.push_back(reconstruct_channel({p}, 0.0, grid, alloc, UlaConfig{4},
                                         UlaConfig{1}, 15.0,
                                         1000 + static_cast<std::uint64_t>(u)));
  }

  // Per-user sparse recovery keeps the two angles apart.
  int resolved = 0;
  for (int u = 0; u < 2; ++u) {
    const MmvProblem prob = build_stripped_mmv(recons[static_cast<std::size_t>(u)],
                                               grid, 128);
    const GEstimate g = solve_stripped(prob, IndirectOptions{});
    const auto ests = estimate_paths(g, grid, 4, 1);
    for (const auto& e : ests) {
      if (e.delay_bin == bin &&
          std::abs(std::sin(e.aoa_rad) - sins[u]) < 0.05) {
        ++resolved;
        break;
      }
    }
  }
  if (resolved != 2) return false;

  // The power-summed 2D DFT map merges the pair: across the angular span
  // covering both true angles there is a single peak, sitting between them
  // instead of on either one. (Array sidelobes far outside the span can
  // also clear the 25 dB floor; they are not resolution.)
  std::vector<RangeAngleMap> maps;
  for (const auto& rc : recons) maps.push_back(dft2d_map_recon(rc, grid, 64));
  const RangeAngleMap cleared = clear_map(sum_maps(maps), 25.0);
  int peaks_in_span = 0;
  double merged_sin = -2.0;
  for (const auto& pk : find_peaks(cleared)) {
    if (pk.delay_bin == bin && pk.sin_angle > -0.05 && pk.sin_angle < 0.55) {
      ++peaks_in_span;
      merged_sin = pk.sin_angle;
    }
  }
  return peaks_in_span == 1 && merged_sin > sins[0] + 0.05 &&
         merged_sin < sins[1] - 0.05;
}

// ---------------------------------------------------------------------------
// 8. End-to-end clutter removal.
bool clutter_removal() {
  ExperimentConfig slow = ExperimentConfig::from_json(kClutterConfig);
  int eligible = 0, eligible_ok = 0, clutter_survivors = 0;
  for (int run = 0; run < 10; ++run) {
    const RunResult r = run_clutter_single(slow, run);
    if (!r.error.empty()) return false;
    const SceneScore s = score_run(r, slow.grid, true);
    eligible += s.eligible;
    eligible_ok += s.eligible_ok;
    clutter_survivors += s.clutter_matched;
  }
  if (clutter_survivors != 0) return false;
  if (eligible == 0 || eligible_ok < 0.9 * eligible) return false;

  ExperimentConfig fast = slow;
  fast.clutter.updates = 25;
  int survivors_short = 0;
  for (int run = 0; run < 10; ++run) {
    const RunResult r = run_clutter_single(fast, run);
    if (!r.error.empty()) return false;
    survivors_short += score_run(r, fast.grid, true).clutter_matched;
  }
  return survivors_short >= 1;
}

// ---------------------------------------------------------------------------
// 9. Greedy solver equals exhaustive least-squares support search.
bool solver_oracle() {
  OfdmGrid grid;
  grid.n_subcarriers = 64;
  std::mt19937_64 rng(777);
  std::normal_distribution<double> g(0.0, 1.0);

  int agree = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Random 24-subcarrier allocation, 14 dictionary columns.
    std::vector<int> all(64);
    for (int i = 0; i < 64; ++i) all[static_cast<std::size_t>(i)] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> rows(all.begin(), all.begin() + 24);
    std::sort(rows.begin(), rows.end());
    const Allocation alloc = Allocation::shared(rows, 1);
    const int n_p = 14;
    const Dictionary dict = build_partial_dft(alloc, grid, n_p);

    const int sparsity = 1 + static_cast<int>(rng() % 2);
    std::vector<int> support;
    while (static_cast<int>(support.size()) < sparsity) {
      const int s = static_cast<int>(rng() % n_p);
      if (std::find(support.begin(), support.end(), s) == support.end())
        support.push_back(s);
    }
    std::sort(support.begin(), support.end());
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(24);
    for (int s : support) {
      const double mag = 0.5 + 1.0 * std::abs(g(rng));
      y += mag * std::exp(cplx(0.0, g(rng))) * dict.matrix.col(s);
    }

    MmvProblem prob;
    prob.observations = y;
    prob.dictionary = dict;
    OmpStop stop;
    stop.max_sparsity = 2;
    stop.residual_frob = 1e-9 * y.norm();
    const SparseSolution sol = mmv_omp(prob, stop);

    // Exhaustive search over supports of size <= 2.
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_support;
    for (int a = 0; a < n_p; ++a) {
      for (int b = a; b < n_p; ++b) {
        Eigen::MatrixXcd phi(24, b == a ? 1 : 2);
        phi.col(0) = dict.matrix.col(a);
        if (b != a) phi.col(1) = dict.matrix.col(b);
        const Eigen::VectorXcd c = phi.colPivHouseholderQr().solve(y);
        const double res = (y - phi * c).norm();
        std::vector<int> cand{a};
        if (b != a) cand.push_back(b);
        // Drop numerically-zero coefficients so a 1-sparse truth inside a
        // 2-column candidate reduces to its true support.
        std::vector<int> pruned;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          if (std::abs(c(i)) > 1e-8 * y.norm())
            pruned.push_back(cand[static_cast<std::size_t>(i)]);
        }
        if (res < best - 1e-10 * y.norm()) {
          best = res;
          best_support = pruned;
        }
      }
    }
    std::sort(best_support.begin(), best_support.end());

    std::vector<int> got;
    for (std::size_t i = 0; i < sol.support.size(); ++i) {
      if (sol.coeffs[i].norm() > 1e-8 * y.norm()) got.push_back(sol.support[i]);
    }
    std::sort(got.begin(), got.end());
    if (got == best_support) ++agree;
  }
  return agree == 100;
}

// ---------------------------------------------------------------------------
// 10. CLI determinism: identical config+seed -> byte-identical outputs.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool cli_determinism(const std::string& cli) {
  const fs::path base = fs::temp_directory_path() / "pmn_acceptance_cli";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "config.json";
  {
    ExperimentConfig c = ExperimentConfig::from_json(kIndirectConfig);
    c.runs = 2;
    std::ofstream out(cfg);
    out << c.to_json();
  }
  for (const char* dir : {"a", "b"}) {
    std::ostringstream cmd;
    cmd << '"' << cli << "\" indirect --config \"" << cfg.string()
        << "\" --seed 42 --runs 2 --out \"" << (base / dir).string()
        << "\" > /dev/null";
    if (std::system(cmd.str().c_str()) != 0) return false;
  }
  const bool same =
      slurp(base / "a" / "results.csv") == slurp(base / "b" / "results.csv") &&
      slurp(base / "a" / "summary.csv") == slurp(base / "b" / "summary.csv") &&
      !slurp(base / "a" / "results.csv").empty();
  fs::remove_all(base);
  return same;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: pmn_acceptance <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];

  struct Criterion {
    const char* name;
    std::function<bool()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"closed-form background response equals the recursion", closed_form_identity},
      {"residual noise variance matches the formula and asymptote", noise_suppression},
      {"background power ratio flattens on the expected time scales", clutter_convergence},
      {"direct scheme: exact noiseless on-grid recovery", direct_noiseless},
      {"indirect scheme: strong paths recovered at 15 dB reconstruction", indirect_operating_point},
      {"indirect scheme: off-grid delays degrade gracefully", indirect_off_grid},
      {"close angles: sparse recovery resolves, 2D DFT merges", resolution_ordering},
      {"clutter removal: long memory suppresses, short memory leaks", clutter_removal},
      {"greedy solver matches exhaustive least-squares search", solver_oracle},
      {"CLI outputs are byte-identical for a fixed config and seed",
       [&cli] { return cli_determinism(cli); }},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criteria[i].fn();
    } catch (const std::exception& e) {
      std::printf("[%2zu] FAIL %s (exception: %s)\n", i + 1, criteria[i].name,
                  e.what());
      all_ok = false;
      continue;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%2zu] %s %s (%.1fs)\n", i + 1, ok ? "PASS" : "FAIL",
                criteria[i].name, secs);
    if (!ok) all_ok = false;
  }
  return all_ok ? 0 : 1;
}
