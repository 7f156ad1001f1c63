#ifndef PMN_HARNESS_HPP
#define PMN_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pmn/baseline.hpp"
#include "pmn/clutter.hpp"
#include "pmn/direct.hpp"
#include "pmn/indirect.hpp"

namespace pmn {

enum class Scheme { kDirect, kIndirect, kBaseline, kClutter };

struct ClutterConfig {
  double alpha = 0.99;
  double sample_interval_s = 0.002;
  int updates = 150;
};

struct ExperimentConfig {
  LinkMode mode = LinkMode::kUplink;
  Scheme scheme = Scheme::kIndirect;
  std::uint64_t seed = 1;
  int runs = 1;
  OfdmGrid grid;
  std::string allocation_type = "full";  // full | nr_type_b | random
  int allocation_count = 0;              // for random sets
  int n_sources = 4;
  int m_rx = 4;
  int m_tx = 1;
  double carrier_hz = 2.35e9;
  double tx_power_dbm = 25.0;
  double pathloss_exponent = 2.0;
  bool thermal_noise = true;
  double noise_power_w = 0.0;  // used when thermal_noise is false
  double eta_db = 15.0;        // channel reconstruction SIR
  std::vector<ClusterSpec> clusters;
  bool on_grid = true;
  double static_period_s = 0.0017;
  double clutter_doppler_bound_hz = 1.0;
  std::string solver = "omp";  // omp | sbl
  int n_p = 0;
  int max_sparsity = 0;
  double residual_scale = 1.0;
  int doppler_blocks = 8;          // direct: consecutive blocks for Doppler
  int doppler_spacing_blocks = 20; // indirect: pair spacing T
  double power_floor_db = 25.0;
  double threshold_margin_db = 6.0;
  ClutterConfig clutter;
  int angle_fft_len = 64;
  std::string out_dir = "results";

  /// Parses a JSON config document; unknown keys are rejected.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string to_json() const;

  Allocation make_allocation() const;
  SceneOptions scene_options() const;
};

struct MatchGates {
  double delay_s = 0.0;      // 0 -> half a delay grid bin
  double sin_angle = 0.05;
};

struct MatchedPair {
  int truth_index = -1;
  int est_index = -1;
  double delay_err_s = 0.0;
  double aoa_phase_err_rad = 0.0;  // error in pi*sin(aoa)
  double aod_phase_err_rad = 0.0;
  double doppler_err_hz = 0.0;
  double power_err_db = 0.0;
};

struct MatchReport {
  std::vector<MatchedPair> matches;
  std::vector<int> missed_truth;
  std::vector<int> false_alarms;
};

/// Greedy one-to-one nearest-neighbor matching in normalized
/// (delay, sin-AoA) space.
MatchReport match_paths(const std::vector<PathParams>& truth,
                        const std::vector<PathEstimate>& estimates,
                        const MatchGates& gates);

struct RunResult {
  int run_id = 0;
  Scene scene;
  std::vector<PathParams> truth;  // flattened, matching `report` indexes
  std::vector<PathEstimate> estimates;
  MatchReport report;
  std::string error;  // non-empty when the run failed
};

/// Single seeded run of the configured scheme.
RunResult run_single(const ExperimentConfig& config, int run_id);

std::vector<PathEstimate> run_direct_pipeline(const Scene& scene,
                                              const ExperimentConfig& config,
                                              std::uint64_t seed);
std::vector<PathEstimate> run_indirect_pipeline(const Scene& scene,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed);
std::vector<PathEstimate> run_baseline_pipeline(const Scene& scene,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed);

/// Clutter scenario: recursive background estimation over the configured
/// update count, then the indirect pipeline on the subtracted channels.
/// Dynamic paths are resampled every channel-static period; clutter paths
/// stay fixed. Matching runs against the final period's dynamic truth, with
/// clutter paths kept in the truth list (flagged) to expose survivors.
RunResult run_clutter_single(const ExperimentConfig& config, int run_id);

struct Summary {
  int runs = 0;
  int truth_count = 0;
  int matched = 0;
  int false_alarms = 0;
  double detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  double delay_rmse_s = 0.0;
  double aoa_phase_rmse_rad = 0.0;
  double doppler_rmse_hz = 0.0;
  double power_rmse_db = 0.0;
};

Summary summarize(const std::vector<RunResult>& results);

/// Executes all runs, writes results.csv (fixed schema) and summary.csv
/// under config.out_dir. Per-run failures are recorded and remaining runs
/// continue.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// One run_experiment per value of a (dotted) config field; merged summary
/// table keyed by value is written to out_dir/sweep.csv.
void sweep(const ExperimentConfig& config, const std::string& parameter,
           const std::vector<double>& values);

void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path);
void write_summary_csv(const Summary& summary, const std::string& path);

}  // namespace pmn

#endif  // PMN_HARNESS_HPP
