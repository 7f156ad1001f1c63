#include "pmn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pmn {

namespace {

constexpr double kPi = 3.14159265358979323846;

using nlohmann::json;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " +
                                  where);
    }
  }
}

void read_interval(const json& j, const std::string& key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  lo = v.at(0).get<double>();
  hi = v.at(1).get<double>();
}

ClusterSpec cluster_from_json(const json& j) {
  check_keys(j,
             {"path_count", "direction_span_deg", "distance_span_m",
              "doppler_span_hz", "direction_offset_deg", "distance_offset_m",
              "speed_offset_mps", "source", "is_clutter"},
             "scene.clusters[]");
  ClusterSpec c;
  if (j.contains("path_count")) {
    c.path_count_min = j.at("path_count").at(0).get<int>();
    c.path_count_max = j.at("path_count").at(1).get<int>();
  }
  read_interval(j, "direction_span_deg", c.direction_span_deg_min,
                c.direction_span_deg_max);
  read_interval(j, "distance_span_m", c.distance_span_m_min, c.distance_span_m_max);
  read_interval(j, "doppler_span_hz", c.doppler_span_hz_min, c.doppler_span_hz_max);
  read_interval(j, "direction_offset_deg", c.direction_offset_deg_min,
                c.direction_offset_deg_max);
  read_interval(j, "distance_offset_m", c.distance_offset_m_min,
                c.distance_offset_m_max);
  read_interval(j, "speed_offset_mps", c.speed_offset_mps_min,
                c.speed_offset_mps_max);
  c.source = j.value("source", 0);
  c.is_clutter = j.value("is_clutter", false);
  return c;
}

json cluster_to_json(const ClusterSpec& c) {
  json j;
  j["path_count"] = {c.path_count_min, c.path_count_max};
  j["direction_span_deg"] = {c.direction_span_deg_min, c.direction_span_deg_max};
  j["distance_span_m"] = {c.distance_span_m_min, c.distance_span_m_max};
  j["doppler_span_hz"] = {c.doppler_span_hz_min, c.doppler_span_hz_max};
  j["direction_offset_deg"] = {c.direction_offset_deg_min, c.direction_offset_deg_max};
  j["distance_offset_m"] = {c.distance_offset_m_min, c.distance_offset_m_max};
  j["speed_offset_mps"] = {c.speed_offset_mps_min, c.speed_offset_mps_max};
  j["source"] = c.source;
  j["is_clutter"] = c.is_clutter;
  return j;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double sin_aoa(const PathEstimate& e) { return std::sin(e.aoa_rad); }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  check_keys(j,
             {"mode", "scheme", "seed", "runs", "out", "grid", "allocation",
              "array", "power", "eta_db", "scene", "solver", "estimation",
              "clutter"},
             "top level");
  ExperimentConfig c;
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "uplink") {
      c.mode = LinkMode::kUplink;
    } else if (m == "downlink") {
      c.mode = LinkMode::kDownlink;
    } else {
      throw std::invalid_argument("config: bad mode '" + m + "'");
    }
  }
  if (j.contains("scheme")) {
    const auto s = j.at("scheme").get<std::string>();
    if (s == "direct") c.scheme = Scheme::kDirect;
    else if (s == "indirect") c.scheme = Scheme::kIndirect;
    else if (s == "baseline") c.scheme = Scheme::kBaseline;
    else if (s == "clutter") c.scheme = Scheme::kClutter;
    else throw std::invalid_argument("config: bad scheme '" + s + "'");
  }
  c.seed = j.value("seed", c.seed);
  c.runs = j.value("runs", c.runs);
  c.out_dir = j.value("out", c.out_dir);

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"n_subcarriers", "bandwidth_hz", "cp_fraction", "grid_factor"},
               "grid");
    c.grid.n_subcarriers = g.value("n_subcarriers", c.grid.n_subcarriers);
    c.grid.bandwidth_hz = g.value("bandwidth_hz", c.grid.bandwidth_hz);
    c.grid.cp_fraction = g.value("cp_fraction", c.grid.cp_fraction);
    c.grid.grid_factor = g.value("grid_factor", c.grid.grid_factor);
  }
  if (j.contains("allocation")) {
    const auto& a = j.at("allocation");
    check_keys(a, {"type", "count"}, "allocation");
    c.allocation_type = a.value("type", c.allocation_type);
    c.allocation_count = a.value("count", c.allocation_count);
  }
  if (j.contains("array")) {
    const auto& a = j.at("array");
    check_keys(a, {"k_sources", "m_rx", "m_tx"}, "array");
    c.n_sources = a.value("k_sources", c.n_sources);
    c.m_rx = a.value("m_rx", c.m_rx);
    c.m_tx = a.value("m_tx", c.m_tx);
  }
  if (j.contains("power")) {
    const auto& p = j.at("power");
    check_keys(p,
               {"carrier_hz", "tx_power_dbm", "pathloss_exponent",
                "thermal_noise", "noise_power_w"},
               "power");
    c.carrier_hz = p.value("carrier_hz", c.carrier_hz);
    c.tx_power_dbm = p.value("tx_power_dbm", c.tx_power_dbm);
    c.pathloss_exponent = p.value("pathloss_exponent", c.pathloss_exponent);
    c.thermal_noise = p.value("thermal_noise", c.thermal_noise);
    c.noise_power_w = p.value("noise_power_w", c.noise_power_w);
  }
  c.eta_db = j.value("eta_db", c.eta_db);
  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    check_keys(s,
               {"on_grid", "static_period_s", "clutter_doppler_bound_hz",
                "clusters"},
               "scene");
    c.on_grid = s.value("on_grid", c.on_grid);
    c.static_period_s = s.value("static_period_s", c.static_period_s);
    c.clutter_doppler_bound_hz =
        s.value("clutter_doppler_bound_hz", c.clutter_doppler_bound_hz);
    if (s.contains("clusters")) {
      c.clusters.clear();
      for (const auto& jc : s.at("clusters")) c.clusters.push_back(cluster_from_json(jc));
    }
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"type", "n_p", "max_sparsity", "residual_scale"}, "solver");
    c.solver = s.value("type", c.solver);
    if (c.solver != "omp" && c.solver != "sbl") {
      throw std::invalid_argument("config: bad solver '" + c.solver + "'");
    }
    c.n_p = s.value("n_p", c.n_p);
    c.max_sparsity = s.value("max_sparsity", c.max_sparsity);
    c.residual_scale = s.value("residual_scale", c.residual_scale);
  }
  if (j.contains("estimation")) {
    const auto& e = j.at("estimation");
    check_keys(e,
               {"doppler_blocks", "doppler_spacing_blocks", "power_floor_db",
                "threshold_margin_db", "angle_fft_len"},
               "estimation");
    c.doppler_blocks = e.value("doppler_blocks", c.doppler_blocks);
    c.doppler_spacing_blocks =
        e.value("doppler_spacing_blocks", c.doppler_spacing_blocks);
    c.power_floor_db = e.value("power_floor_db", c.power_floor_db);
    c.threshold_margin_db = e.value("threshold_margin_db", c.threshold_margin_db);
    c.angle_fft_len = e.value("angle_fft_len", c.angle_fft_len);
  }
  if (j.contains("clutter")) {
    const auto& cl = j.at("clutter");
    check_keys(cl, {"alpha", "sample_interval_s", "updates"}, "clutter");
    c.clutter.alpha = cl.value("alpha", c.clutter.alpha);
    c.clutter.sample_interval_s =
        cl.value("sample_interval_s", c.clutter.sample_interval_s);
    c.clutter.updates = cl.value("updates", c.clutter.updates);
  }

  // Defaults: no clusters configured means one default cluster per source.
  if (c.clusters.empty()) {
    for (int k = 0; k < c.n_sources; ++k) {
      ClusterSpec spec;
      spec.source = k;
      c.clusters.push_back(spec);
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["mode"] = mode == LinkMode::kUplink ? "uplink" : "downlink";
  switch (scheme) {
    case Scheme::kDirect: j["scheme"] = "direct"; break;
    case Scheme::kIndirect: j["scheme"] = "indirect"; break;
    case Scheme::kBaseline: j["scheme"] = "baseline"; break;
    case Scheme::kClutter: j["scheme"] = "clutter"; break;
  }
  j["seed"] = seed;
  j["runs"] = runs;
  j["out"] = out_dir;
  j["grid"] = {{"n_subcarriers", grid.n_subcarriers},
               {"bandwidth_hz", grid.bandwidth_hz},
               {"cp_fraction", grid.cp_fraction},
               {"grid_factor", grid.grid_factor}};
  j["allocation"] = {{"type", allocation_type}, {"count", allocation_count}};
  j["array"] = {{"k_sources", n_sources}, {"m_rx", m_rx}, {"m_tx", m_tx}};
  j["power"] = {{"carrier_hz", carrier_hz},
                {"tx_power_dbm", tx_power_dbm},
                {"pathloss_exponent", pathloss_exponent},
                {"thermal_noise", thermal_noise},
                {"noise_power_w", noise_power_w}};
  if (std::isfinite(eta_db)) j["eta_db"] = eta_db;
  json clusters = json::array();
  for (const auto& c : this->clusters) clusters.push_back(cluster_to_json(c));
  j["scene"] = {{"on_grid", on_grid},
                {"static_period_s", static_period_s},
                {"clutter_doppler_bound_hz", clutter_doppler_bound_hz},
                {"clusters", clusters}};
  j["solver"] = {{"type", solver},
                 {"n_p", n_p},
                 {"max_sparsity", max_sparsity},
                 {"residual_scale", residual_scale}};
  j["estimation"] = {{"doppler_blocks", doppler_blocks},
                     {"doppler_spacing_blocks", doppler_spacing_blocks},
                     {"power_floor_db", power_floor_db},
                     {"threshold_margin_db", threshold_margin_db},
                     {"angle_fft_len", angle_fft_len}};
  j["clutter"] = {{"alpha", clutter.alpha},
                  {"sample_interval_s", clutter.sample_interval_s},
                  {"updates", clutter.updates}};
  return j.dump(2);
}

Allocation ExperimentConfig::make_allocation() const {
  if (allocation_type == "full") {
    return Allocation::full(grid.n_subcarriers, n_sources);
  }
  if (allocation_type == "nr_type_b") {
    return Allocation::shared(nr_type_b_indexes(grid.n_subcarriers), n_sources);
  }
  if (allocation_type == "random") {
    // Deterministic shared random subset, derived from the base seed.
    std::vector<int> all(static_cast<std::size_t>(grid.n_subcarriers));
    for (int n = 0; n < grid.n_subcarriers; ++n) all[static_cast<std::size_t>(n)] = n;
    std::mt19937_64 rng(mix_seed(seed, 0xa110c));
    for (std::size_t i = all.size() - 1; i > 0; --i) {
      std::uniform_int_distribution<std::size_t> d(0, i);
      std::swap(all[i], all[d(rng)]);
    }
    const auto count = static_cast<std::size_t>(
        allocation_count > 0 ? allocation_count : grid.n_subcarriers / 4);
    std::vector<int> subset(all.begin(), all.begin() + static_cast<long>(count));
    std::sort(subset.begin(), subset.end());
    return Allocation::shared(std::move(subset), n_sources);
  }
  throw std::invalid_argument("config: bad allocation type '" + allocation_type + "'");
}

SceneOptions ExperimentConfig::scene_options() const {
  SceneOptions opts;
  opts.mode = mode;
  opts.n_sources = n_sources;
  opts.carrier_hz = carrier_hz;
  opts.static_period_s = static_period_s;
  opts.on_grid = on_grid;
  opts.delay_resolution_s = grid.delay_resolution_s();
  opts.tx_power_dbm = tx_power_dbm;
  opts.pathloss_exponent = pathloss_exponent;
  opts.clutter_doppler_bound_hz = clutter_doppler_bound_hz;
  return opts;
}

MatchReport match_paths(const std::vector<PathParams>& truth,
                        const std::vector<PathEstimate>& estimates,
                        const MatchGates& gates) {
  MatchReport report;
  const double delay_gate = gates.delay_s;
  struct Candidate {
    double dist;
    int ti;
    int ei;
  };
  std::vector<Candidate> candidates;
  for (std::size_t ti = 0; ti < truth.size(); ++ti) {
    for (std::size_t ei = 0; ei < estimates.size(); ++ei) {
      const double dd = std::abs(truth[ti].delay_s - estimates[ei].delay_s);
      const double ds =
          std::abs(std::sin(truth[ti].aoa_rad) - sin_aoa(estimates[ei]));
      if (dd > delay_gate || ds > gates.sin_angle) continue;
      candidates.push_back({std::hypot(dd / delay_gate, ds / gates.sin_angle),
                            static_cast<int>(ti), static_cast<int>(ei)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.dist != b.dist) return a.dist < b.dist;
              if (a.ti != b.ti) return a.ti < b.ti;
              return a.ei < b.ei;
            });
  std::vector<bool> t_used(truth.size(), false);
  std::vector<bool> e_used(estimates.size(), false);
  for (const auto& c : candidates) {
    if (t_used[static_cast<std::size_t>(c.ti)] ||
        e_used[static_cast<std::size_t>(c.ei)]) {
      continue;
    }
    t_used[static_cast<std::size_t>(c.ti)] = true;
    e_used[static_cast<std::size_t>(c.ei)] = true;
    const auto& t = truth[static_cast<std::size_t>(c.ti)];
    const auto& e = estimates[static_cast<std::size_t>(c.ei)];
    MatchedPair pair;
    pair.truth_index = c.ti;
    pair.est_index = c.ei;
    pair.delay_err_s = e.delay_s - t.delay_s;
    pair.aoa_phase_err_rad = kPi * (sin_aoa(e) - std::sin(t.aoa_rad));
    pair.aod_phase_err_rad =
        e.aod_rad ? kPi * (std::sin(*e.aod_rad) - std::sin(t.aod_rad)) : 0.0;
    pair.doppler_err_hz = e.doppler_hz - t.doppler_hz;
    const double t_power = std::norm(t.amp);
    pair.power_err_db = (e.power > 0.0 && t_power > 0.0)
                            ? 10.0 * std::log10(e.power / t_power)
                            : 0.0;
    report.matches.push_back(pair);
  }
  for (std::size_t ti = 0; ti < truth.size(); ++ti) {
    if (!t_used[ti]) report.missed_truth.push_back(static_cast<int>(ti));
  }
  for (std::size_t ei = 0; ei < estimates.size(); ++ei) {
    if (!e_used[ei]) report.false_alarms.push_back(static_cast<int>(ei));
  }
  return report;
}

std::vector<PathEstimate> run_direct_pipeline(const Scene& scene,
                                              const ExperimentConfig& config,
                                              std::uint64_t seed) {
  const OfdmGrid& grid = config.grid;
  const Allocation alloc = config.make_allocation();
  const UlaConfig rx_cfg{config.m_rx};
  const int n_blocks = std::max(2, config.doppler_blocks);
  const double noise_power =
      config.thermal_noise ? thermal_noise_power(grid) : config.noise_power_w;

  SymbolFrame frame = gen_symbols(alloc, grid, config.n_sources, config.m_tx,
                                  Constellation::kQpsk, mix_seed(seed, 1), n_blocks);

  DirectOptions opts;
  opts.n_p = config.n_p > 0 ? config.n_p : grid.delay_grid_size();
  opts.max_sparsity = config.max_sparsity;
  opts.residual_scale = config.residual_scale;

  BlockEstimateSeries series;
  for (int t = 0; t < n_blocks; ++t) {
    RxBlock rx = receive(scene, frame, t, grid, alloc, rx_cfg, noise_power,
                         mix_seed(seed, 100 + static_cast<std::uint64_t>(t)));
    for (const auto& [bin, block] : recover_blocks(rx, frame, grid, opts)) {
      for (const auto& [k, sub] : classify_source(block, config.n_sources,
                                                  config.m_tx, opts.power_floor)) {
        series.entries[{bin, k}][t] = sub;
      }
    }
  }

  const auto n_u = static_cast<double>(alloc.merged().size());
  std::vector<PathEstimate> estimates;
  for (const auto& [key, by_t] : series.entries) {
    const auto [bin, k] = key;
    const auto& b0 = by_t.begin()->second;

    double doppler = 0.0;
    try {
      doppler = extract_doppler(series, bin, k, grid.block_period_s());
    } catch (const std::invalid_argument&) {
      // single-block sighting: Doppler left at zero
    }

    const bool multi = config.m_tx >= 2 &&
                       rank1_residual_fraction(b0) > opts.rank1_residual_frac;
    if (multi) {
      for (const auto& angle : same_delay_spectrum(b0, opts.spectrum_oversample)) {
        PathEstimate est;
        est.delay_bin = bin;
        est.delay_s = bin * grid.delay_resolution_s();
        est.aoa_rad = angle.aoa_rad;
        est.aod_rad = angle.aod_rad;
        est.doppler_hz = doppler;
        est.power = angle.power;
        est.source = k;
        estimates.push_back(est);
      }
    } else {
      const AngleEstimate angle = extract_angles(b0);
      PathEstimate est;
      est.delay_bin = bin;
      est.delay_s = bin * grid.delay_resolution_s();
      est.aoa_rad = angle.aoa_rad;
      est.aod_rad = angle.aod_rad;
      est.doppler_hz = doppler;
      est.power = angle.power;
      est.source = k;
      estimates.push_back(est);
    }
  }

  const std::vector<double> thresholds = delay_power_thresholds(
      grid, opts.n_p, noise_power / n_u, config.threshold_margin_db);
  return threshold_paths(estimates, thresholds);
}

namespace {

std::vector<PathEstimate> indirect_estimates_from_recon(
    const ReconChannel& recon_t, const ReconChannel& recon_later,
    const ExperimentConfig& config, int user) {
  const OfdmGrid& grid = config.grid;
  IndirectOptions opts;
  opts.n_p = config.n_p > 0 ? config.n_p : grid.delay_grid_size();
  opts.max_sparsity = config.max_sparsity > 0 ? config.max_sparsity : 0;
  opts.residual_scale = config.residual_scale;
  opts.power_floor_db = config.power_floor_db;

  MmvProblem prob_t = build_stripped_mmv(recon_t, grid, opts.n_p);
  MmvProblem prob_later = build_stripped_mmv(recon_later, grid, opts.n_p);
  GEstimate g_t = solve_stripped(prob_t, opts);
  GEstimate g_later = solve_stripped(prob_later, opts);

  std::vector<PathEstimate> ests = estimate_paths(g_t, grid, config.m_rx,
                                                  config.m_tx, opts.power_floor_db);
  const auto dopplers = estimate_doppler_pair(g_t, g_later,
                                              config.doppler_spacing_blocks, grid);
  for (auto& est : ests) {
    est.source = user;
    for (const auto& [bin, f] : dopplers) {
      if (bin == est.delay_bin) {
        est.doppler_hz = f;
        break;
      }
    }
  }
  return ests;
}

}  // namespace

std::vector<PathEstimate> run_indirect_pipeline(const Scene& scene,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed) {
  const OfdmGrid& grid = config.grid;
  const Allocation alloc = config.make_allocation();
  const UlaConfig rx_cfg{config.m_rx};
  const UlaConfig tx_cfg{config.m_tx};
  const int spacing = config.doppler_spacing_blocks;

  std::vector<PathEstimate> all;
  for (std::size_t k = 0; k < scene.links.size(); ++k) {
    const auto& link = scene.links[k];
    ReconChannel recon_t =
        reconstruct_channel(link, 0.0, grid, alloc, rx_cfg, tx_cfg, config.eta_db,
                            mix_seed(seed, 200 + k));
    ReconChannel recon_later =
        reconstruct_channel(link, spacing, grid, alloc, rx_cfg, tx_cfg,
                            config.eta_db, mix_seed(seed, 300 + k));
    auto ests = indirect_estimates_from_recon(recon_t, recon_later, config,
                                              static_cast<int>(k));
    all.insert(all.end(), ests.begin(), ests.end());
  }
  return all;
}

std::vector<PathEstimate> run_baseline_pipeline(const Scene& scene,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed) {
  const OfdmGrid& grid = config.grid;
  const Allocation alloc = config.make_allocation();
  const UlaConfig rx_cfg{config.m_rx};
  const UlaConfig tx_cfg{config.m_tx};

  std::vector<RangeAngleMap> maps;
  for (std::size_t k = 0; k < scene.links.size(); ++k) {
    ReconChannel recon =
        reconstruct_channel(scene.links[k], 0.0, grid, alloc, rx_cfg, tx_cfg,
                            config.eta_db, mix_seed(seed, 400 + k));
    maps.push_back(dft2d_map_recon(recon, grid, config.angle_fft_len));
  }
  const RangeAngleMap cleared = clear_map(sum_maps(maps), config.power_floor_db);

  std::vector<PathEstimate> out;
  for (const auto& peak : find_peaks(cleared)) {
    PathEstimate est;
    est.delay_bin = peak.delay_bin;
    est.delay_s = peak.delay_s;
    est.aoa_rad = std::asin(std::clamp(peak.sin_angle, -1.0, 1.0));
    est.power = peak.power;
    out.push_back(est);
  }
  return out;
}

namespace {

Eigen::MatrixXcd stack_recon(const ReconChannel& recon) {
  const auto m_rx = recon.per_subcarrier.front().rows();
  const auto m_tx = recon.per_subcarrier.front().cols();
  const auto n_u = static_cast<Eigen::Index>(recon.per_subcarrier.size());
  Eigen::MatrixXcd out(n_u * m_rx, m_tx);
  for (Eigen::Index i = 0; i < n_u; ++i) {
    out.middleRows(i * m_rx, m_rx) = recon.per_subcarrier[static_cast<std::size_t>(i)];
  }
  return out;
}

ReconChannel unstack_recon(const Eigen::MatrixXcd& stacked,
                           const ReconChannel& like) {
  ReconChannel out = like;
  const auto m_rx = like.per_subcarrier.front().rows();
  for (std::size_t i = 0; i < out.per_subcarrier.size(); ++i) {
    out.per_subcarrier[i] =
        stacked.middleRows(static_cast<Eigen::Index>(i) * m_rx, m_rx);
  }
  return out;
}

}  // namespace

RunResult run_clutter_single(const ExperimentConfig& config, int run_id) {
  RunResult result;
  result.run_id = run_id;
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(run_id);
  const OfdmGrid& grid = config.grid;
  const Allocation alloc = config.make_allocation();
  const UlaConfig rx_cfg{config.m_rx};
  const UlaConfig tx_cfg{config.m_tx};
  const SceneOptions opts = config.scene_options();

  std::vector<ClusterSpec> clutter_specs;
  std::vector<ClusterSpec> dynamic_specs;
  for (const auto& c : config.clusters) {
    (c.is_clutter ? clutter_specs : dynamic_specs).push_back(c);
  }
  if (clutter_specs.empty() || dynamic_specs.empty()) {
    throw std::invalid_argument(
        "clutter scheme needs both clutter and dynamic clusters");
  }

  const Scene clutter_scene = sample_scene(clutter_specs, mix_seed(seed, 10), opts);
  const double t_h = config.clutter.sample_interval_s;
  const double period = config.static_period_s;
  const double ts = grid.block_period_s();
  const int p = config.clutter.updates;

  auto dynamic_scene_for_period = [&](long j) {
    return sample_scene(dynamic_specs, mix_seed(seed, 1000 + static_cast<std::uint64_t>(j)),
                        opts);
  };

  // Channel estimates sampled every T_h; dynamic paths are redrawn each
  // channel-static period while clutter stays put.
  std::vector<ClutterState> states;
  long cur_period = -1;
  Scene dyn_scene;
  for (int i = 1; i <= p; ++i) {
    const double tau = i * t_h;
    const long j = static_cast<long>(tau / period);
    if (j != cur_period) {
      cur_period = j;
      dyn_scene = dynamic_scene_for_period(j);
    }
    const double t_block = tau / ts;
    const double t_rel_block = (tau - j * period) / ts;
    for (std::size_t k = 0; k < clutter_scene.links.size(); ++k) {
      std::vector<PathParams> combined = clutter_scene.links[k];
      const auto& dyn = dyn_scene.links[k];
      // Clutter Doppler phases run on absolute time; dynamic paths restart
      // each period.
      for (const auto& d : dyn) combined.push_back(d);
      // Evaluate clutter at absolute block time and dynamics at period-local
      // time by shifting the dynamic Doppler phase reference.
      ReconChannel recon;
      recon.subcarriers = alloc.merged();
      recon.sir_db = config.eta_db;
      for (int n : recon.subcarriers) {
        Eigen::MatrixXcd h =
            freq_channel(clutter_scene.links[k], n, t_block, grid, rx_cfg, tx_cfg);
        h += freq_channel(dyn, n, t_rel_block, grid, rx_cfg, tx_cfg);
        recon.per_subcarrier.push_back(std::move(h));
      }
      if (std::isfinite(config.eta_db)) {
        double mean_power = 0.0;
        long entries = 0;
        for (const auto& h : recon.per_subcarrier) {
          mean_power += h.squaredNorm();
          entries += h.size();
        }
        mean_power /= static_cast<double>(entries);
        const double err_power = mean_power / std::pow(10.0, config.eta_db / 10.0);
        std::mt19937_64 rng(mix_seed(seed, 5000 + static_cast<std::uint64_t>(i) * 16 + k));
        std::normal_distribution<double> nd(0.0, std::sqrt(err_power / 2.0));
        for (auto& h : recon.per_subcarrier) {
          for (Eigen::Index r = 0; r < h.rows(); ++r) {
            for (Eigen::Index c = 0; c < h.cols(); ++c) {
              h(r, c) += cplx(nd(rng), nd(rng));
            }
          }
        }
      }
      Eigen::MatrixXcd stacked = stack_recon(recon);
      if (states.size() <= k) {
        states.emplace_back(stacked.rows(), stacked.cols(), config.clutter.alpha,
                            t_h);
      }
      states[k].update(stacked);
    }
  }

  // Estimation inside the final period, on background-subtracted channels.
  const double tau_est = p * t_h;
  const long j_est = static_cast<long>(tau_est / period);
  if (j_est != cur_period) dyn_scene = dynamic_scene_for_period(j_est);
  const double t0 = (tau_est - j_est * period) / ts;
  const double t1 = t0 + config.doppler_spacing_blocks;
  const double t_block0 = tau_est / ts;
  const double t_block1 = t_block0 + config.doppler_spacing_blocks;

  std::vector<PathEstimate> estimates;
  for (std::size_t k = 0; k < clutter_scene.links.size(); ++k) {
    auto make_recon = [&](double abs_block, double rel_block, std::uint64_t tag) {
      ReconChannel recon;
      recon.subcarriers = alloc.merged();
      recon.sir_db = config.eta_db;
      for (int n : recon.subcarriers) {
        Eigen::MatrixXcd h = freq_channel(clutter_scene.links[k], n, abs_block,
                                          grid, rx_cfg, tx_cfg);
        h += freq_channel(dyn_scene.links[k], n, rel_block, grid, rx_cfg, tx_cfg);
        recon.per_subcarrier.push_back(std::move(h));
      }
      if (std::isfinite(config.eta_db)) {
        double mean_power = 0.0;
        long entries = 0;
        for (const auto& h : recon.per_subcarrier) {
          mean_power += h.squaredNorm();
          entries += h.size();
        }
        mean_power /= static_cast<double>(entries);
        const double err_power = mean_power / std::pow(10.0, config.eta_db / 10.0);
        std::mt19937_64 rng(mix_seed(seed, tag * 131 + k));
        std::normal_distribution<double> nd(0.0, std::sqrt(err_power / 2.0));
        for (auto& h : recon.per_subcarrier) {
          for (Eigen::Index r = 0; r < h.rows(); ++r) {
            for (Eigen::Index c = 0; c < h.cols(); ++c) {
              h(r, c) += cplx(nd(rng), nd(rng));
            }
          }
        }
      }
      return recon;
    };

    ReconChannel recon0 = make_recon(t_block0, t0, 7000);
    ReconChannel recon1 = make_recon(t_block1, t1, 8000);
    ReconChannel sub0 = unstack_recon(states[k].subtract(stack_recon(recon0)), recon0);
    ReconChannel sub1 = unstack_recon(states[k].subtract(stack_recon(recon1)), recon1);
    auto ests = indirect_estimates_from_recon(sub0, sub1, config,
                                              static_cast<int>(k));
    estimates.insert(estimates.end(), ests.begin(), ests.end());
  }

  // Truth: the final period's dynamic paths plus the (flagged) clutter paths.
  Scene truth_scene = dyn_scene;
  for (std::size_t k = 0; k < truth_scene.links.size(); ++k) {
    for (const auto& c : clutter_scene.links[k]) truth_scene.links[k].push_back(c);
  }
  result.scene = truth_scene;
  result.truth = truth_scene.all_paths();
  result.estimates = estimates;
  MatchGates gates;
  gates.delay_s = 0.5 * grid.delay_resolution_s();
  result.report = match_paths(result.truth, result.estimates, gates);
  return result;
}

RunResult run_single(const ExperimentConfig& config, int run_id) {
  if (config.scheme == Scheme::kClutter) return run_clutter_single(config, run_id);

  RunResult result;
  result.run_id = run_id;
  const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(run_id);
  result.scene = sample_scene(config.clusters, mix_seed(seed, 10),
                              config.scene_options());
  result.truth = result.scene.all_paths();

  switch (config.scheme) {
    case Scheme::kDirect:
      result.estimates = run_direct_pipeline(result.scene, config, seed);
      break;
    case Scheme::kIndirect:
      result.estimates = run_indirect_pipeline(result.scene, config, seed);
      break;
    case Scheme::kBaseline:
      result.estimates = run_baseline_pipeline(result.scene, config, seed);
      break;
    case Scheme::kClutter:
      break;
  }

  MatchGates gates;
  gates.delay_s = 0.5 * config.grid.delay_resolution_s();
  result.report = match_paths(result.truth, result.estimates, gates);
  return result;
}

Summary summarize(const std::vector<RunResult>& results) {
  Summary s;
  double delay_sq = 0.0, aoa_sq = 0.0, doppler_sq = 0.0, power_sq = 0.0;
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    ++s.runs;
    s.truth_count += static_cast<int>(r.truth.size());
    s.matched += static_cast<int>(r.report.matches.size());
    s.false_alarms += static_cast<int>(r.report.false_alarms.size());
    for (const auto& m : r.report.matches) {
      delay_sq += m.delay_err_s * m.delay_err_s;
      aoa_sq += m.aoa_phase_err_rad * m.aoa_phase_err_rad;
      doppler_sq += m.doppler_err_hz * m.doppler_err_hz;
      power_sq += m.power_err_db * m.power_err_db;
    }
  }
  if (s.truth_count > 0) {
    s.detection_rate = static_cast<double>(s.matched) / s.truth_count;
  }
  const int est_total = s.matched + s.false_alarms;
  if (est_total > 0) {
    s.false_alarm_rate = static_cast<double>(s.false_alarms) / est_total;
  }
  if (s.matched > 0) {
    s.delay_rmse_s = std::sqrt(delay_sq / s.matched);
    s.aoa_phase_rmse_rad = std::sqrt(aoa_sq / s.matched);
    s.doppler_rmse_hz = std::sqrt(doppler_sq / s.matched);
    s.power_rmse_db = std::sqrt(power_sq / s.matched);
  }
  return s;
}

void write_results_csv(const std::vector<RunResult>& results,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
  out << "run_id,kind,path_id,source,delay_s,aoa_rad,aod_rad,doppler_hz,power_db,"
         "matched,match_id\n";
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    std::vector<int> truth_match(r.truth.size(), -1);
    std::vector<int> est_match(r.estimates.size(), -1);
    for (const auto& m : r.report.matches) {
      truth_match[static_cast<std::size_t>(m.truth_index)] = m.est_index;
      est_match[static_cast<std::size_t>(m.est_index)] = m.truth_index;
    }
    for (std::size_t i = 0; i < r.truth.size(); ++i) {
      const auto& t = r.truth[i];
      const double power = std::norm(t.amp);
      out << r.run_id << ",true," << i << ',' << t.source << ',' << fmt(t.delay_s)
          << ',' << fmt(t.aoa_rad) << ',' << fmt(t.aod_rad) << ','
          << fmt(t.doppler_hz) << ','
          << fmt(power > 0.0 ? 10.0 * std::log10(power)
                             : -std::numeric_limits<double>::infinity())
          << ',' << (truth_match[i] >= 0 ? 1 : 0) << ',' << truth_match[i] << '\n';
    }
    for (std::size_t i = 0; i < r.estimates.size(); ++i) {
      const auto& e = r.estimates[i];
      out << r.run_id << ",est," << i << ',' << e.source << ',' << fmt(e.delay_s)
          << ',' << fmt(e.aoa_rad) << ',' << fmt(e.aod_rad ? *e.aod_rad : 0.0)
          << ',' << fmt(e.doppler_hz) << ','
          << fmt(e.power > 0.0 ? 10.0 * std::log10(e.power)
                               : -std::numeric_limits<double>::infinity())
          << ',' << (est_match[i] >= 0 ? 1 : 0) << ',' << est_match[i] << '\n';
    }
  }
}

void write_summary_csv(const Summary& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "runs,truth_count,matched,false_alarms,detection_rate,false_alarm_rate,"
         "delay_rmse_s,aoa_phase_rmse_rad,doppler_rmse_hz,power_rmse_db\n";
  out << s.runs << ',' << s.truth_count << ',' << s.matched << ','
      << s.false_alarms << ',' << fmt(s.detection_rate) << ','
      << fmt(s.false_alarm_rate) << ',' << fmt(s.delay_rmse_s) << ','
      << fmt(s.aoa_phase_rmse_rad) << ',' << fmt(s.doppler_rmse_hz) << ','
      << fmt(s.power_rmse_db) << '\n';
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  std::vector<RunResult> results;
  for (int r = 0; r < config.runs; ++r) {
    try {
      results.push_back(run_single(config, r));
    } catch (const std::exception& e) {
      RunResult failed;
      failed.run_id = r;
      failed.error = e.what();
      results.push_back(std::move(failed));
    }
  }
  write_results_csv(results, config.out_dir + "/results.csv");
  write_summary_csv(summarize(results), config.out_dir + "/summary.csv");
  if (!results.empty()) {
    bool any_error = false;
    std::ofstream err(config.out_dir + "/errors.log");
    for (const auto& r : results) {
      if (!r.error.empty()) {
        err << r.run_id << ": " << r.error << '\n';
        any_error = true;
      }
    }
    if (!any_error) std::filesystem::remove(config.out_dir + "/errors.log");
  }
  return results;
}

void sweep(const ExperimentConfig& config, const std::string& parameter,
           const std::vector<double>& values) {
  std::filesystem::create_directories(config.out_dir);
  std::ofstream table(config.out_dir + "/sweep.csv");
  if (!table) throw std::runtime_error("sweep: cannot open output table");
  table << "value,runs,truth_count,matched,false_alarms,detection_rate,"
           "false_alarm_rate,delay_rmse_s,aoa_phase_rmse_rad,doppler_rmse_hz,"
           "power_rmse_db\n";

  for (double value : values) {
    json j = json::parse(config.to_json());
    // Dotted path into the nested config document.
    json* node = &j;
    std::string rest = parameter;
    for (;;) {
      const auto dot = rest.find('.');
      const std::string key = rest.substr(0, dot);
      if (!node->contains(key)) {
        throw std::invalid_argument("sweep: unknown parameter '" + parameter + "'");
      }
      if (dot == std::string::npos) {
        auto& leaf = (*node)[key];
        if (leaf.is_number_integer() || leaf.is_number_unsigned()) {
          leaf = static_cast<long>(value);
        } else if (leaf.is_number_float()) {
          leaf = value;
        } else {
          throw std::invalid_argument("sweep: parameter '" + parameter +
                                      "' is not numeric");
        }
        break;
      }
      node = &(*node)[key];
      rest = rest.substr(dot + 1);
    }
    ExperimentConfig sub = ExperimentConfig::from_json(j.dump());
    std::ostringstream dir;
    dir << config.out_dir << "/sweep_" << fmt(value);
    sub.out_dir = dir.str();
    const Summary s = summarize(run_experiment(sub));
    table << fmt(value) << ',' << s.runs << ',' << s.truth_count << ','
          << s.matched << ',' << s.false_alarms << ',' << fmt(s.detection_rate)
          << ',' << fmt(s.false_alarm_rate) << ',' << fmt(s.delay_rmse_s) << ','
          << fmt(s.aoa_phase_rmse_rad) << ',' << fmt(s.doppler_rmse_hz) << ','
          << fmt(s.power_rmse_db) << '\n';
  }
}

}  // namespace pmn
