#include "pmn/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pmn/waveform.hpp"

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

cplx complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}
}  // namespace

std::vector<PathParams> Scene::all_paths() const {
  std::vector<PathParams> out;
  for (const auto& link : links) out.insert(out.end(), link.begin(), link.end());
  return out;
}

Eigen::VectorXcd steering(const UlaConfig& cfg, double angle_rad) {
  Eigen::VectorXcd a(cfg.elements);
  const double s = std::sin(angle_rad);
  for (int m = 0; m < cfg.elements; ++m) {
    a(m) = std::polar(1.0, kPi * m * s);
  }
  return a;
}

Eigen::MatrixXcd freq_channel(const std::vector<PathParams>& link, int n,
                              double t, const OfdmGrid& grid,
                              const UlaConfig& rx, const UlaConfig& tx) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(rx.elements, tx.elements);
  const double f0 = grid.subcarrier_spacing_hz();
  const double ts = grid.block_period_s();
  for (const auto& p : link) {
    const cplx phase = std::polar(1.0, -2.0 * kPi * n * p.delay_s * f0 +
                                           2.0 * kPi * t * p.doppler_hz * ts);
    h.noalias() += (p.amp * phase) * (steering(rx, p.aoa_rad) *
                                      steering(tx, p.aod_rad).transpose());
  }
  return h;
}

std::vector<std::pair<double, Eigen::MatrixXcd>> time_channel(
    const std::vector<PathParams>& link, double t_prime, const UlaConfig& rx,
    const UlaConfig& tx) {
  std::vector<std::pair<double, Eigen::MatrixXcd>> out;
  out.reserve(link.size());
  for (const auto& p : link) {
    const cplx phase = std::polar(1.0, 2.0 * kPi * p.doppler_hz * t_prime);
    out.emplace_back(p.delay_s, (p.amp * phase) *
                                    (steering(rx, p.aoa_rad) *
                                     steering(tx, p.aod_rad).transpose()));
  }
  return out;
}

double pathloss(double distance_m, double exponent) {
  if (distance_m <= 0.0) {
    throw std::invalid_argument("pathloss: distance must be positive");
  }
  return std::pow(distance_m, -exponent);
}

Scene sample_scene(const std::vector<ClusterSpec>& specs, std::uint64_t seed,
                   const SceneOptions& opts) {
  if (specs.empty()) {
    throw std::invalid_argument("sample_scene: no cluster specs");
  }
  std::mt19937_64 rng(seed);
  Scene scene;
  scene.links.resize(static_cast<std::size_t>(opts.n_sources));
  scene.static_period_s = opts.static_period_s;
  scene.carrier_hz = opts.carrier_hz;

  const double tx_amp = std::sqrt(std::pow(10.0, (opts.tx_power_dbm - 30.0) / 10.0));
  std::vector<std::set<long>> used_bins(scene.links.size());

  for (const auto& spec : specs) {
    if (spec.source < 0 || spec.source >= opts.n_sources) {
      throw std::invalid_argument("sample_scene: cluster source out of range");
    }
    if (spec.path_count_max < spec.path_count_min || spec.path_count_min < 0) {
      throw std::invalid_argument("sample_scene: bad path count interval");
    }
    if (spec.distance_offset_m_min + spec.distance_span_m_min <= 0.0) {
      throw std::invalid_argument("sample_scene: distances must be positive");
    }
    if (opts.on_grid) {
      // Duplicate-free quantized delays must be feasible for the worst draw.
      const double d_lo = spec.distance_offset_m_min + spec.distance_span_m_min;
      const double d_hi = spec.distance_offset_m_max + spec.distance_span_m_max;
      const long bin_lo = std::lround(d_lo / (kSpeedOfLight * opts.delay_resolution_s));
      const long bin_hi = std::lround(d_hi / (kSpeedOfLight * opts.delay_resolution_s));
      if (bin_hi - bin_lo + 1 < spec.path_count_max) {
        throw std::invalid_argument(
            "sample_scene: distance interval too narrow for duplicate-free "
            "on-grid delays");
      }
    }

    std::uniform_int_distribution<int> count_d(spec.path_count_min,
                                               spec.path_count_max);
    const int n_paths = count_d(rng);
    const double dir_offset =
        uniform(rng, spec.direction_offset_deg_min, spec.direction_offset_deg_max);
    const double aod_offset =
        uniform(rng, spec.direction_offset_deg_min, spec.direction_offset_deg_max);
    const double dist_offset =
        uniform(rng, spec.distance_offset_m_min, spec.distance_offset_m_max);
    const double speed_offset =
        uniform(rng, spec.speed_offset_mps_min, spec.speed_offset_mps_max);
    const double doppler_offset = speed_offset * opts.carrier_hz / kSpeedOfLight;

    auto& link = scene.links[static_cast<std::size_t>(spec.source)];
    auto& bins = used_bins[static_cast<std::size_t>(spec.source)];

    for (int i = 0; i < n_paths; ++i) {
      PathParams path;
      path.source = spec.source;
      path.is_clutter = spec.is_clutter;

      // ULA angles must stay inside (-pi/2, pi/2); offset+span draws can
      // exceed that, so redraw the span part.
      for (int tries = 0;; ++tries) {
        const double deg = dir_offset + uniform(rng, spec.direction_span_deg_min,
                                                spec.direction_span_deg_max);
        if (std::abs(deg) < 89.9) {
          path.aoa_rad = deg * kPi / 180.0;
          break;
        }
        if (tries > 1000) throw std::runtime_error("sample_scene: AoA redraw failed");
      }
      for (int tries = 0;; ++tries) {
        const double deg = aod_offset + uniform(rng, spec.direction_span_deg_min,
                                                spec.direction_span_deg_max);
        if (std::abs(deg) < 89.9) {
          path.aod_rad = deg * kPi / 180.0;
          break;
        }
        if (tries > 1000) throw std::runtime_error("sample_scene: AoD redraw failed");
      }

      if (spec.is_clutter) {
        path.doppler_hz = uniform(rng, -opts.clutter_doppler_bound_hz,
                                  opts.clutter_doppler_bound_hz);
      } else {
        path.doppler_hz = doppler_offset + uniform(rng, spec.doppler_span_hz_min,
                                                   spec.doppler_span_hz_max);
      }

      double distance = 0.0;
      for (int tries = 0;; ++tries) {
        distance = dist_offset + uniform(rng, spec.distance_span_m_min,
                                         spec.distance_span_m_max);
        if (distance <= 0.0) continue;
        if (!opts.on_grid) {
          path.delay_s = distance / kSpeedOfLight;
          break;
        }
        const long bin = std::lround(distance / kSpeedOfLight / opts.delay_resolution_s);
        if (bin >= 0 && bins.insert(bin).second) {
          path.delay_s = static_cast<double>(bin) * opts.delay_resolution_s;
          break;
        }
        if (tries > 10000) {
          throw std::runtime_error(
              "sample_scene: could not draw duplicate-free on-grid delay");
        }
      }

      path.amp = complex_gaussian(rng) * tx_amp *
                 std::sqrt(pathloss(distance, opts.pathloss_exponent));
      link.push_back(path);
    }
  }
  return scene;
}

namespace {
nlohmann::json path_to_json(const PathParams& p) {
  return {{"delay_s", p.delay_s},   {"doppler_hz", p.doppler_hz},
          {"aoa_rad", p.aoa_rad},   {"aod_rad", p.aod_rad},
          {"amp_re", p.amp.real()}, {"amp_im", p.amp.imag()},
          {"source", p.source},     {"is_clutter", p.is_clutter}};
}

PathParams path_from_json(const nlohmann::json& j) {
  PathParams p;
  p.delay_s = j.at("delay_s").get<double>();
  p.doppler_hz = j.at("doppler_hz").get<double>();
  p.aoa_rad = j.at("aoa_rad").get<double>();
  p.aod_rad = j.at("aod_rad").get<double>();
  p.amp = {j.at("amp_re").get<double>(), j.at("amp_im").get<double>()};
  p.source = j.at("source").get<int>();
  p.is_clutter = j.at("is_clutter").get<bool>();
  return p;
}
}  // namespace

std::string scene_to_json(const Scene& scene) {
  nlohmann::json j;
  j["static_period_s"] = scene.static_period_s;
  j["carrier_hz"] = scene.carrier_hz;
  j["links"] = nlohmann::json::array();
  for (const auto& link : scene.links) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& p : link) jl.push_back(path_to_json(p));
    j["links"].push_back(jl);
  }
  return j.dump(2);
}

Scene scene_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Scene scene;
  scene.static_period_s = j.at("static_period_s").get<double>();
  scene.carrier_hz = j.at("carrier_hz").get<double>();
  for (const auto& jl : j.at("links")) {
    std::vector<PathParams> link;
    for (const auto& jp : jl) link.push_back(path_from_json(jp));
    scene.links.push_back(std::move(link));
  }
  return scene;
}

}  // namespace pmn
