#ifndef PMN_SCENE_HPP
#define PMN_SCENE_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pmn {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Half-wavelength uniform linear array.
struct UlaConfig {
  int elements = 1;
};

/// One multipath component. Amplitude is the net complex linear gain at the
/// receiver (transmit power and pathloss already folded in).
struct PathParams {
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double aoa_rad = 0.0;
  double aod_rad = 0.0;
  cplx amp{0.0, 0.0};
  int source = 0;
  bool is_clutter = false;
};

/// Uniform intervals describing one cluster of scatterers. Path-level draws
/// use the *_span intervals; one draw per cluster comes from the *_offset
/// intervals.
struct ClusterSpec {
  int path_count_min = 10;
  int path_count_max = 15;
  double direction_span_deg_min = 0.0;
  double direction_span_deg_max = 45.0;
  double distance_span_m_min = 0.0;
  double distance_span_m_max = 45.0;
  double doppler_span_hz_min = 0.0;
  double doppler_span_hz_max = 600.0;
  double direction_offset_deg_min = -75.0;
  double direction_offset_deg_max = 75.0;
  double distance_offset_m_min = 50.0;
  double distance_offset_m_max = 180.0;
  double speed_offset_mps_min = -40.0;
  double speed_offset_mps_max = 40.0;
  int source = 0;          // link this cluster contributes to
  bool is_clutter = false; // near-zero Doppler background paths
};

struct Scene {
  std::vector<std::vector<PathParams>> links; // indexed by source
  double static_period_s = 0.0017;
  double carrier_hz = 2.35e9;

  std::vector<PathParams> all_paths() const;
};

struct OfdmGrid; // waveform.hpp

enum class LinkMode { kDownlink, kUplink };

struct SceneOptions {
  LinkMode mode = LinkMode::kUplink;
  int n_sources = 1;
  double carrier_hz = 2.35e9;
  double static_period_s = 0.0017;
  // Delays quantized to multiples of 1/(g B); duplicates within a link are
  // redrawn.
  bool on_grid = true;
  double delay_resolution_s = 1e-8; // 1/(g B)
  double tx_power_dbm = 25.0;       // 30 dBm RRU downlink, 25 dBm MS uplink
  double pathloss_exponent = 2.0;   // 4 downlink, 2 uplink
  double clutter_doppler_bound_hz = 1.0;
};

/// Array response of a half-wavelength ULA, a(M, theta)_m = exp(j pi m sin theta).
Eigen::VectorXcd steering(const UlaConfig& cfg, double angle_rad);

/// Frequency-domain channel matrix at subcarrier n, OFDM block t.
Eigen::MatrixXcd freq_channel(const std::vector<PathParams>& link, int n,
                              double t, const OfdmGrid& grid,
                              const UlaConfig& rx, const UlaConfig& tx);

/// Time-domain impulse response at absolute time t_prime: one (delay, matrix)
/// pair per path.
std::vector<std::pair<double, Eigen::MatrixXcd>> time_channel(
    const std::vector<PathParams>& link, double t_prime, const UlaConfig& rx,
    const UlaConfig& tx);

/// Distance-power-law gain, anchored at gain 1 for 1 m.
double pathloss(double distance_m, double exponent);

/// Draws a random multipath scene from cluster specs. Deterministic under a
/// fixed seed. Throws if a spec cannot satisfy the duplicate-free on-grid
/// delay constraint.
Scene sample_scene(const std::vector<ClusterSpec>& specs, std::uint64_t seed,
                   const SceneOptions& opts);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

}  // namespace pmn

#endif  // PMN_SCENE_HPP
