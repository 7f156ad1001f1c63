#ifndef PMN_WAVEFORM_HPP
#define PMN_WAVEFORM_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pmn/scene.hpp"

namespace pmn {

/// OFDM numerology. Subcarrier spacing f0 = B/N; block period
/// Ts = N/B * (1 + cp_fraction). grid_factor g sets the delay grid 1/(gB).
struct OfdmGrid {
  int n_subcarriers = 512;
  double bandwidth_hz = 1e8;
  double cp_fraction = 0.25;
  int grid_factor = 1;

  double subcarrier_spacing_hz() const { return bandwidth_hz / n_subcarriers; }
  double block_period_s() const {
    return (n_subcarriers / bandwidth_hz) * (1.0 + cp_fraction);
  }
  double delay_resolution_s() const { return 1.0 / (grid_factor * bandwidth_hz); }
  int delay_grid_size() const { return grid_factor * n_subcarriers; }
};

/// Per-user subcarrier index sets. Users may share indexes (multiuser-MIMO).
struct Allocation {
  std::vector<std::vector<int>> user_sets;

  /// Sorted union of all users' indexes.
  std::vector<int> merged() const;
  int n_used() const { return static_cast<int>(merged().size()); }

  static Allocation full(int n_subcarriers, int n_users);
  static Allocation shared(std::vector<int> indexes, int n_users);
};

enum class Constellation { kQpsk };

/// Known transmit symbols: one N_u x (M_T K) matrix per OFDM block, rows
/// ordered by the sorted union of allocated subcarriers.
struct SymbolFrame {
  std::vector<Eigen::MatrixXcd> blocks;
  std::vector<int> subcarriers;
  int n_users = 1;
  int n_tx = 1;
  Constellation constellation = Constellation::kQpsk;
  std::uint64_t seed = 0;
};

/// One received OFDM block across the sensing array.
struct RxBlock {
  int t = 0;
  Eigen::MatrixXcd samples;  // N_u x M
  double noise_power = 0.0;
};

SymbolFrame gen_symbols(const Allocation& alloc, const OfdmGrid& grid, int n_users,
                        int n_tx, Constellation constellation, std::uint64_t seed,
                        int n_blocks = 1);

/// Frequency-domain receive model: per allocated subcarrier,
/// y_n = sum_k H_{n,k,t} x_{k,n,t} + z_n with complex AWGN of the given power.
RxBlock receive(const Scene& scene, const SymbolFrame& frame, int t,
                const OfdmGrid& grid, const Allocation& alloc,
                const UlaConfig& rx_cfg, double noise_power,
                std::uint64_t noise_seed);

/// Thermal noise floor -174 dBm/Hz over the grid bandwidth, in linear watts.
double thermal_noise_power(const OfdmGrid& grid);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Nearest delay-grid index round(tau g B); throws when tau falls outside
/// [0, N_p) bins.
int quantize_delay(double tau_s, const OfdmGrid& grid, int n_p);

/// 5G NR PDSCH mapping Type B style comb: indexes {3,4,9,10} of every
/// 12-subcarrier resource block.
std::vector<int> nr_type_b_indexes(int n_total);

}  // namespace pmn

#endif  // PMN_WAVEFORM_HPP
