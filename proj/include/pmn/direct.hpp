#ifndef PMN_DIRECT_HPP
#define PMN_DIRECT_HPP

#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pmn/sparse.hpp"

namespace pmn {

/// One recovered multipath. aod_rad is empty when the transmit array has a
/// single element.
struct PathEstimate {
  int delay_bin = 0;
  double delay_s = 0.0;
  double aoa_rad = 0.0;
  std::optional<double> aod_rad;
  double doppler_hz = 0.0;
  double power = 0.0;  // |b|^2 linear
  int source = -1;     // -1 when unresolved
};

/// Recovered non-zero blocks keyed by (delay bin, source), one M_T x M matrix
/// per OFDM block index.
struct BlockEstimateSeries {
  std::map<std::pair<int, int>, std::map<int, Eigen::MatrixXcd>> entries;
};

struct DirectOptions {
  int n_p = 0;                 // 0 -> g N
  int max_sparsity = 0;        // 0 -> auto
  double residual_scale = 1.0; // multiplies the expected noise residual
  double power_floor = 0.0;    // block power floor for source classification
  double rank1_residual_frac = 0.1;  // route to 2D search above this
  int spectrum_oversample = 8;
};

/// Solves the block-sparse MMV for one received block and returns the
/// non-zero blocks keyed by quantized delay. Each block is M_T K x M.
std::vector<std::pair<int, Eigen::MatrixXcd>> recover_blocks(
    const RxBlock& rx, const SymbolFrame& frame, const OfdmGrid& grid,
    const DirectOptions& opts);

/// Splits an M_T K x M block into its K per-source sub-matrices and keeps
/// those with mean power above the floor.
std::vector<std::pair<int, Eigen::MatrixXcd>> classify_source(
    const Eigen::MatrixXcd& block, int n_users, int n_tx, double power_floor);

struct AngleEstimate {
  double aoa_rad = 0.0;
  std::optional<double> aod_rad;
  double power = 0.0;
};

/// AoA/AoD/|b|^2 from adjacent-element cross-correlations of one M_T x M
/// source block. Correlation sums are normalized by the number of terms so
/// power estimates are comparable across array sizes.
AngleEstimate extract_angles(const Eigen::MatrixXcd& block);

/// Doppler from conjugate correlation of consecutive block estimates,
/// f_D = angle(sum_t <B_{t+1}, B_t>) / (2 pi T_s). Unambiguous within
/// +-1/(2 T_s). Throws when fewer than two consecutive blocks co-occur.
double extract_doppler(const BlockEstimateSeries& series, int delay_bin,
                       int source, double block_period_s);

/// Keeps estimates whose power exceeds a per-delay threshold (same threshold
/// for every bin when the vector has one entry).
std::vector<PathEstimate> threshold_paths(const std::vector<PathEstimate>& estimates,
                                          const std::vector<double>& thresholds);

/// Expected-power reference thresholds per delay bin: margin above the
/// noise floor, capped from below by a fraction of the pathloss-predicted
/// received power for that delay.
std::vector<double> delay_power_thresholds(const OfdmGrid& grid, int n_p,
                                           double noise_ref_power,
                                           double margin_db,
                                           double pathloss_exponent = 0.0,
                                           double tx_power_w = 0.0,
                                           double pathloss_frac = 0.0);

/// Oversampled 2D-DFT peak search over one M_T x M block for the
/// same-delay same-source multipath case. Returns (aoa, aod, power) local
/// maxima above the relative floor.
std::vector<AngleEstimate> same_delay_spectrum(const Eigen::MatrixXcd& block,
                                               int oversample,
                                               double rel_floor_db = 12.0);

/// Fraction of block energy outside its best rank-1 fit.
double rank1_residual_fraction(const Eigen::MatrixXcd& block);

}  // namespace pmn

#endif  // PMN_DIRECT_HPP
