#ifndef PMN_BASELINE_HPP
#define PMN_BASELINE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmn/indirect.hpp"

namespace pmn {

/// Delay-angle power grid from the classical 2D DFT: rows indexed by delay
/// bin (subcarrier-dimension DFT), columns by angle bin (zero-padded
/// antenna-dimension DFT). Angle bin u maps to sin(angle) = 2u/len wrapped to
/// [-1, 1).
struct RangeAngleMap {
  Eigen::MatrixXd power;  // (g N) x angle_fft_len
  double delay_resolution_s = 0.0;
  int angle_fft_len = 0;

  double sin_angle_of_bin(int u) const;
};

/// 2D DFT of one receive-array channel column (per transmit antenna);
/// unused subcarriers are zero-filled. Rectangular window.
RangeAngleMap dft2d_map(const std::vector<Eigen::VectorXcd>& column_per_subcarrier,
                        const std::vector<int>& subcarriers, const OfdmGrid& grid,
                        int angle_fft_len);

/// Per-transmit-antenna maps of a reconstructed channel, summed in power.
RangeAngleMap dft2d_map_recon(const ReconChannel& recon, const OfdmGrid& grid,
                              int angle_fft_len);

/// Adds map powers elementwise (shape must match).
RangeAngleMap sum_maps(const std::vector<RangeAngleMap>& maps);

/// Zeroes entries more than floor_db below the map maximum.
RangeAngleMap clear_map(const RangeAngleMap& map, double floor_db = 25.0);

struct MapPeak {
  int delay_bin = 0;
  int angle_bin = 0;
  double power = 0.0;
  double delay_s = 0.0;
  double sin_angle = 0.0;
};

/// Strict local maxima over the 8-neighborhood (angle axis wraps).
std::vector<MapPeak> find_peaks(const RangeAngleMap& map);

void write_map_csv(const RangeAngleMap& map, const std::string& path);

}  // namespace pmn

#endif  // PMN_BASELINE_HPP
