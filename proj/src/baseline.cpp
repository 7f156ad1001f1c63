#include "pmn/baseline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double RangeAngleMap::sin_angle_of_bin(int u) const {
  double s = 2.0 * u / angle_fft_len;
  if (s >= 1.0) s -= 2.0;
  return s;
}

RangeAngleMap dft2d_map(const std::vector<Eigen::VectorXcd>& column_per_subcarrier,
                        const std::vector<int>& subcarriers, const OfdmGrid& grid,
                        int angle_fft_len) {
  if (column_per_subcarrier.size() != subcarriers.size()) {
    throw std::invalid_argument("dft2d_map: subcarrier count mismatch");
  }
  const auto m = column_per_subcarrier.empty() ? 0
                                               : column_per_subcarrier.front().size();
  if (angle_fft_len < m) {
    throw std::invalid_argument("dft2d_map: angle FFT shorter than the array");
  }
  const int n_delay = grid.delay_grid_size();
  const auto n_u = static_cast<Eigen::Index>(subcarriers.size());

  // Delay DFT over subcarrier index (unused subcarriers zero-filled), then
  // zero-padded DFT over the antenna index.
  Eigen::MatrixXcd delay_dft(n_delay, m);
  for (int q = 0; q < n_delay; ++q) {
    Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(m);
    for (Eigen::Index r = 0; r < n_u; ++r) {
      const double n = subcarriers[static_cast<std::size_t>(r)];
      const cplx w = std::polar(1.0, 2.0 * kPi * n * q / n_delay);
      acc += w * column_per_subcarrier[static_cast<std::size_t>(r)].transpose();
    }
    delay_dft.row(q) = acc;
  }

  RangeAngleMap map;
  map.delay_resolution_s = grid.delay_resolution_s();
  map.angle_fft_len = angle_fft_len;
  map.power.resize(n_delay, angle_fft_len);
  for (int q = 0; q < n_delay; ++q) {
    for (int u = 0; u < angle_fft_len; ++u) {
      cplx acc{0.0, 0.0};
      for (Eigen::Index p = 0; p < m; ++p) {
        acc += delay_dft(q, p) *
               std::polar(1.0, -2.0 * kPi * double(p) * u / angle_fft_len);
      }
      map.power(q, u) = std::norm(acc);
    }
  }
  return map;
}

RangeAngleMap dft2d_map_recon(const ReconChannel& recon, const OfdmGrid& grid,
                              int angle_fft_len) {
  if (recon.per_subcarrier.empty()) {
    throw std::invalid_argument("dft2d_map_recon: empty channel");
  }
  const auto m_tx = recon.per_subcarrier.front().cols();
  std::vector<RangeAngleMap> maps;
  maps.reserve(static_cast<std::size_t>(m_tx));
  for (Eigen::Index m = 0; m < m_tx; ++m) {
    std::vector<Eigen::VectorXcd> cols;
    cols.reserve(recon.per_subcarrier.size());
    for (const auto& h : recon.per_subcarrier) cols.push_back(h.col(m));
    maps.push_back(dft2d_map(cols, recon.subcarriers, grid, angle_fft_len));
  }
  return sum_maps(maps);
}

RangeAngleMap sum_maps(const std::vector<RangeAngleMap>& maps) {
  if (maps.empty()) throw std::invalid_argument("sum_maps: no maps");
  RangeAngleMap out = maps.front();
  for (std::size_t i = 1; i < maps.size(); ++i) {
    if (maps[i].power.rows() != out.power.rows() ||
        maps[i].power.cols() != out.power.cols()) {
      throw std::invalid_argument("sum_maps: shape mismatch");
    }
    out.power += maps[i].power;
  }
  return out;
}

RangeAngleMap clear_map(const RangeAngleMap& map, double floor_db) {
  if (floor_db <= 0.0) {
    throw std::invalid_argument("clear_map: floor must be positive dB");
  }
  RangeAngleMap out = map;
  const double floor = map.power.maxCoeff() * std::pow(10.0, -floor_db / 10.0);
  out.power = (map.power.array() >= floor).select(map.power, 0.0);
  return out;
}

std::vector<MapPeak> find_peaks(const RangeAngleMap& map) {
  std::vector<MapPeak> peaks;
  const auto rows = map.power.rows();
  const auto cols = map.power.cols();
  for (Eigen::Index q = 0; q < rows; ++q) {
    for (Eigen::Index u = 0; u < cols; ++u) {
      const double p = map.power(q, u);
      if (p <= 0.0) continue;
      bool is_peak = true;
      for (int dq = -1; dq <= 1 && is_peak; ++dq) {
        for (int du = -1; du <= 1; ++du) {
          if (dq == 0 && du == 0) continue;
          const Eigen::Index qq = q + dq;
          const Eigen::Index uu = (u + du + cols) % cols;  // angle axis wraps
          if (qq < 0 || qq >= rows) continue;
          if (map.power(qq, uu) > p) {
            is_peak = false;
            break;
          }
        }
      }
      if (!is_peak) continue;
      MapPeak peak;
      peak.delay_bin = static_cast<int>(q);
      peak.angle_bin = static_cast<int>(u);
      peak.power = p;
      peak.delay_s = q * map.delay_resolution_s;
      peak.sin_angle = map.sin_angle_of_bin(static_cast<int>(u));
      peaks.push_back(peak);
    }
  }
  return peaks;
}

void write_map_csv(const RangeAngleMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_map_csv: cannot open " + path);
  char buf[64];
  for (Eigen::Index q = 0; q < map.power.rows(); ++q) {
    for (Eigen::Index u = 0; u < map.power.cols(); ++u) {
      std::snprintf(buf, sizeof(buf), "%.12g", map.power(q, u));
      out << buf << (u + 1 == map.power.cols() ? "" : ",");
    }
    out << "\n";
  }
}

}  // namespace pmn
