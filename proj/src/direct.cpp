#include "pmn/direct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmn/scene.hpp"

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;

double clamped_asin(double x) {
  return std::asin(std::clamp(x, -1.0, 1.0));
}
}  // namespace

std::vector<std::pair<int, Eigen::MatrixXcd>> recover_blocks(
    const RxBlock& rx, const SymbolFrame& frame, const OfdmGrid& grid,
    const DirectOptions& opts) {
  const int n_p = opts.n_p > 0 ? opts.n_p : grid.delay_grid_size();
  Allocation alloc = Allocation::shared(frame.subcarriers, frame.n_users);
  Dictionary dict = build_direct_dictionary(frame, rx.t, alloc, grid, n_p);
  const int full_bs = dict.block_size;  // M_T K
  const int n_tx = frame.n_tx;
  const int n_users = frame.n_users;

  // Solve at per-source granularity (blocks of M_T): the true signal is
  // row-sparse inside each M_T K block, and the finer blocks keep the
  // least-squares refit overdetermined for realistic path counts.
  MmvProblem problem;
  problem.observations = rx.samples;
  problem.dictionary = dict.reblocked(n_tx);
  problem.noise_floor = rx.noise_power;

  OmpStop stop;
  stop.max_sparsity = opts.max_sparsity;
  const double expected_noise =
      std::sqrt(rx.noise_power * static_cast<double>(rx.samples.size()));
  stop.residual_frob =
      std::max(opts.residual_scale * expected_noise, 1e-8 * rx.samples.norm());
  SparseSolution sol = mmv_omp(problem, stop);

  // Reassemble full M_T K x M blocks keyed by delay bin.
  const auto m_rx = rx.samples.cols();
  std::map<int, Eigen::MatrixXcd> by_bin;
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    const int sub = sol.support[i];
    const int bin = sub / n_users;
    const int k = sub % n_users;
    auto it = by_bin.find(bin);
    if (it == by_bin.end()) {
      it = by_bin.emplace(bin, Eigen::MatrixXcd::Zero(full_bs, m_rx)).first;
    }
    it->second.middleRows(static_cast<Eigen::Index>(k) * n_tx, n_tx) = sol.coeffs[i];
  }

  std::vector<std::pair<int, Eigen::MatrixXcd>> out;
  out.reserve(by_bin.size());
  for (auto& [bin, block] : by_bin) out.emplace_back(bin, std::move(block));
  return out;
}

std::vector<std::pair<int, Eigen::MatrixXcd>> classify_source(
    const Eigen::MatrixXcd& block, int n_users, int n_tx, double power_floor) {
  if (block.rows() != static_cast<Eigen::Index>(n_users) * n_tx) {
    throw std::invalid_argument("classify_source: block row count mismatch");
  }
  std::vector<std::pair<int, Eigen::MatrixXcd>> out;
  for (int k = 0; k < n_users; ++k) {
    Eigen::MatrixXcd sub = block.middleRows(static_cast<Eigen::Index>(k) * n_tx, n_tx);
    const double mean_power = sub.squaredNorm() / static_cast<double>(sub.size());
    if (mean_power > power_floor) out.emplace_back(k, std::move(sub));
  }
  return out;
}

AngleEstimate extract_angles(const Eigen::MatrixXcd& block) {
  const auto m_tx = block.rows();
  const auto m_rx = block.cols();
  if (block.size() == 0 || block.norm() == 0.0) {
    throw std::invalid_argument("extract_angles: zero block");
  }
  if (m_rx < 2) {
    throw std::invalid_argument("extract_angles: need at least two receive antennas");
  }

  cplx col_corr{0.0, 0.0};
  for (Eigen::Index p = 0; p + 1 < m_rx; ++p) {
    col_corr += block.col(p).dot(block.col(p + 1));  // conj(col_p) . col_{p+1}
  }
  const int col_terms = static_cast<int>((m_rx - 1) * m_tx);

  AngleEstimate est;
  est.aoa_rad = clamped_asin(std::arg(col_corr) / kPi);
  est.power = std::abs(col_corr) / col_terms;

  if (m_tx >= 2) {
    cplx row_corr{0.0, 0.0};
    for (Eigen::Index q = 0; q + 1 < m_tx; ++q) {
      row_corr += block.row(q).conjugate().cwiseProduct(block.row(q + 1)).sum();
    }
    est.aod_rad = clamped_asin(std::arg(row_corr) / kPi);
  }
  return est;
}

double extract_doppler(const BlockEstimateSeries& series, int delay_bin,
                       int source, double block_period_s) {
  auto it = series.entries.find({delay_bin, source});
  if (it == series.entries.end()) {
    throw std::invalid_argument("extract_doppler: no estimates for this pair");
  }
  const auto& by_t = it->second;
  cplx corr{0.0, 0.0};
  int pairs = 0;
  for (auto cur = by_t.begin(); cur != by_t.end(); ++cur) {
    auto next = by_t.find(cur->first + 1);
    if (next == by_t.end()) continue;
    // Synthesis carries e^{+j 2 pi t f_D T_s}; correlate B_{t+1} against B_t.
    corr += next->second.cwiseProduct(cur->second.conjugate()).sum();
    ++pairs;
  }
  if (pairs == 0) {
    throw std::invalid_argument("extract_doppler: need two consecutive blocks");
  }
  return std::arg(corr) / (2.0 * kPi * block_period_s);
}

std::vector<PathEstimate> threshold_paths(const std::vector<PathEstimate>& estimates,
                                          const std::vector<double>& thresholds) {
  std::vector<PathEstimate> out;
  for (const auto& e : estimates) {
    double thr = 0.0;
    if (thresholds.size() == 1) {
      thr = thresholds[0];
    } else if (!thresholds.empty()) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(e.delay_bin),
                                             thresholds.size() - 1);
      thr = thresholds[idx];
    }
    if (e.power > thr) out.push_back(e);
  }
  return out;
}

std::vector<double> delay_power_thresholds(const OfdmGrid& grid, int n_p,
                                           double noise_ref_power, double margin_db,
                                           double pathloss_exponent,
                                           double tx_power_w, double pathloss_frac) {
  std::vector<double> thr(static_cast<std::size_t>(n_p));
  const double margin = std::pow(10.0, margin_db / 10.0);
  for (int q = 0; q < n_p; ++q) {
    double t = noise_ref_power * margin;
    if (pathloss_exponent > 0.0 && pathloss_frac > 0.0 && q > 0) {
      const double dist = q * grid.delay_resolution_s() * kSpeedOfLight;
      t = std::max(t, pathloss_frac * tx_power_w * pathloss(dist, pathloss_exponent));
    }
    thr[static_cast<std::size_t>(q)] = t;
  }
  return thr;
}

double rank1_residual_fraction(const Eigen::MatrixXcd& block) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
  const auto& s = svd.singularValues();
  const double total = s.squaredNorm();
  if (total == 0.0) return 0.0;
  return 1.0 - s(0) * s(0) / total;
}

std::vector<AngleEstimate> same_delay_spectrum(const Eigen::MatrixXcd& block,
                                               int oversample,
                                               double rel_floor_db) {
  const auto m_tx = block.rows();
  const auto m_rx = block.cols();
  if (m_tx < 2) {
    throw std::invalid_argument("same_delay_spectrum: need M_T >= 2");
  }
  const int nq = static_cast<int>(m_tx) * oversample;
  const int nm = static_cast<int>(m_rx) * oversample;

  // Zero-padded 2D DFT; entry (q, m) carries e^{j pi (q sin aod + m sin aoa)}.
  Eigen::MatrixXd power(nq, nm);
  for (int u = 0; u < nq; ++u) {
    for (int v = 0; v < nm; ++v) {
      cplx acc{0.0, 0.0};
      for (Eigen::Index q = 0; q < m_tx; ++q) {
        for (Eigen::Index m = 0; m < m_rx; ++m) {
          acc += block(q, m) * std::polar(1.0, -2.0 * kPi * (double(q) * u / nq +
                                                             double(m) * v / nm));
        }
      }
      power(u, v) = std::norm(acc);
    }
  }

  const double floor = power.maxCoeff() * std::pow(10.0, -rel_floor_db / 10.0);
  auto sin_of = [](int bin, int len) {
    double s = 2.0 * bin / len;
    if (s >= 1.0) s -= 2.0;
    return s;
  };

  std::vector<AngleEstimate> peaks;
  for (int u = 0; u < nq; ++u) {
    for (int v = 0; v < nm; ++v) {
      const double p = power(u, v);
      if (p < floor) continue;
      bool is_peak = true;
      for (int du = -1; du <= 1 && is_peak; ++du) {
        for (int dv = -1; dv <= 1; ++dv) {
          if (du == 0 && dv == 0) continue;
          const int uu = (u + du + nq) % nq;
          const int vv = (v + dv + nm) % nm;
          if (power(uu, vv) > p) {
            is_peak = false;
            break;
          }
        }
      }
      if (!is_peak) continue;
      AngleEstimate est;
      est.aoa_rad = clamped_asin(sin_of(v, nm));
      est.aod_rad = clamped_asin(sin_of(u, nq));
      est.power = p / static_cast<double>(m_tx * m_rx) /
                  static_cast<double>(m_tx * m_rx);
      peaks.push_back(est);
    }
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const AngleEstimate& a, const AngleEstimate& b) {
              return a.power > b.power;
            });
  return peaks;
}

}  // namespace pmn
