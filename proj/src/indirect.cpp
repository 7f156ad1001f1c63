#include "pmn/indirect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ReconChannel reconstruct_channel(const std::vector<PathParams>& link, double t,
                                 const OfdmGrid& grid, const Allocation& alloc,
                                 const UlaConfig& rx, const UlaConfig& tx,
                                 double eta_db, std::uint64_t seed) {
  ReconChannel recon;
  recon.subcarriers = alloc.merged();
  recon.sir_db = eta_db;
  recon.t = t;
  recon.per_subcarrier.reserve(recon.subcarriers.size());

  double total_power = 0.0;
  long total_entries = 0;
  for (int n : recon.subcarriers) {
    Eigen::MatrixXcd h = freq_channel(link, n, t, grid, rx, tx);
    total_power += h.squaredNorm();
    total_entries += h.size();
    recon.per_subcarrier.push_back(std::move(h));
  }

  if (std::isfinite(eta_db) && total_entries > 0 && total_power > 0.0) {
    const double mean_power = total_power / static_cast<double>(total_entries);
    const double err_power = mean_power / std::pow(10.0, eta_db / 10.0);
    std::mt19937_64 rng(seed);
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
}

MmvProblem build_stripped_mmv(const ReconChannel& recon, const OfdmGrid& grid,
                              int n_p) {
  if (recon.per_subcarrier.empty()) {
    throw std::invalid_argument("build_stripped_mmv: empty channel");
  }
  const auto m_rx = recon.per_subcarrier.front().rows();
  const auto m_tx = recon.per_subcarrier.front().cols();
  const auto n_u = static_cast<Eigen::Index>(recon.subcarriers.size());

  MmvProblem problem;
  problem.observations.resize(n_u, m_tx * m_rx);
  for (Eigen::Index r = 0; r < n_u; ++r) {
    const auto& h = recon.per_subcarrier[static_cast<std::size_t>(r)];
    for (Eigen::Index m = 0; m < m_tx; ++m) {
      problem.observations.row(r).segment(m * m_rx, m_rx) = h.col(m).transpose();
    }
  }

  Allocation alloc = Allocation::shared(recon.subcarriers, 1);
  problem.dictionary = build_partial_dft(alloc, grid, n_p);

  if (std::isfinite(recon.sir_db)) {
    double mean_power = 0.0;
    for (const auto& h : recon.per_subcarrier) mean_power += h.squaredNorm();
    mean_power /= static_cast<double>(n_u * m_rx * m_tx);
    // Observation noise is the reconstruction error; the channel part of the
    // mean power dominates at the SIRs of interest.
    problem.noise_floor =
        mean_power / (1.0 + std::pow(10.0, recon.sir_db / 10.0));
  }
  return problem;
}

GEstimate solve_stripped(const MmvProblem& problem, const IndirectOptions& opts) {
  OmpStop stop;
  stop.max_sparsity = opts.max_sparsity > 0
                          ? opts.max_sparsity
                          : static_cast<int>(problem.observations.rows()) / 4;
  const double expected_noise = std::sqrt(
      problem.noise_floor * static_cast<double>(problem.observations.size()));
  stop.residual_frob = std::max(opts.residual_scale * expected_noise,
                                1e-8 * problem.observations.norm());
  SparseSolution sol = mmv_omp(problem, stop);

  GEstimate g;
  g.support = sol.support;
  g.rows.reserve(sol.coeffs.size());
  for (const auto& c : sol.coeffs) g.rows.emplace_back(c.row(0));
  return g;
}

std::vector<PathEstimate> estimate_paths(const GEstimate& g, const OfdmGrid& grid,
                                         int m_rx, int m_tx, double power_floor_db) {
  std::vector<PathEstimate> out;
  if (g.support.empty()) return out;

  std::vector<cplx> eps(g.support.size());
  std::vector<cplx> xi(g.support.size());
  double max_power = 0.0;
  for (std::size_t i = 0; i < g.support.size(); ++i) {
    const auto& row = g.rows[i];
    if (row.size() != static_cast<Eigen::Index>(m_rx) * m_tx) {
      throw std::invalid_argument("estimate_paths: row length mismatch");
    }
    cplx e{0.0, 0.0};
    for (int k = 0; k < m_tx; ++k) {
      for (int p = 0; p + 1 < m_rx; ++p) {
        e += std::conj(row(k * m_rx + p)) * row(k * m_rx + p + 1);
      }
    }
    e /= static_cast<double>(m_tx * (m_rx - 1));
    eps[i] = e;
    max_power = std::max(max_power, std::abs(e));

    if (m_tx >= 2) {
      cplx x{0.0, 0.0};
      for (int p = 0; p < (m_tx - 1) * m_rx; ++p) {
        x += std::conj(row(p)) * row(p + m_rx);
      }
      xi[i] = x / static_cast<double>((m_tx - 1) * m_rx);
    }
  }

  const double floor = max_power * std::pow(10.0, -power_floor_db / 10.0);
  for (std::size_t i = 0; i < g.support.size(); ++i) {
    const double power = std::abs(eps[i]);
    if (power < floor) continue;
    PathEstimate est;
    est.delay_bin = g.support[i];
    est.delay_s = est.delay_bin * grid.delay_resolution_s();
    est.aoa_rad = std::asin(std::clamp(std::arg(eps[i]) / kPi, -1.0, 1.0));
    if (m_tx >= 2) {
      est.aod_rad = std::asin(std::clamp(std::arg(xi[i]) / kPi, -1.0, 1.0));
    }
    est.power = power;
    out.push_back(est);
  }
  return out;
}

std::vector<std::pair<int, double>> estimate_doppler_pair(const GEstimate& g_t,
                                                          const GEstimate& g_later,
                                                          int spacing_blocks,
                                                          const OfdmGrid& grid) {
  std::vector<std::pair<int, double>> out;
  const double ts = grid.block_period_s();
  for (std::size_t i = 0; i < g_t.support.size(); ++i) {
    const int bin = g_t.support[i];
    auto it = std::find(g_later.support.begin(), g_later.support.end(), bin);
    if (it == g_later.support.end()) continue;
    const auto j = static_cast<std::size_t>(it - g_later.support.begin());
    const cplx corr = (g_later.rows[j] * g_t.rows[i].adjoint())(0, 0);
    const double f_d = std::arg(corr) / (2.0 * kPi * spacing_blocks * ts);
    out.emplace_back(bin, f_d);
  }
  return out;
}

}  // namespace pmn
