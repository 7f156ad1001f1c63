#ifndef PMN_INDIRECT_HPP
#define PMN_INDIRECT_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pmn/direct.hpp"
#include "pmn/sparse.hpp"

namespace pmn {

/// Reconstructed per-user channel for one OFDM block: exact channel plus
/// AWGN reconstruction error at the configured channel-to-error ratio.
struct ReconChannel {
  std::vector<Eigen::MatrixXcd> per_subcarrier;  // M x M_T, ordered like alloc
  std::vector<int> subcarriers;
  double sir_db = 0.0;  // +inf -> exact
  int user = 0;
  double t = 0.0;  // block index (fractional allowed)
};

/// Row-sparse delay estimates: per supported bin, the stacked
/// (h_1^T, ..., h_{M_T}^T) coefficient row of length M_T * M.
struct GEstimate {
  std::vector<int> support;
  std::vector<Eigen::RowVectorXcd> rows;
  double t = 0.0;
};

/// Evaluates the true channel over all allocated subcarriers and adds complex
/// AWGN sized so mean channel power / error power = 10^(eta/10). Infinite
/// eta gives the exact channel.
ReconChannel reconstruct_channel(const std::vector<PathParams>& link, double t,
                                 const OfdmGrid& grid, const Allocation& alloc,
                                 const UlaConfig& rx, const UlaConfig& tx,
                                 double eta_db, std::uint64_t seed);

/// Stacks transposed channel columns into N_u x (M_T M) observations over a
/// partial-DFT dictionary (block size 1).
MmvProblem build_stripped_mmv(const ReconChannel& recon, const OfdmGrid& grid,
                              int n_p);

struct IndirectOptions {
  int n_p = 0;
  int max_sparsity = 0;
  double residual_scale = 1.0;
  double power_floor_db = 25.0;  // bins this far below the max are dropped
};

GEstimate solve_stripped(const MmvProblem& problem, const IndirectOptions& opts);

/// Per-bin AoA/AoD/power from the structured coefficient rows:
/// angle(eps_l) = pi sin(aoa), angle(xi_l) = pi sin(aod), power = |eps_l|.
std::vector<PathEstimate> estimate_paths(const GEstimate& g, const OfdmGrid& grid,
                                         int m_rx, int m_tx,
                                         double power_floor_db = 25.0);

/// Doppler for bins shared between two G estimates spaced T blocks apart:
/// 2 pi f_D T_s = angle(row_{t+T} row_t^H) / T. Unambiguous within
/// +-1/(2 T T_s).
std::vector<std::pair<int, double>> estimate_doppler_pair(const GEstimate& g_t,
                                                          const GEstimate& g_later,
                                                          int spacing_blocks,
                                                          const OfdmGrid& grid);

}  // namespace pmn

#endif  // PMN_INDIRECT_HPP
