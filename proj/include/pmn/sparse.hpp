#ifndef PMN_SPARSE_HPP
#define PMN_SPARSE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pmn/waveform.hpp"

namespace pmn {

/// Sensing dictionary. Columns come in contiguous blocks of block_size;
/// delay_bins maps each block to its quantized delay index.
struct Dictionary {
  Eigen::MatrixXcd matrix;
  int block_size = 1;
  std::vector<int> delay_bins;

  int n_blocks() const { return static_cast<int>(matrix.cols()) / block_size; }

  /// Reinterprets the same columns with a finer block granularity.
  Dictionary reblocked(int new_block_size) const;
};

struct MmvProblem {
  Eigen::MatrixXcd observations;  // N_u x M_obs
  Dictionary dictionary;
  double noise_floor = 0.0;  // per-entry noise power of the observations
};

struct SparseSolution {
  std::vector<int> support;                // ascending block indexes
  std::vector<Eigen::MatrixXcd> coeffs;    // block_size x M_obs per block
  std::vector<double> block_power;         // mean |.|^2 per block
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Partial DFT dictionary: column q has entries exp(-j 2 pi n q / (gN)),
/// n over the allocated subcarriers. block_size = 1.
Dictionary build_partial_dft(const Allocation& alloc, const OfdmGrid& grid, int n_p);

/// Direct-scheme dictionary for one OFDM block: row n equals
/// x_{n,t}^T (c_n^T kron I_{M_T K}); block_size = M_T K.
Dictionary build_direct_dictionary(const SymbolFrame& frame, int t,
                                   const Allocation& alloc, const OfdmGrid& grid,
                                   int n_p);

struct OmpStop {
  int max_sparsity = 0;        // 0 -> capped by problem size
  double residual_frob = 0.0;  // stop when ||R||_F falls below this
};

/// Greedy block-MMV matching pursuit with least-squares refit per iteration.
/// Block selection maximizes ||Phi_b^H R||_F / ||Phi_b||_F; ties go to the
/// lowest block index.
SparseSolution mmv_omp(const MmvProblem& problem, const OmpStop& stop);

struct SblOptions {
  int max_iters = 200;
  double prune_rel = 1e-4;   // drop blocks below this fraction of max gamma
  double converge_tol = 1e-6;
};

/// Block-sparse Bayesian learning (MMV): per-block variance hyperparameters
/// fitted by evidence maximization, pruned blocks removed, posterior-mean
/// coefficients returned for the survivors.
SparseSolution block_sbl(const MmvProblem& problem, const SblOptions& opts = {});

/// Residual Y - Phi_S C for a candidate solution (diagnostic).
Eigen::MatrixXcd solution_residual(const MmvProblem& problem,
                                   const SparseSolution& sol);

}  // namespace pmn

#endif  // PMN_SPARSE_HPP
