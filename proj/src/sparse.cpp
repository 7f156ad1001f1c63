#include "pmn/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Dictionary Dictionary::reblocked(int new_block_size) const {
  if (new_block_size <= 0 || block_size % new_block_size != 0) {
    throw std::invalid_argument("reblocked: incompatible block size");
  }
  Dictionary out;
  out.matrix = matrix;
  out.block_size = new_block_size;
  const int ratio = block_size / new_block_size;
  out.delay_bins.reserve(delay_bins.size() * static_cast<std::size_t>(ratio));
  for (int bin : delay_bins) {
    for (int i = 0; i < ratio; ++i) out.delay_bins.push_back(bin);
  }
  return out;
}

Dictionary build_partial_dft(const Allocation& alloc, const OfdmGrid& grid, int n_p) {
  if (n_p > grid.delay_grid_size()) {
    throw std::invalid_argument("build_partial_dft: N_p exceeds gN");
  }
  const auto subcarriers = alloc.merged();
  const auto n_u = static_cast<Eigen::Index>(subcarriers.size());
  const double gn = grid.delay_grid_size();
  Dictionary dict;
  dict.block_size = 1;
  dict.matrix.resize(n_u, n_p);
  dict.delay_bins.resize(static_cast<std::size_t>(n_p));
  for (int q = 0; q < n_p; ++q) {
    dict.delay_bins[static_cast<std::size_t>(q)] = q;
    for (Eigen::Index r = 0; r < n_u; ++r) {
      const double n = subcarriers[static_cast<std::size_t>(r)];
      dict.matrix(r, q) = std::polar(1.0, -2.0 * kPi * n * q / gn);
    }
  }
  return dict;
}

Dictionary build_direct_dictionary(const SymbolFrame& frame, int t,
                                   const Allocation& alloc, const OfdmGrid& grid,
                                   int n_p) {
  if (n_p > grid.delay_grid_size()) {
    throw std::invalid_argument("build_direct_dictionary: N_p exceeds gN");
  }
  const auto subcarriers = alloc.merged();
  if (subcarriers != frame.subcarriers) {
    throw std::invalid_argument(
        "build_direct_dictionary: frame does not cover the allocation");
  }
  const auto& x = frame.blocks.at(static_cast<std::size_t>(t));
  const auto n_u = static_cast<Eigen::Index>(subcarriers.size());
  const Eigen::Index width = x.cols();  // M_T K
  const double gn = grid.delay_grid_size();

  Dictionary dict;
  dict.block_size = static_cast<int>(width);
  dict.matrix.resize(n_u, static_cast<Eigen::Index>(n_p) * width);
  dict.delay_bins.resize(static_cast<std::size_t>(n_p));
  for (int q = 0; q < n_p; ++q) {
    dict.delay_bins[static_cast<std::size_t>(q)] = q;
    for (Eigen::Index r = 0; r < n_u; ++r) {
      const double n = subcarriers[static_cast<std::size_t>(r)];
      const cplx c = std::polar(1.0, -2.0 * kPi * n * q / gn);
      dict.matrix.row(r).segment(static_cast<Eigen::Index>(q) * width, width) =
          c * x.row(r);
    }
  }
  return dict;
}

SparseSolution mmv_omp(const MmvProblem& problem, const OmpStop& stop) {
  const auto& phi = problem.dictionary.matrix;
  const int bs = problem.dictionary.block_size;
  const auto n_u = phi.rows();
  const int n_blocks = problem.dictionary.n_blocks();
  const auto& y = problem.observations;
  if (y.rows() != n_u) {
    throw std::invalid_argument("mmv_omp: observation/dictionary row mismatch");
  }

  // LS refit needs at most N_u active columns.
  int max_sparsity = stop.max_sparsity > 0 ? stop.max_sparsity : n_blocks;
  max_sparsity = std::min<int>(max_sparsity, static_cast<int>(n_u) / bs);

  std::vector<double> block_norm(static_cast<std::size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b) {
    block_norm[static_cast<std::size_t>(b)] =
        phi.middleCols(static_cast<Eigen::Index>(b) * bs, bs).norm();
  }

  SparseSolution sol;
  Eigen::MatrixXcd residual = y;
  std::vector<bool> selected(static_cast<std::size_t>(n_blocks), false);
  std::vector<int> order;  // selection order
  Eigen::MatrixXcd coeffs;

  const double y_norm = y.norm();
  if (y_norm == 0.0) return sol;

  while (static_cast<int>(order.size()) < max_sparsity &&
         residual.norm() > stop.residual_frob) {
    int best = -1;
    double best_score = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
      if (selected[static_cast<std::size_t>(b)]) continue;
      const double nb = block_norm[static_cast<std::size_t>(b)];
      if (nb <= 0.0) continue;
      const double score =
          (phi.middleCols(static_cast<Eigen::Index>(b) * bs, bs).adjoint() * residual)
              .norm() /
          nb;
      if (score > best_score) {  // ties keep the lowest index
        best_score = score;
        best = b;
      }
    }
    if (best < 0 || best_score <= 1e-14 * y_norm) {
      if (order.empty()) {
        throw SolverFailure("mmv_omp: residual stagnated before any selection");
      }
      break;
    }
    selected[static_cast<std::size_t>(best)] = true;
    order.push_back(best);

    Eigen::MatrixXcd phi_s(n_u, static_cast<Eigen::Index>(order.size()) * bs);
    for (std::size_t i = 0; i < order.size(); ++i) {
      phi_s.middleCols(static_cast<Eigen::Index>(i) * bs, bs) =
          phi.middleCols(static_cast<Eigen::Index>(order[i]) * bs, bs);
    }
    coeffs = phi_s.colPivHouseholderQr().solve(y);
    residual = y - phi_s * coeffs;
  }

  std::vector<std::size_t> idx(order.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
  for (std::size_t i : idx) {
    sol.support.push_back(order[i]);
    Eigen::MatrixXcd c = coeffs.middleRows(static_cast<Eigen::Index>(i) * bs, bs);
    sol.block_power.push_back(c.squaredNorm() / static_cast<double>(c.size()));
    sol.coeffs.push_back(std::move(c));
  }
  return sol;
}

SparseSolution block_sbl(const MmvProblem& problem, const SblOptions& opts) {
  const auto& phi_full = problem.dictionary.matrix;
  const int bs = problem.dictionary.block_size;
  const auto n_u = phi_full.rows();
  const int n_blocks = problem.dictionary.n_blocks();
  const auto& y = problem.observations;
  const auto m_obs = y.cols();
  if (y.rows() != n_u) {
    throw std::invalid_argument("block_sbl: observation/dictionary row mismatch");
  }

  SparseSolution sol;
  const double y_power = y.squaredNorm() / static_cast<double>(y.size());
  if (y_power == 0.0) return sol;

  const double lambda = std::max(problem.noise_floor, 1e-10 * y_power);

  std::vector<int> active(static_cast<std::size_t>(n_blocks));
  std::iota(active.begin(), active.end(), 0);
  Eigen::VectorXd gamma = Eigen::VectorXd::Constant(n_blocks, y_power);

  Eigen::MatrixXcd mu;  // coefficients of the active set, updated in place
  bool converged = false;
  for (int iter = 0; iter < opts.max_iters && !converged; ++iter) {
    const auto n_act = static_cast<Eigen::Index>(active.size());
    if (n_act == 0) break;

    Eigen::MatrixXcd phi(n_u, n_act * bs);
    Eigen::VectorXd g_coef(n_act * bs);
    for (Eigen::Index i = 0; i < n_act; ++i) {
      phi.middleCols(i * bs, bs) = phi_full.middleCols(
          static_cast<Eigen::Index>(active[static_cast<std::size_t>(i)]) * bs, bs);
      g_coef.segment(i * bs, bs).setConstant(gamma(active[static_cast<std::size_t>(i)]));
    }

    // Woodbury form keeps the inversion at N_u x N_u.
    Eigen::MatrixXcd b_mat = lambda * Eigen::MatrixXcd::Identity(n_u, n_u);
    b_mat.noalias() += phi * g_coef.asDiagonal() * phi.adjoint();
    Eigen::LLT<Eigen::MatrixXcd> llt(b_mat);

    const Eigen::MatrixXcd binv_y = llt.solve(y);
    const Eigen::MatrixXcd binv_phi = llt.solve(phi);
    mu = g_coef.asDiagonal() * (phi.adjoint() * binv_y);

    double max_gamma = 0.0;
    Eigen::VectorXd gamma_new = gamma;
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < n_act; ++i) {
      const int b = active[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (int d = 0; d < bs; ++d) {
        const Eigen::Index col = i * bs + d;
        const double g = g_coef(col);
        const double q = (phi.col(col).adjoint() * binv_phi.col(col)).real()(0, 0);
        const double sigma_ii = std::max(0.0, g - g * g * q);
        acc += mu.row(col).squaredNorm() / static_cast<double>(m_obs) + sigma_ii;
      }
      gamma_new(b) = acc / bs;
      max_gamma = std::max(max_gamma, gamma_new(b));
      max_change = std::max(max_change, std::abs(gamma_new(b) - gamma(b)));
    }
    gamma = gamma_new;
    converged = max_change < opts.converge_tol * std::max(max_gamma, 1e-300);

    std::vector<int> survivors;
    survivors.reserve(active.size());
    for (int b : active) {
      if (gamma(b) >= opts.prune_rel * max_gamma) survivors.push_back(b);
    }
    if (survivors.size() != active.size()) {
      active = std::move(survivors);
      converged = false;
      // mu no longer matches the active set; recompute on the next pass.
      if (active.empty()) return sol;
      continue;
    }
  }
  // Non-convergence falls through with the best iterate.

  // Posterior mean of the final active set.
  {
    const auto n_act = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXcd phi(n_u, n_act * bs);
    Eigen::VectorXd g_coef(n_act * bs);
    for (Eigen::Index i = 0; i < n_act; ++i) {
      phi.middleCols(i * bs, bs) = phi_full.middleCols(
          static_cast<Eigen::Index>(active[static_cast<std::size_t>(i)]) * bs, bs);
      g_coef.segment(i * bs, bs).setConstant(gamma(active[static_cast<std::size_t>(i)]));
    }
    Eigen::MatrixXcd b_mat = lambda * Eigen::MatrixXcd::Identity(n_u, n_u);
    b_mat.noalias() += phi * g_coef.asDiagonal() * phi.adjoint();
    mu = g_coef.asDiagonal() * (phi.adjoint() * Eigen::LLT<Eigen::MatrixXcd>(b_mat).solve(y));

    for (Eigen::Index i = 0; i < n_act; ++i) {
      sol.support.push_back(active[static_cast<std::size_t>(i)]);
      Eigen::MatrixXcd c = mu.middleRows(i * bs, bs);
      sol.block_power.push_back(c.squaredNorm() / static_cast<double>(c.size()));
      sol.coeffs.push_back(std::move(c));
    }
  }
  return sol;
}

Eigen::MatrixXcd solution_residual(const MmvProblem& problem,
                                   const SparseSolution& sol) {
  Eigen::MatrixXcd r = problem.observations;
  const int bs = problem.dictionary.block_size;
  for (std::size_t i = 0; i < sol.support.size(); ++i) {
    r.noalias() -= problem.dictionary.matrix.middleCols(
                       static_cast<Eigen::Index>(sol.support[i]) * bs, bs) *
                   sol.coeffs[i];
  }
  return r;
}

}  // namespace pmn
