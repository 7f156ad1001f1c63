#include "pmn/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace pmn {

std::vector<int> Allocation::merged() const {
  std::set<int> s;
  for (const auto& u : user_sets) s.insert(u.begin(), u.end());
  return {s.begin(), s.end()};
}

Allocation Allocation::full(int n_subcarriers, int n_users) {
  std::vector<int> all(static_cast<std::size_t>(n_subcarriers));
  for (int n = 0; n < n_subcarriers; ++n) all[static_cast<std::size_t>(n)] = n;
  return shared(std::move(all), n_users);
}

Allocation Allocation::shared(std::vector<int> indexes, int n_users) {
  Allocation a;
  a.user_sets.assign(static_cast<std::size_t>(n_users), indexes);
  return a;
}

SymbolFrame gen_symbols(const Allocation& alloc, const OfdmGrid& grid, int n_users,
                        int n_tx, Constellation constellation, std::uint64_t seed,
                        int n_blocks) {
  if (n_users < 1 || n_tx < 1) {
    throw std::invalid_argument("gen_symbols: need at least one user and antenna");
  }
  SymbolFrame frame;
  frame.subcarriers = alloc.merged();
  if (frame.subcarriers.empty()) {
    throw std::invalid_argument("gen_symbols: empty allocation");
  }
  for (int n : frame.subcarriers) {
    if (n < 0 || n >= grid.n_subcarriers) {
      throw std::invalid_argument("gen_symbols: subcarrier index out of range");
    }
  }
  frame.n_users = n_users;
  frame.n_tx = n_tx;
  frame.constellation = constellation;
  frame.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> bit(0, 1);
  const auto n_u = static_cast<Eigen::Index>(frame.subcarriers.size());
  const Eigen::Index width = static_cast<Eigen::Index>(n_users) * n_tx;
  const double scale = 1.0 / std::sqrt(2.0);
  for (int t = 0; t < n_blocks; ++t) {
    Eigen::MatrixXcd x(n_u, width);
    for (Eigen::Index r = 0; r < n_u; ++r) {
      for (Eigen::Index c = 0; c < width; ++c) {
        const double re = bit(rng) ? scale : -scale;
        const double im = bit(rng) ? scale : -scale;
        x(r, c) = cplx(re, im);
      }
    }
    frame.blocks.push_back(std::move(x));
  }
  return frame;
}

RxBlock receive(const Scene& scene, const SymbolFrame& frame, int t,
                const OfdmGrid& grid, const Allocation& alloc,
                const UlaConfig& rx_cfg, double noise_power,
                std::uint64_t noise_seed) {
  const int n_users = frame.n_users;
  const int n_tx = frame.n_tx;
  if (scene.links.size() != static_cast<std::size_t>(n_users)) {
    throw std::invalid_argument("receive: scene/frame source count mismatch");
  }
  if (t < 0 || t >= static_cast<int>(frame.blocks.size())) {
    throw std::invalid_argument("receive: block index out of range");
  }
  const auto& x = frame.blocks[static_cast<std::size_t>(t)];
  const auto n_u = static_cast<Eigen::Index>(frame.subcarriers.size());
  if (x.rows() != n_u || x.cols() != static_cast<Eigen::Index>(n_users) * n_tx) {
    throw std::invalid_argument("receive: frame dimensions inconsistent");
  }
  (void)alloc;

  const UlaConfig tx_cfg{n_tx};
  RxBlock out;
  out.t = t;
  out.noise_power = noise_power;
  out.samples = Eigen::MatrixXcd::Zero(n_u, rx_cfg.elements);

  for (Eigen::Index row = 0; row < n_u; ++row) {
    const int n = frame.subcarriers[static_cast<std::size_t>(row)];
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(rx_cfg.elements);
    for (int k = 0; k < n_users; ++k) {
      const Eigen::MatrixXcd h = freq_channel(
          scene.links[static_cast<std::size_t>(k)], n, t, grid, rx_cfg, tx_cfg);
      y.noalias() +=
          h * x.row(row).segment(static_cast<Eigen::Index>(k) * n_tx, n_tx).transpose();
    }
    out.samples.row(row) = y.transpose();
  }

  if (noise_power > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> nd(0.0, std::sqrt(noise_power / 2.0));
    for (Eigen::Index r = 0; r < out.samples.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.samples.cols(); ++c) {
        out.samples(r, c) += cplx(nd(rng), nd(rng));
      }
    }
  }
  return out;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double thermal_noise_power(const OfdmGrid& grid) {
  if (grid.bandwidth_hz <= 0.0) {
    throw std::invalid_argument("thermal_noise_power: bandwidth must be positive");
  }
  const double dbm = -174.0 + 10.0 * std::log10(grid.bandwidth_hz);
  return dbm_to_watts(dbm);
}

int quantize_delay(double tau_s, const OfdmGrid& grid, int n_p) {
  if (tau_s < 0.0) {
    throw std::invalid_argument("quantize_delay: negative delay");
  }
  const long bin = std::lround(tau_s * grid.grid_factor * grid.bandwidth_hz);
  if (bin >= n_p) {
    throw std::invalid_argument("quantize_delay: delay beyond dictionary span");
  }
  return static_cast<int>(bin);
}

std::vector<int> nr_type_b_indexes(int n_total) {
  if (n_total % 12 != 0) {
    throw std::invalid_argument("nr_type_b_indexes: total not divisible by 12");
  }
  static const int kComb[4] = {3, 4, 9, 10};
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n_total) / 3);
  for (int rb = 0; rb < n_total / 12; ++rb) {
    for (int c : kComb) out.push_back(rb * 12 + c);
  }
  return out;
}

}  // namespace pmn
