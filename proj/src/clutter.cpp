#include "pmn/clutter.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pmn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ClutterState::ClutterState(Eigen::Index rows, Eigen::Index cols, double alpha,
                           double sample_interval_s)
    : background_(Eigen::MatrixXcd::Zero(rows, cols)),
      alpha_(alpha),
      sample_interval_s_(sample_interval_s) {
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("ClutterState: alpha must lie in (0, 1)");
  }
  if (sample_interval_s <= 0.0) {
    throw std::invalid_argument("ClutterState: sample interval must be positive");
  }
}

void ClutterState::update(const Eigen::MatrixXcd& channel) {
  if (channel.rows() != background_.rows() || channel.cols() != background_.cols()) {
    throw std::invalid_argument("ClutterState::update: shape mismatch");
  }
  background_ = alpha_ * background_ + (1.0 - alpha_) * channel;
  ++updates_;
}

Eigen::MatrixXcd ClutterState::subtract(const Eigen::MatrixXcd& channel) const {
  if (updates_ < 1) {
    throw std::logic_error("ClutterState::subtract: no updates applied yet");
  }
  if (channel.rows() != background_.rows() || channel.cols() != background_.cols()) {
    throw std::invalid_argument("ClutterState::subtract: shape mismatch");
  }
  return channel - background_;
}

std::complex<double> rho_closed_form(double alpha, double doppler_hz,
                                     double sample_interval_s, int p) {
  if (p < 1) throw std::invalid_argument("rho_closed_form: p must be >= 1");
  const double x = 2.0 * kPi * doppler_hz * sample_interval_s;
  const std::complex<double> e = std::polar(1.0, x);
  const std::complex<double> ep = std::polar(1.0, x * p);
  return (1.0 - alpha) * e * (ep - std::pow(alpha, p)) / (e - alpha);
}

double residual_noise_var(double sigma2, double alpha, int p) {
  if (p < 1) throw std::invalid_argument("residual_noise_var: p must be >= 1");
  const double a2 = alpha * alpha;
  return sigma2 * (1.0 - alpha) * (1.0 - alpha) * (1.0 - std::pow(a2, p)) /
         (1.0 - a2);
}

double clutter_power_ratio(const ClutterState& state,
                           const Eigen::MatrixXcd& true_clutter) {
  const auto& bg = state.background();
  const double c_norm2 = true_clutter.squaredNorm();
  if (c_norm2 == 0.0) return -300.0;
  const std::complex<double> coeff =
      (true_clutter.conjugate().cwiseProduct(bg)).sum() / c_norm2;
  const double clutter_energy = std::norm(coeff) * c_norm2;
  const double leakage = (bg - coeff * true_clutter).squaredNorm();
  if (clutter_energy <= leakage * 1e-30) return -300.0;
  if (leakage <= clutter_energy * 1e-30) return 300.0;
  return 10.0 * std::log10(clutter_energy / leakage);
}

void ClutterState::save(const std::string& path) const {
  nlohmann::json j;
  j["alpha"] = alpha_;
  j["sample_interval_s"] = sample_interval_s_;
  j["updates"] = updates_;
  j["rows"] = background_.rows();
  j["cols"] = background_.cols();
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index r = 0; r < background_.rows(); ++r) {
    for (Eigen::Index c = 0; c < background_.cols(); ++c) {
      data.push_back(background_(r, c).real());
      data.push_back(background_(r, c).imag());
    }
  }
  j["background"] = std::move(data);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("ClutterState::save: cannot open " + path);
  out << j.dump();
}

ClutterState ClutterState::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ClutterState::load: cannot open " + path);
  nlohmann::json j;
  in >> j;
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  ClutterState state(rows, cols, j.at("alpha").get<double>(),
                     j.at("sample_interval_s").get<double>());
  state.updates_ = j.at("updates").get<int>();
  const auto& data = j.at("background");
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      state.background_(r, c) = {data.at(idx).get<double>(),
                                 data.at(idx + 1).get<double>()};
      idx += 2;
    }
  }
  return state;
}

}  // namespace pmn
