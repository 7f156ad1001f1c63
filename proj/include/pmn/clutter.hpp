#ifndef PMN_CLUTTER_HPP
#define PMN_CLUTTER_HPP

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "pmn/scene.hpp"

namespace pmn {

/// Running background (clutter) estimate: H_bar <- alpha H_bar + (1-alpha) H,
/// fed one sampled channel estimate every sample_interval_s. Single writer;
/// updates must arrive in time order.
class ClutterState {
 public:
  ClutterState(Eigen::Index rows, Eigen::Index cols, double alpha,
               double sample_interval_s);

  void update(const Eigen::MatrixXcd& channel);
  Eigen::MatrixXcd subtract(const Eigen::MatrixXcd& channel) const;

  const Eigen::MatrixXcd& background() const { return background_; }
  double alpha() const { return alpha_; }
  double sample_interval_s() const { return sample_interval_s_; }
  int updates() const { return updates_; }

  void save(const std::string& path) const;
  static ClutterState load(const std::string& path);

 private:
  Eigen::MatrixXcd background_;
  double alpha_;
  double sample_interval_s_;
  int updates_ = 0;
};

/// Closed-form background response to a pure Doppler phasor exp(j 2 pi f_D T_h i),
/// i = 1..p, zero initial state:
///   rho(p) = (1-alpha) e^{jx} (e^{jxp} - alpha^p) / (e^{jx} - alpha),
/// x = 2 pi f_D T_h. Reduces to 1 - alpha^p at f_D = 0.
std::complex<double> rho_closed_form(double alpha, double doppler_hz,
                                     double sample_interval_s, int p);

/// Residual noise variance after p recursions of AWGN of variance sigma2:
/// sigma2 (1-alpha)^2 (1-alpha^{2p}) / (1-alpha^2).
double residual_noise_var(double sigma2, double alpha, int p);

/// Diagnostic: dB ratio of background energy on the true clutter component to
/// the remaining leakage. Capped at +-300 dB.
double clutter_power_ratio(const ClutterState& state,
                           const Eigen::MatrixXcd& true_clutter);

}  // namespace pmn

#endif  // PMN_CLUTTER_HPP
