#pragma once

#include <string>

namespace fpaudit {

// Calibration constants measured once by tools/calibrate and frozen in
// config/calibration.json. None of these are asserted as ground truth; they
// are Monte-Carlo artifacts of the recorded calibration run.
struct Calibration {
  // Hanson-Wright tail constant used by the tail checker.
  double hanson_wright_c1 = 0.125;

  // Prior smallest-eigenvalue floor: P(lambda_min(Sigma) >= c) >= 2/3 at the
  // recorded dimension.
  int prior_lambda_min_d = 8;
  double prior_lambda_min_c = 0.0;

  // DP covariance mechanism accuracy point: at (d, n, eps, delta, radius),
  // P(||M(X) - Sigma||_F <= gamma) >= 2/3 under the prior.
  struct DpCov {
    int d = 8;
    int n = 512;
    double epsilon = 1.0;
    double delta = 1e-6;
    double radius = 12.0;
    double gamma = 0.0;
  } dp_cov;

  // DP mean mechanism accuracy point (same shape).
  struct DpMean {
    int d = 8;
    int n = 4000;
    double epsilon = 1.0;
    double delta = 1e-6;
    double radius = 6.0;
    double alpha = 0.0;
  } dp_mean;

  // Shrinkage-calibrated DP covariance mechanism: signal power
  // S = E||R^2 Sigma_hat_Y - prior mean||_F^2 at the recorded (d, n, radius);
  // the mechanism shrinks toward the prior mean with weight S / (S + N(eps)),
  // N(eps) the expected squared Frobenius norm of its noise.
  struct Shrunk {
    int d = 8;
    int n = 512;
    double delta = 1e-6;
    double radius = 12.0;
    double signal_power = 0.0;
  } shrunk;

  // DP-implied per-sample ceiling constant: the tension flag fires when
  // mean (1/n) sum Z_i exceeds C * gamma * eps by more than 4 SE.
  double attack_ceiling_c = 0.0;
};

// Loads the JSON calibration file; throws on missing file or fields.
Calibration load_calibration(const std::string& path);

// Default path baked at configure time (config/calibration.json in the
// source tree).
std::string default_calibration_path();

void save_calibration(const Calibration& c, const std::string& path);

}  // namespace fpaudit
