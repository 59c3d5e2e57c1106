#pragma once

namespace realopt {

// Continuous-time two-factor market. S is the traded asset, V the project;
// both are expressed in units of the riskless cash account.
struct MarketParams {
  double mu1 = 0.115;    // expected return of the traded asset
  double sigma1 = 0.25;  // volatility of the traded asset
  double mu2 = 0.0;      // expected return of the project
  double sigma2 = 0.2;   // project volatility
  double rho = 0.0;      // correlation between the two Brownian drivers
  double r = 0.04;       // riskless rate
  double s0 = 1.0;
  double v0 = 1.0;

  // Throws ConfigError naming the first offending field.
  void validate() const;
};

// One-period joint binomial step. States are ordered
//   1: (uS, hV)   2: (uS, lV)   3: (dS, hV)   4: (dS, lV).
struct LatticeCalibration {
  double u = 0.0;
  double d = 0.0;
  double h = 0.0;
  double l = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  double q = 0.0;  // (1 - d) / (u - d)
  double dt = 0.0;
};

// Matches E[S1/S0], E[V1/V0] and Cov(S1/S0, V1/V0) exactly, variances to O(dt).
// Throws CalibrationInfeasible when any probability leaves (0, 1).
LatticeCalibration calibrate(const MarketParams& market, double dt);

struct MomentReport {
  double mean_s = 0.0;
  double mean_v = 0.0;
  double cov_sv = 0.0;
  double var_s = 0.0;
  double var_v = 0.0;
  double target_mean_s = 0.0;
  double target_mean_v = 0.0;
  double target_cov_sv = 0.0;
  double target_var_s = 0.0;  // sigma1^2 dt, matched only to leading order
  double target_var_v = 0.0;

  double mean_s_error() const { return mean_s - target_mean_s; }
  double mean_v_error() const { return mean_v - target_mean_v; }
  double cov_error() const { return cov_sv - target_cov_sv; }
};

// Exact one-period moments computed over the four states.
MomentReport verify_moments(const LatticeCalibration& cal, const MarketParams& market);

// r + rho * (mu1 - r) / sigma1 * sigma2. Ignores market.mu2.
double capm_equilibrium_rate(const MarketParams& market);

// Project drift giving a below-equilibrium shortfall of `delta`. Ignores market.mu2.
double mu2_from_shortfall(const MarketParams& market, double delta);

}  // namespace realopt
