#include "realopt/calibration.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "realopt/errors.hpp"

namespace realopt {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) {
    throw ConfigError(std::string(field) + ": " + what);
  }
}

bool in_open_unit(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

void MarketParams::validate() const {
  require(std::isfinite(mu1), "mu1", "must be finite");
  require(std::isfinite(mu2), "mu2", "must be finite");
  require(std::isfinite(r), "r", "must be finite");
  require(std::isfinite(sigma1) && sigma1 > 0.0, "sigma1", "must be > 0");
  require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2", "must be > 0");
  require(std::isfinite(rho) && rho >= -1.0 && rho <= 1.0, "rho", "must lie in [-1, 1]");
  require(std::isfinite(s0) && s0 > 0.0, "s0", "must be > 0");
  require(std::isfinite(v0) && v0 > 0.0, "v0", "must be > 0");
}

LatticeCalibration calibrate(const MarketParams& market, double dt) {
  market.validate();
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw ConfigError("dt: must be > 0");
  }

  LatticeCalibration cal;
  cal.dt = dt;
  const double sqrt_dt = std::sqrt(dt);
  cal.u = std::exp(market.sigma1 * sqrt_dt);
  cal.d = 1.0 / cal.u;
  cal.h = std::exp(market.sigma2 * sqrt_dt);
  cal.l = 1.0 / cal.h;
  cal.q = (1.0 - cal.d) / (cal.u - cal.d);

  // Marginal up-probabilities of S and V.
  const double a = (std::exp((market.mu1 - market.r) * dt) - cal.d) / (cal.u - cal.d);
  const double b = (std::exp((market.mu2 - market.r) * dt) - cal.l) / (cal.h - cal.l);
  // With p1+p2 = a, p1+p3 = b and sum 1, p1 p4 - p2 p3 collapses to p1 - a b.
  const double cross =
      market.rho * market.sigma1 * market.sigma2 * dt / ((cal.u - cal.d) * (cal.h - cal.l));
  cal.p1 = a * b + cross;
  cal.p2 = a - cal.p1;
  cal.p3 = b - cal.p1;
  cal.p4 = 1.0 - a - b + cal.p1;

  if (!in_open_unit(a) || !in_open_unit(b) || !in_open_unit(cal.p1) || !in_open_unit(cal.p2) ||
      !in_open_unit(cal.p3) || !in_open_unit(cal.p4)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lattice probabilities outside (0,1) for dt=" << dt << " rho=" << market.rho
        << ": a=" << a << " b=" << b << " p=(" << cal.p1 << ", " << cal.p2 << ", " << cal.p3
        << ", " << cal.p4 << ")";
    throw CalibrationInfeasible(msg.str());
  }
  return cal;
}

MomentReport verify_moments(const LatticeCalibration& cal, const MarketParams& market) {
  const double ps[4] = {cal.p1, cal.p2, cal.p3, cal.p4};
  const double ss[4] = {cal.u, cal.u, cal.d, cal.d};
  const double vs[4] = {cal.h, cal.l, cal.h, cal.l};

  MomentReport rep;
  for (int k = 0; k < 4; ++k) {
    rep.mean_s += ps[k] * ss[k];
    rep.mean_v += ps[k] * vs[k];
  }
  for (int k = 0; k < 4; ++k) {
    const double ds = ss[k] - rep.mean_s;
    const double dv = vs[k] - rep.mean_v;
    rep.cov_sv += ps[k] * ds * dv;
    rep.var_s += ps[k] * ds * ds;
    rep.var_v += ps[k] * dv * dv;
  }
  rep.target_mean_s = std::exp((market.mu1 - market.r) * cal.dt);
  rep.target_mean_v = std::exp((market.mu2 - market.r) * cal.dt);
  rep.target_cov_sv = market.rho * market.sigma1 * market.sigma2 * cal.dt;
  rep.target_var_s = market.sigma1 * market.sigma1 * cal.dt;
  rep.target_var_v = market.sigma2 * market.sigma2 * cal.dt;
  return rep;
}

double capm_equilibrium_rate(const MarketParams& market) {
  return market.r + market.rho * ((market.mu1 - market.r) / market.sigma1) * market.sigma2;
}

double mu2_from_shortfall(const MarketParams& market, double delta) {
  return capm_equilibrium_rate(market) - delta;
}

}  // namespace realopt
