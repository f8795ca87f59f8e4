#include "ponder/detection.hpp"

#include <cmath>
#include <stdexcept>

namespace ponder {

void HomodyneSetup::validate() const {
  if (std::abs(t2 + r2 - 1.0) > 1e-12)
    throw std::invalid_argument("homodyne: t2 + r2 must equal 1");
  if (!(t2 >= 0.0 && r2 >= 0.0)) throw std::invalid_argument("homodyne: t2, r2 must be >= 0");
  if (!(e_signal >= 0.0 && e_lo >= 0.0))
    throw std::invalid_argument("homodyne: carrier amplitudes must be >= 0");
}

HomodyneAngles homodyne_angles(const HomodyneSetup& setup) {
  setup.validate();
  const double t = std::sqrt(setup.t2);
  const double r = std::sqrt(setup.r2);
  const double ts = t * setup.e_signal;
  const double rl = r * setup.e_lo;
  const double res_x = ts + rl * std::cos(setup.theta);
  const double res_y = rl * std::sin(setup.theta);
  const double scale = ts * ts + rl * rl;
  if (res_x * res_x + res_y * res_y <= 1e-24 * scale)
    throw std::invalid_argument("homodyne_angles: combined carrier vanishes");
  HomodyneAngles out;
  out.phi_s = std::atan2(res_y, res_x);
  out.phi_lo = std::atan2(-ts * std::sin(setup.theta), rl + ts * std::cos(setup.theta));
  return out;
}

double homodyne_spectrum(double s_signal, double t2, double r2) {
  if (!(s_signal >= 0.0)) throw std::invalid_argument("homodyne_spectrum: s_signal >= 0");
  return t2 * s_signal + r2;
}

LoSolution solve_lo_for_quadrature(double phi_s, double p_detected, double t2, double r2,
                                   double e_signal) {
  if (!(p_detected > 0.0))
    throw std::invalid_argument("solve_lo_for_quadrature: detected power must be > 0");
  if (!(r2 > 0.0)) throw std::invalid_argument("solve_lo_for_quadrature: r2 must be > 0");
  const double amp = std::sqrt(p_detected);
  const double u = amp * std::cos(phi_s) - std::sqrt(t2) * e_signal;
  const double v = amp * std::sin(phi_s);
  LoSolution out;
  out.e_lo = std::hypot(u, v) / std::sqrt(r2);
  out.theta = std::atan2(v, u);
  return out;
}

double correlation(double r_rel, double s_da, double s_db) {
  if (!(r_rel > 0.0)) throw std::invalid_argument("correlation: r_rel must be > 0");
  if (!(s_da >= 0.0 && s_db >= 0.0))
    throw std::invalid_argument("correlation: dark PSDs must be >= 0");
  const double eta = 1.0 / std::sqrt((1.0 + s_da / (1.0 + r_rel)) *
                                     (1.0 + s_db / (1.0 + r_rel)));
  return eta * (r_rel - 1.0) / (r_rel + 1.0);
}

double noise_from_correlation(double c) {
  if (!(std::abs(c) < 1.0))
    throw std::invalid_argument("noise_from_correlation: |c| must be < 1");
  return (1.0 + c) / (1.0 - c);
}

}  // namespace ponder
