#include "ponder/cavity.hpp"

#include <cmath>
#include <limits>

#include "ponder/constants.hpp"

namespace ponder {

void CavityConfig::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("cavity.length must be > 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("cavity.wavelength must be > 0");
  if (!(t1 > 0.0 && t1 < 1.0)) throw std::invalid_argument("cavity.t1 must be in (0,1)");
  if (!(t2 > 0.0 && t2 < 1.0)) throw std::invalid_argument("cavity.t2 must be in (0,1)");
  if (!(l1 >= 0.0 && l1 < 1.0)) throw std::invalid_argument("cavity.l1 must be in [0,1)");
  if (!(l2 >= 0.0 && l2 < 1.0)) throw std::invalid_argument("cavity.l2 must be in [0,1)");
  if (!(t1 + t2 + l1 + l2 < 1.0))
    throw std::invalid_argument("cavity.t1+t2+l1+l2 must be < 1");
  if (!(mode_matching > 0.0 && mode_matching <= 1.0))
    throw std::invalid_argument("cavity.mode_matching must be in (0,1]");
  if (!std::isfinite(detuning)) throw std::invalid_argument("cavity.detuning must be finite");
  if (!(power_watts > 0.0)) throw std::invalid_argument("cavity.power must be > 0");
}

void LaserNoise::validate() const {
  if (!(rin_asd >= 0.0)) throw std::invalid_argument("laser.rin_asd must be >= 0");
  if (!(freq_noise_coeff >= 0.0))
    throw std::invalid_argument("laser.freq_noise_coeff must be >= 0");
}

double LaserNoise::freq_noise_psd(double f) const {
  return freq_noise_coeff / std::pow(f, freq_noise_exponent);
}

DerivedCavity derive(const CavityConfig& config) {
  config.validate();
  DerivedCavity d;
  const double total = config.t1 + config.t2 + config.l2;  // L1 excluded by convention
  d.total_loss = total;
  d.gamma_hwhm = kSpeedOfLight * total / (8.0 * kPi * config.length);
  d.finesse = 2.0 * kPi / total;
  d.escape_refl = config.t1 / total;
  d.escape_trans = config.t2 / total;

  const double delta = config.detuning;
  const double resonant_factor = 1.0 + delta * delta;
  const double buildup = 4.0 * d.escape_refl / total;  // P_cav(0) / P_in (mode-matched)
  if (config.power_kind == PowerSpec::kInput) {
    d.p_in = config.power_watts;
    d.p_cav = buildup * config.mode_matching * d.p_in / resonant_factor;
  } else {
    const double p_cav0 = config.power_watts;  // on-resonance circulating power
    d.p_cav = p_cav0 / resonant_factor;
    d.p_in = p_cav0 / (buildup * config.mode_matching);
  }
  d.p_trans = config.t2 * d.p_cav;
  d.carrier_rotation = std::atan(-delta);
  d.xi0 = 0.5 * std::atan(delta);

  if (!std::isfinite(d.gamma_hwhm) || !std::isfinite(d.p_cav) || !std::isfinite(d.p_in))
    throw std::invalid_argument("derive: degenerate cavity configuration");
  return d;
}

double exact_linewidth(const CavityConfig& config) {
  const double rho1 = std::sqrt(1.0 - config.t1 - config.l1);
  const double rho2 = std::sqrt(1.0 - config.t2 - config.l2);
  const double r = rho1 * rho2;
  if (r >= 1.0) return 0.0;  // lossless closed cavity
  return kSpeedOfLight / (2.0 * config.length) * (1.0 - r) / (2.0 * kPi * std::sqrt(r));
}

ClassicalNoisePsd classical_noise_psd(const LaserNoise& laser, double p_in,
                                      double wavelength, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("classical_noise_psd: f must be > 0");
  if (!(p_in >= 0.0)) throw std::invalid_argument("classical_noise_psd: p_in must be >= 0");
  const double photons = p_in / (2.0 * photon_energy(wavelength));
  ClassicalNoisePsd out;
  out.s_rin = laser.rin_asd * laser.rin_asd * photons;
  out.s_pn = laser.freq_noise_psd(f) / (f * f) * photons;
  return out;
}

LambdaParams lambda_params(const DerivedCavity& derived, const CavityConfig& config,
                           const LaserNoise& laser, double s_f_th, double f) {
  if (!(derived.p_cav > 0.0)) throw std::invalid_argument("lambda_params: p_cav must be > 0");
  if (!(f > 0.0)) throw std::invalid_argument("lambda_params: f must be > 0");
  const double total = derived.total_loss;
  const double delta = config.detuning;
  LambdaParams lp;
  lp.lambda_th = s_f_th * kSpeedOfLight * total * config.wavelength /
                 (16.0 * kPi * kHbar * derived.p_cav);
  const double photons_cav = derived.p_cav / (2.0 * photon_energy(config.wavelength));
  const double coupling = total * total / (4.0 * config.t1);
  lp.lambda_rin = laser.rin_asd * laser.rin_asd * photons_cav * coupling;
  lp.lambda_pn =
      laser.freq_noise_psd(f) / (f * f) * photons_cav * coupling * delta * delta;
  lp.lambda_cln = lp.lambda_rin + lp.lambda_pn;
  return lp;
}

}  // namespace ponder
