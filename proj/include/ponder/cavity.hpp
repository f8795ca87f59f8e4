#pragma once

#include <stdexcept>

namespace ponder {

enum class MeasurementPort { kTransmission, kReflection };

/// How the optical power level is specified.
enum class PowerSpec {
  kInput,               // laser power incident on the input mirror (W)
  kIntracavityResonant  // circulating power the cavity would hold on resonance (W)
};

/// Optical configuration of the detuned Fabry-Perot cavity.
///
/// Transmissions and losses are power fractions per round trip. `detuning`
/// is in units of the HWHM linewidth; positive means blue-detuned (laser
/// above cavity resonance), which gives a restoring optical spring.
struct CavityConfig {
  double length = 0.0;      // m
  double wavelength = 0.0;  // m
  double t1 = 0.0;          // input-mirror transmission T1
  double t2 = 0.0;          // end-mirror transmission T2
  double l1 = 0.0;          // input-mirror loss L1
  double l2 = 0.0;          // lumped round-trip loss L2 (modeled at the end mirror)
  double detuning = 0.0;    // delta, units of HWHM
  PowerSpec power_kind = PowerSpec::kInput;
  double power_watts = 0.0;
  double mode_matching = 1.0;  // input mode-matching efficiency, (0,1]
  MeasurementPort measurement_port = MeasurementPort::kTransmission;

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;
};

/// Quantities derived from a CavityConfig (high-finesse column unless noted).
struct DerivedCavity {
  double gamma_hwhm = 0.0;    // HWHM linewidth, Hz
  double finesse = 0.0;
  double total_loss = 0.0;    // T = T1 + T2 + L2
  double escape_refl = 0.0;   // E^R = T1/T
  double escape_trans = 0.0;  // E^T = T2/T
  double p_cav = 0.0;         // circulating power at the operating detuning, W
  double p_in = 0.0;          // required input power, W
  double p_trans = 0.0;       // transmitted power, W
  double carrier_rotation = 0.0;  // theta_delta = atan(-delta), rad (reflection carrier)
  double xi0 = 0.0;               // transmission squeezing-angle seed, +atan(delta)/2, rad
};

/// Classical laser noise model. Frequency noise follows
/// S_ff = freq_noise_coeff / f^freq_noise_exponent (Hz^2/Hz).
struct LaserNoise {
  double rin_asd = 0.0;           // relative intensity noise ASD, 1/sqrt(Hz)
  double freq_noise_coeff = 0.0;  // Hz^3 for the default exponent
  double freq_noise_exponent = 2.0;

  void validate() const;
  /// S_ff(f) in Hz^2/Hz.
  double freq_noise_psd(double f) const;
};

/// Dimensionless classical-noise strengths relative to intracavity quantum noise.
struct LambdaParams {
  double lambda_th = 0.0;
  double lambda_rin = 0.0;
  double lambda_pn = 0.0;
  double lambda_cln = 0.0;  // lambda_rin + lambda_pn
};

/// Evaluate all derived cavity quantities (approximate high-finesse column).
/// Whichever of p_in / p_cav was not supplied is solved from the build-up
/// relation; mode matching scales the required input power only.
DerivedCavity derive(const CavityConfig& config);

/// Exact HWHM linewidth, gamma = c(1 - rho1 rho2) / (4 pi L sqrt(rho1 rho2)), Hz.
double exact_linewidth(const CavityConfig& config);

/// Shot-noise-normalized classical laser noise PSDs at the input (Eqs. of the
/// S_RIN / S_PN conversion). Returns {s_rin, s_pn}, both dimensionless.
struct ClassicalNoisePsd {
  double s_rin = 0.0;
  double s_pn = 0.0;
};
ClassicalNoisePsd classical_noise_psd(const LaserNoise& laser, double p_in,
                                      double wavelength, double f);

/// Dimensionless lambda parameters at sideband frequency f. `s_f_th` is the
/// thermal force PSD in N^2/Hz at f.
LambdaParams lambda_params(const DerivedCavity& derived, const CavityConfig& config,
                           const LaserNoise& laser, double s_f_th, double f);

}  // namespace ponder
