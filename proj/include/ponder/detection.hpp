#pragma once

namespace ponder {

/// Unbalanced single-photodiode homodyne: signal through the t-arm of the
/// combining splitter, LO through the r-arm, relative phase theta.
struct HomodyneSetup {
  double t2 = 0.0;        // power transmission for the signal
  double r2 = 0.0;        // power reflection for the LO; t2 + r2 = 1
  double e_signal = 0.0;  // carrier amplitude, sqrt(W)
  double e_lo = 0.0;      // carrier amplitude, sqrt(W)
  double theta = 0.0;     // rad

  void validate() const;
};

/// Measurement quadrature angles of the combined carrier w.r.t. signal and LO.
struct HomodyneAngles {
  double phi_s = 0.0;   // rad
  double phi_lo = 0.0;  // rad
};
HomodyneAngles homodyne_angles(const HomodyneSetup& setup);

/// Measured PSD relative to shot noise: t^2 S_S(phi_S) + r^2 (LO shot-limited).
double homodyne_spectrum(double s_signal, double t2, double r2);

/// Solve (e_lo, theta) so the detector measures quadrature phi_s at a fixed
/// total detected power (the shot-noise-invariant lock point).
struct LoSolution {
  double e_lo = 0.0;
  double theta = 0.0;
};
LoSolution solve_lo_for_quadrature(double phi_s, double p_detected, double t2, double r2,
                                   double e_signal);

/// Normalized two-detector correlation of a split beam of relative PSD R,
/// with dark-noise PSDs on each detector: C = eta (R-1)/(R+1).
double correlation(double r_rel, double s_da, double s_db);

/// Invert C back to R at unit efficiency: R = (1+C)/(1-C).
double noise_from_correlation(double c);

}  // namespace ponder
