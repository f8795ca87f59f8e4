#pragma once

#include <complex>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "ponder/cavity.hpp"

namespace ponder {

enum class GainMode { kExact, kApproximate };

/// Optical-spring response at one frequency plus its DC characterization.
/// Damping rates follow the s^2 + s*Gamma convention (full rates):
/// gamma_os = 2 Omega_os^2 / gamma_0, positive = anti-damping for blue detuning.
struct SpringResponse {
  std::complex<double> k_os;  // N/m at s = i 2 pi f
  double omega_os_sq = 0.0;   // signed DC spring frequency squared, rad^2/s^2
  double omega_os = 0.0;      // sqrt(|omega_os_sq|), rad/s
  double gamma_os = 0.0;      // rad/s, signed like omega_os_sq
  std::complex<double> gamma_plus;   // gamma(1 + i delta), rad/s
  std::complex<double> gamma_minus;  // gamma(1 - i delta), rad/s
  double gamma_0 = 0.0;              // gamma(1 + delta^2), rad/s
};

/// Optical spring constant of the detuned cavity acting on an oscillator of
/// effective mass `mass`. `mode` selects the exact round-trip expression or
/// the high-finesse two-pole form.
SpringResponse optical_spring(const CavityConfig& config, const DerivedCavity& derived,
                              double mass, double f, GainMode mode);

/// Cavity modulation gains from the input amplitude/phase modulators to the
/// intracavity power fluctuation (modulator strengths beta = 1).
struct ModulationGains {
  std::complex<double> g_in_am;
  std::complex<double> g_in_pm;
};
ModulationGains modulation_gains(const CavityConfig& config, const DerivedCavity& derived,
                                 double f, GainMode mode);

/// Open-loop gain of the internal radiation-pressure feedback.
inline std::complex<double> open_loop_gain(std::complex<double> k_os,
                                           std::complex<double> chi) {
  return chi * k_os;
}

/// Effective oscillator formed by the mechanical spring plus the optical one.
/// gamma_m is the full mechanical damping rate Omega_m/Q_m (rad/s).
struct EffectiveOscillator {
  double omega_om_sq = 0.0;  // signed, rad^2/s^2
  double omega_om = 0.0;     // sqrt(|omega_om_sq|), rad/s
  double gamma_om = 0.0;     // rad/s; negative means anti-damped
  bool stable = false;       // gamma_om > 0 and omega_om_sq > 0
};
EffectiveOscillator effective_oscillator(double omega_m, double gamma_m,
                                         const SpringResponse& spring);

/// In-loop suppression of ambient motion below the optical spring:
/// |Omega_os^2 / (Omega_m^2 - Omega^2 + i Omega Gamma_m)|.
double suppression_factor(double omega_os, double omega_m, double gamma_m, double f);

// ---------------------------------------------------------------------------
// Feedback-loop margin analysis
// ---------------------------------------------------------------------------

/// Real-rational filter: gain * prod(1 + s/z) / prod(1 + s/p), s = i 2 pi f,
/// corner frequencies in Hz. Non-finite corners are rejected at evaluation.
struct RationalFilter {
  std::vector<double> zeros_hz;
  std::vector<double> poles_hz;
  double gain = 1.0;

  std::complex<double> eval(double f) const;
};

/// Tabulated complex response, interpolated linearly in log f.
struct TabulatedResponse {
  std::vector<double> freqs_hz;              // sorted ascending
  std::vector<std::complex<double>> values;  // same length

  std::complex<double> eval(double f) const;
};

using PlantResponse =
    std::variant<std::function<std::complex<double>(double)>, TabulatedResponse>;

struct LoopModel {
  PlantResponse plant;
  RationalFilter filter;
  std::string label;

  std::complex<double> plant_at(double f) const;
  std::complex<double> open_loop_at(double f) const { return plant_at(f) * filter.eval(f); }
};

struct MarginReport {
  std::vector<double> unity_gain_crossings;  // Hz, ascending
  std::vector<double> phase_margins_deg;     // one per crossing
  bool has_gain_margin = false;
  double gain_margin_db = 0.0;  // at the first -180 deg phase crossing
  bool stable = false;
};

/// Locate unity-gain crossings by log-linear interpolation of |G| over the
/// grid, read phase margins there, and the gain margin at the first -180 deg
/// crossing. The grid must be sorted with at least 50 points per decade.
MarginReport loop_margins(const LoopModel& loop, const std::vector<double>& f_grid);

}  // namespace ponder
