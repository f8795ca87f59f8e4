#pragma once

#include <complex>
#include <string>
#include <vector>

namespace ponder {

enum class DampingKind { kStructural, kViscous };

/// One mechanical eigenmode reduced to a 1-D effective oscillator.
struct MechMode {
  double freq = 0.0;         // Hz
  double modal_mass = 0.0;   // kg
  double loss_factor = 0.0;  // phi = 1/Q
  DampingKind damping_kind = DampingKind::kStructural;
};

/// Multi-mode mechanical resonator. Modes sorted strictly ascending in
/// frequency; duplicates are rejected (copies must be detuned).
struct Oscillator {
  std::vector<MechMode> modes;
  double temperature = 295.0;  // K

  void validate() const;
  double fundamental_freq() const { return modes.front().freq; }
};

/// Complex mechanical susceptibility chi(f) in m/N, summed over modes.
/// Sign convention: Im chi < 0 for a dissipative oscillator at f > 0.
std::complex<double> susceptibility(const Oscillator& osc, double f);

/// Single-sided displacement PSD from thermal fluctuations, m^2/Hz.
double thermal_displacement_psd(const Oscillator& osc, double f);

/// Single-sided thermal force PSD of one mode, N^2/Hz.
/// Structural: 4 kB T m w_m^2 phi / w (1/f law); viscous: white 4 kB T m Gamma.
double thermal_force_psd(const MechMode& mode, double temperature, double f);

/// Effective scalar force PSD that reproduces the exact multi-mode thermal
/// displacement PSD when driven through the summed susceptibility:
/// S_F,eff = (4 kB T / w) Im[1/chi(w)]. Mode forces are mutually uncorrelated,
/// so this is exact for any observable that couples through chi alone.
double thermal_force_psd_effective(const Oscillator& osc, double f);

// ---------------------------------------------------------------------------
// Modal mass from sampled mode shapes
// ---------------------------------------------------------------------------

struct ShapeSample {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double psi_z = 0.0;  // dimensionless out-of-plane displacement
};

struct SampledModeShape {
  std::vector<ShapeSample> surface_samples;
  double volume_norm = 0.0;  // M_n = integral rho |psi|^2, kg

  void validate() const;
};

struct BeamProfile {
  double waist_radius = 0.0;  // 1/e intensity radius, m
  double center_x = 0.0;      // m
  double center_y = 0.0;      // m
};

/// Modal mass m_n = M_n / LWD^2 with the laser-weighted displacement
/// LWD = (1/pi r^2) integral psi_z exp(-((x-x0)^2+(y-y0)^2)/r^2) dA,
/// integrated by deterministic quadrature over a Delaunay triangulation of
/// the samples. A beam on a nodal point (LWD -> 0) yields +infinity.
/// Throws if the beam center lies outside the sampled convex hull.
double modal_mass(const SampledModeShape& shape, const BeamProfile& beam);

/// The laser-weighted displacement itself (dimensionless).
double laser_weighted_displacement(const SampledModeShape& shape, const BeamProfile& beam);

// ---------------------------------------------------------------------------
// Closed-form cantilever eigenfrequencies
// ---------------------------------------------------------------------------

struct CantileverGeometry {
  double length_l = 0.0;              // cantilever length L, m
  double radius_r = 0.0;              // mirror-pad radius R, m
  double width_w = 0.0;               // cantilever width W, m
  double thickness_cantilever = 0.0;  // tau_C, m
  double thickness_mirror = 0.0;      // tau_M, m
  double youngs_modulus = 0.0;        // Y, Pa
  double shear_modulus = 0.0;         // G, Pa
  double density_mirror = 0.0;        // rho_M, kg/m^3
  double density_cantilever = 0.0;    // rho_C, kg/m^3

  void validate() const;
};

enum class ModeKind { kFundZ, kFundY, kTorsion, kBendZ, kBendY };

struct AnalyticMode {
  ModeKind kind = ModeKind::kFundZ;
  int order = 0;  // bending-mode index n (3..5); 0 for fundamentals/torsion
  double freq = 0.0;  // Hz
};

/// Closed-form mode frequencies: fundamentals in Z and Y, torsion, and
/// bending modes n = 3..5 in both directions. Sorted ascending by frequency.
std::vector<AnalyticMode> analytic_modes(const CantileverGeometry& geom);

std::string mode_kind_name(const AnalyticMode& mode);

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

/// Mode list from CSV with header `freq_hz,modal_mass_kg,q`. Errors cite row numbers.
std::vector<MechMode> load_modes_csv(const std::string& path);

/// Mode-shape point cloud from CSV with header `x_m,y_m,psi_z`.
std::vector<ShapeSample> load_mode_shape_csv(const std::string& path);

}  // namespace ponder
