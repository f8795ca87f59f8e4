#include <doctest.h>

#include <cmath>
#include <fstream>

#include "ponder/constants.hpp"
#include "ponder/mechanics.hpp"
#include "test_util.hpp"

using namespace ponder;
using test::rel_err;

TEST_CASE("susceptibility magnitudes in the stiffness and free-mass limits") {
  const Oscillator osc = test::single_mode_oscillator();
  CHECK(rel_err(std::abs(susceptibility(osc, 1.0)), 660.1795185302757) < 2e-5);
  CHECK(rel_err(std::abs(susceptibility(osc, 1e4)), 5.066059182116889) < 2e-2);
  CHECK(susceptibility(osc, 100.0).imag() < 0.0);
  CHECK(susceptibility(osc, 1e5).imag() < 0.0);
}

TEST_CASE("susceptibility is additive over modes") {
  Oscillator two = test::single_mode_oscillator();
  // Two near-identical modes (exact duplicates are rejected).
  two.modes.push_back({876.0000001, 50e-12, 1.0 / 16000.0, DampingKind::kStructural});
  const Oscillator one = test::single_mode_oscillator();
  for (double f : {10.0, 500.0, 2e4})
    CHECK(std::abs(susceptibility(two, f)) ==
          doctest::Approx(2.0 * std::abs(susceptibility(one, f))).epsilon(1e-6));
}

TEST_CASE("thermal displacement ASD of the measured oscillator") {
  const Oscillator osc = test::single_mode_oscillator();
  CHECK(rel_err(std::sqrt(thermal_displacement_psd(osc, 1e4)), 7.998664476099135e-16) < 1e-12);
  CHECK(rel_err(std::sqrt(thermal_displacement_psd(osc, 876.0)), 5.591543042623913e-09) < 1e-3);
  Oscillator cold = osc;
  cold.temperature = 1e-12;
  CHECK(thermal_displacement_psd(cold, 1e4) < 1e-38);
}

TEST_CASE("thermal force PSD follows the structural 1/f law") {
  const MechMode mode{876.0, 50e-12, 1.0 / 16000.0, DampingKind::kStructural};
  const double s1 = thermal_force_psd(mode, 295.0, 2e4);
  CHECK(rel_err(s1, 1.227364044984522e-32) < 1e-12);
  CHECK(thermal_force_psd(mode, 295.0, 4e4) == doctest::Approx(s1 / 2.0).epsilon(1e-12));
  MechMode lossless = mode;
  lossless.loss_factor = 1e-300;
  CHECK(thermal_force_psd(lossless, 295.0, 2e4) < 1e-320);
  CHECK_THROWS_AS(thermal_force_psd(mode, 295.0, 0.0), std::invalid_argument);
}

TEST_CASE("fluctuation-dissipation consistency per mode") {
  // Two algebraic routes: the squared-Lorentzian closed form vs the FDT
  // G(W) = -(2 kB T / pi W) Im chi evaluated from the complex susceptibility,
  // converted between per-Hz and per-(rad/s) one-sided conventions.
  test::Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    Oscillator osc;
    osc.temperature = rng.uniform(4.0, 400.0);
    osc.modes.push_back({rng.log_uniform(10.0, 1e3), rng.log_uniform(1e-12, 1e-9),
                         1.0 / rng.log_uniform(1e2, 1e5),
                         i % 3 == 0 ? DampingKind::kViscous : DampingKind::kStructural});
    const double f = rng.log_uniform(1.0, 1e6);
    const double w = 2.0 * kPi * f;
    const double via_fdt =
        -(2.0 * kBoltzmann * osc.temperature / (kPi * w)) * susceptibility(osc, f).imag();
    CHECK(rel_err(thermal_displacement_psd(osc, f), 2.0 * kPi * via_fdt) < 1e-9);
  }
}

TEST_CASE("multi-mode thermal PSD is the sum of single-mode PSDs") {
  Oscillator multi;
  multi.temperature = 295.0;
  multi.modes = {{876.0, 50e-12, 1.0 / 16000.0, DampingKind::kStructural},
                 {3700.0, 1e-9, 1.0 / 20000.0, DampingKind::kStructural},
                 {15000.0, 1e-8, 1.0 / 1000.0, DampingKind::kStructural}};
  for (double f : {100.0, 1e3, 1e4, 1e5}) {
    double sum = 0.0;
    for (const MechMode& m : multi.modes) {
      Oscillator one;
      one.temperature = multi.temperature;
      one.modes = {m};
      sum += thermal_displacement_psd(one, f);
    }
    CHECK(rel_err(thermal_displacement_psd(multi, f), sum) < 1e-12);
  }
}

TEST_CASE("effective thermal force PSD reproduces the displacement PSD through chi") {
  Oscillator multi;
  multi.temperature = 295.0;
  multi.modes = {{876.0, 50e-12, 1.0 / 16000.0, DampingKind::kStructural},
                 {3700.0, 1e-9, 1.0 / 20000.0, DampingKind::kStructural},
                 {28000.0, 1e-7, 1.0 / 1000.0, DampingKind::kStructural}};
  for (double f : {50.0, 876.5, 5e3, 1e5}) {
    const double via_chi = std::norm(susceptibility(multi, f)) *
                           thermal_force_psd_effective(multi, f);
    CHECK(rel_err(via_chi, thermal_displacement_psd(multi, f)) < 1e-12);
  }
  // Single mode: effective force PSD equals the per-mode closed form.
  const Oscillator one = test::single_mode_oscillator();
  CHECK(rel_err(thermal_force_psd_effective(one, 2e4),
                thermal_force_psd(one.modes[0], 295.0, 2e4)) < 1e-12);
}

TEST_CASE("structural ASD slope above the highest mode") {
  // Node-centered higher-order modes carry large modal masses, so the band
  // above the top mode is dominated by the fundamental's asymptote.
  Oscillator osc;
  osc.temperature = 295.0;
  osc.modes = {{876.0, 50e-12, 1.0 / 16000.0, DampingKind::kStructural},
               {3700.0, 1e-5, 1.0 / 20000.0, DampingKind::kStructural},
               {15000.0, 1e-5, 1.0 / 20000.0, DampingKind::kStructural},
               {28000.0, 1e-4, 1.0 / 1000.0, DampingKind::kStructural}};
  const double f_top = osc.modes.back().freq;
  const double lo = 3.0 * f_top, hi = 10.0 * f_top;
  const double slope = (std::log10(std::sqrt(thermal_displacement_psd(osc, hi))) -
                        std::log10(std::sqrt(thermal_displacement_psd(osc, lo)))) /
                       (std::log10(hi) - std::log10(lo));
  CHECK(slope == doctest::Approx(-2.5).epsilon(0.008));  // -2.5 +- 0.02
}

TEST_CASE("oscillator validation") {
  Oscillator osc = test::single_mode_oscillator();
  osc.modes.push_back({876.0, 1e-12, 1e-4, DampingKind::kStructural});  // duplicate freq
  CHECK_THROWS_AS(osc.validate(), std::invalid_argument);
  osc.modes.clear();
  CHECK_THROWS_AS(osc.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Modal mass
// ---------------------------------------------------------------------------

namespace {

// Regular grid sampling of an analytic shape over [-half, half]^2.
SampledModeShape grid_shape(double half, int n, double volume_norm,
                            double (*psi)(double, double)) {
  SampledModeShape s;
  s.volume_norm = volume_norm;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = -half + 2.0 * half * i / (n - 1);
      const double y = -half + 2.0 * half * j / (n - 1);
      s.surface_samples.push_back({x, y, psi(x, y)});
    }
  return s;
}

// Brute-force quadrature of the same sampled data: dense midpoint rule with
// bilinear interpolation on the regular grid. Independent of the Delaunay path.
double brute_force_lwd(double half, int n, double (*psi)(double, double),
                       const BeamProfile& beam) {
  const int kCells = 2000;
  const double h = 2.0 * half / kCells;
  double sum = 0.0;
  for (int i = 0; i < kCells; ++i)
    for (int j = 0; j < kCells; ++j) {
      const double x = -half + (i + 0.5) * h;
      const double y = -half + (j + 0.5) * h;
      const double dx = x - beam.center_x, dy = y - beam.center_y;
      sum += psi(x, y) * std::exp(-(dx * dx + dy * dy) /
                                  (beam.waist_radius * beam.waist_radius));
    }
  (void)n;
  return sum * h * h / (kPi * beam.waist_radius * beam.waist_radius);
}

double piston(double, double) { return 1.0; }
double tilt(double x, double) { return x; }
double saddle(double x, double y) { return 1.0 + 0.3 * x / 50e-6 + 0.1 * y / 50e-6; }

}  // namespace

TEST_CASE("uniform piston recovers the physical mass") {
  const double mass = 5e-10;
  const SampledModeShape s = grid_shape(50e-6, 41, mass, piston);
  const BeamProfile beam{2.5e-6, 0.0, 0.0};
  CHECK(rel_err(modal_mass(s, beam), mass) < 1e-6);
}

TEST_CASE("antisymmetric tilt at the node is unbounded") {
  const SampledModeShape s = grid_shape(50e-6, 41, 1e-10, tilt);
  const BeamProfile beam{2.5e-6, 0.0, 0.0};
  CHECK(std::isinf(modal_mass(s, beam)));
}

TEST_CASE("offset tilt recovers the renormalized mass") {
  // psi = x with the beam at x0: LWD -> x0, so m -> M / x0^2.
  const double x0 = 20e-6;
  const SampledModeShape s = grid_shape(50e-6, 61, 1e-10, tilt);
  const BeamProfile beam{2.5e-6, x0, 0.0};
  const double lwd = laser_weighted_displacement(s, beam);
  CHECK(rel_err(lwd, x0) < 1e-4);
  CHECK(rel_err(modal_mass(s, beam), 1e-10 / (x0 * x0)) < 1e-3);
}

TEST_CASE("triangulated quadrature matches the brute-force oracle") {
  const SampledModeShape s = grid_shape(50e-6, 41, 1e-10, saddle);
  const BeamProfile beam{3.0e-6, 8e-6, -5e-6};
  const double got = laser_weighted_displacement(s, beam);
  const double want = brute_force_lwd(50e-6, 41, saddle, beam);
  CHECK(rel_err(got, want) < 1e-5);
}

TEST_CASE("modal mass is invariant under shape renormalization") {
  SampledModeShape s = grid_shape(50e-6, 41, 1e-10, saddle);
  const BeamProfile beam{2.5e-6, 4e-6, 2e-6};
  const double m0 = modal_mass(s, beam);
  const double scale = 3.7;
  for (auto& p : s.surface_samples) p.psi_z *= scale;
  s.volume_norm *= scale * scale;
  CHECK(rel_err(modal_mass(s, beam), m0) < 1e-12);
}

TEST_CASE("beam outside the sampled hull is rejected") {
  const SampledModeShape s = grid_shape(50e-6, 21, 1e-10, piston);
  const BeamProfile beam{2.5e-6, 80e-6, 0.0};
  CHECK_THROWS_AS(modal_mass(s, beam), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Analytic cantilever modes
// ---------------------------------------------------------------------------

namespace {

CantileverGeometry device(double l_um, double r_um, double w_um) {
  CantileverGeometry g;
  g.length_l = l_um * 1e-6;
  g.radius_r = r_um * 1e-6;
  g.width_w = w_um * 1e-6;
  g.thickness_cantilever = 225e-9;
  g.thickness_mirror = 4e-6;
  g.youngs_modulus = 85e9;
  g.shear_modulus = 60e9;
  g.density_mirror = 4562.0;
  g.density_cantilever = 5316.0;
  return g;
}

double freq_of(const std::vector<AnalyticMode>& modes, ModeKind kind, int order = 0) {
  for (const AnalyticMode& m : modes)
    if (m.kind == kind && m.order == order) return m.freq;
  return -1.0;
}

}  // namespace

TEST_CASE("closed-form fundamental and torsion frequencies") {
  const auto modes = analytic_modes(device(250, 60, 15));
  CHECK(rel_err(freq_of(modes, ModeKind::kFundZ), 122.30455784600538) < 1e-12);
  CHECK(rel_err(freq_of(modes, ModeKind::kTorsion), 1316.7850605394178) < 1e-12);
  for (size_t i = 1; i < modes.size(); ++i) CHECK(modes[i].freq >= modes[i - 1].freq);
  CHECK(modes.size() == 9);  // fund Z, fund Y, torsion, bend Z/Y n=3..5
}

TEST_CASE("width scaling of the fundamental") {
  const double f1 = freq_of(analytic_modes(device(250, 60, 15)), ModeKind::kFundZ);
  const double f4 = freq_of(analytic_modes(device(250, 60, 60)), ModeKind::kFundZ);
  CHECK(f4 == doctest::Approx(2.0 * f1).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

TEST_CASE("mode-shape CSV round-trips into the modal-mass pipeline") {
  const char* path = "shape_roundtrip_test.csv";
  {
    std::ofstream out(path);
    out << "x_m,y_m,psi_z\n";
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j < 21; ++j) {
        const double x = -50e-6 + 100e-6 * i / 20.0;
        const double y = -50e-6 + 100e-6 * j / 20.0;
        out << x << "," << y << ",1.0\n";
      }
  }
  SampledModeShape s;
  s.surface_samples = load_mode_shape_csv(path);
  s.volume_norm = 5e-10;
  REQUIRE(s.surface_samples.size() == 441);
  const BeamProfile beam{2.5e-6, 0.0, 0.0};
  CHECK(rel_err(modal_mass(s, beam), 5e-10) < 1e-6);  // piston recovers the mass
  std::remove(path);
}

TEST_CASE("mode CSV rejects unsorted rows with the row number") {
  const char* path = "modes_unsorted_test.csv";
  {
    std::ofstream out(path);
    out << "freq_hz,modal_mass_kg,q\n876,5e-11,16000\n500,1e-10,20000\n";
  }
  try {
    load_modes_csv(path);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::remove(path);
}
