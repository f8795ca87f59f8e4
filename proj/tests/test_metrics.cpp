#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ponder/constants.hpp"
#include "ponder/detection.hpp"
#include "ponder/metrics.hpp"
#include "test_util.hpp"

using namespace ponder;
using test::rel_err;

namespace {

NoiseModel quiet() {
  NoiseModel n;
  n.thermal = false;
  n.rin = false;
  n.pn = false;
  n.laser.rin_asd = 0.0;
  n.laser.freq_noise_coeff = 0.0;
  return n;
}

Oscillator fig39_oscillator() {
  Oscillator osc;
  osc.temperature = 295.0;
  osc.modes = {{221.0, 50e-12, 1.0 / 20000.0, DampingKind::kStructural},
               {3700.0, 1e-9, 1.0 / 20000.0, DampingKind::kStructural},
               {15000.0, 5e-9, 1.0 / 20000.0, DampingKind::kStructural},
               {28000.0, 2e-8, 1.0 / 1000.0, DampingKind::kStructural}};
  return osc;
}

}  // namespace

TEST_CASE("vacuum passthrough with negligible coupling") {
  CavityConfig c = test::baseline_cavity();
  c.power_watts = 1e-15;
  const Oscillator osc = test::single_mode_oscillator();
  const SqueezeGrid grid =
      build_grid(c, osc, quiet(), log_spaced(10.0, 1e5, 15), angle_grid(7));
  CHECK(grid.failed_freqs.empty());
  for (const auto& row : grid.total)
    for (double v : row) CHECK(rel_err(v, 1.0) < 1e-6);
}

TEST_CASE("grid input validation") {
  const CavityConfig c = test::baseline_cavity();
  const Oscillator osc = test::single_mode_oscillator();
  CHECK_THROWS_AS(build_grid(c, osc, quiet(), {0.0, 10.0}, angle_grid(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_grid(c, osc, quiet(), {100.0, 10.0}, angle_grid(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_grid(c, osc, quiet(), log_spaced(10, 100, 5), {3.5}),
                  std::invalid_argument);
}

TEST_CASE("total equals the sum of per-source layers") {
  CavityConfig c = test::baseline_cavity();
  NoiseModel noises;
  noises.laser.rin_asd = 1e-8;
  noises.laser.freq_noise_coeff = 1e8;
  noises.pn = true;
  const SqueezeGrid grid = build_grid(c, fig39_oscillator(), noises,
                                      log_spaced(100.0, 1e5, 25), angle_grid(13));
  for (std::size_t ai = 0; ai < grid.angles.size(); ++ai)
    for (std::size_t fi = 0; fi < grid.freqs.size(); ++fi) {
      double sum = 0.0;
      for (const auto& [source, layer] : grid.layers) sum += layer[ai][fi];
      CHECK(rel_err(grid.total[ai][fi], sum) < 1e-9);
      CHECK(grid.total[ai][fi] >= 0.0);
    }
}

TEST_CASE("budget rows re-sum to the grid total") {
  CavityConfig c = test::baseline_cavity();
  NoiseModel noises;
  noises.pn = false;
  const SqueezeGrid grid = build_grid(c, fig39_oscillator(), noises,
                                      log_spaced(100.0, 1e5, 20), angle_grid(7));
  const auto rows = noise_budget(grid, grid.angles[3]);
  REQUIRE(rows.size() == grid.freqs.size());
  for (std::size_t fi = 0; fi < rows.size(); ++fi) {
    double sum = 0.0;
    for (const auto& [source, v] : rows[fi].per_source) sum += v;
    CHECK(rel_err(rows[fi].total, sum) < 1e-9);
    CHECK(rel_err(rows[fi].total, grid.total[3][fi]) < 1e-12);
  }
  CHECK_THROWS_AS(noise_budget(grid, 0.12345), std::invalid_argument);
}

TEST_CASE("quantum-only budget sits at shot noise in the amplitude quadrature") {
  CavityConfig c = test::baseline_cavity();
  const Oscillator osc = test::single_mode_oscillator(10.0, 50e-12, 1e4);
  const SqueezeGrid grid =
      build_grid(c, osc, quiet(), log_spaced(100.0, 3e3, 12), angle_grid(4));
  const auto rows = noise_budget(grid, 0.0);
  for (const BudgetRow& r : rows)
    CHECK(rel_err(r.per_source.at(NoiseSource::kQuantum), 1.0) < 1e-3);
}

TEST_CASE("quantum layer is bounded below by the covariance eigenvalue") {
  CavityConfig c = test::baseline_cavity();
  const Oscillator osc = test::single_mode_oscillator(10.0, 50e-12, 1e4);
  const SqueezeGrid grid =
      build_grid(c, osc, quiet(), log_spaced(200.0, 2e4, 10), angle_grid(181));
  const DerivedCavity d = derive(c);
  const PortRates rates = make_port_rates(c, d);
  const auto& quantum = grid.layers.at(NoiseSource::kQuantum);
  for (std::size_t fi = 0; fi < grid.freqs.size(); ++fi) {
    const auto tfs = port_transfer_matrices(rates, osc, grid.freqs[fi]);
    REQUIRE(tfs);
    const PortCovariance cov =
        port_covariance(*tfs, NoiseSelection{}, c.detuning, 1.0, OutputPort::kTransmission);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov.matrix);
    double layer_min = 1e99;
    for (std::size_t ai = 0; ai < grid.angles.size(); ++ai)
      layer_min = std::min(layer_min, quantum[ai][fi]);
    CHECK(layer_min >= es.eigenvalues()(0) - 1e-12);
    CHECK(layer_min <= es.eigenvalues()(0) + 0.01 * es.eigenvalues()(1));  // grid slack
  }
}

TEST_CASE("summary of an all-ones grid is absent") {
  SqueezeGrid grid;
  grid.freqs = log_spaced(10.0, 1e4, 50);
  grid.angles = angle_grid(5);
  grid.total.assign(5, std::vector<double>(50, 1.0));
  const SqueezeSummary s = extract_summary(grid, 1e3);
  CHECK_FALSE(s.present);
}

TEST_CASE("summary against a dense root-find oracle on a synthetic dip") {
  // total(f) = 1.2 - 0.7 exp(-(log10 f - 3)^2): minimum 0.5 at 1 kHz,
  // shot-noise crossings where the exponential equals 2/7.
  SqueezeGrid grid;
  grid.freqs = log_spaced(10.0, 1e5, 4001);
  grid.angles = {0.0, 0.3};
  auto synth = [](double f) {
    const double u = std::log10(f) - 3.0;
    return 1.2 - 0.7 * std::exp(-u * u);
  };
  grid.total.assign(2, std::vector<double>(grid.freqs.size(), 2.0));
  for (std::size_t i = 0; i < grid.freqs.size(); ++i) grid.total[1][i] = synth(grid.freqs[i]);
  const SqueezeSummary s = extract_summary(grid, 1e5);
  REQUIRE(s.present);
  CHECK(rel_err(s.n_min, 0.5) < 1e-6);
  CHECK(rel_err(s.best_freq, 1e3) < 1e-3);
  CHECK(s.best_angle == 0.3);
  // Dense-bisection oracle for the crossings of synth(f) = 1.
  auto bisect = [&synth](double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
      const double mid = std::sqrt(lo * hi);
      if ((synth(mid) - 1.0) * (synth(lo) - 1.0) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return std::sqrt(lo * hi);
  };
  const double u = std::sqrt(std::log(0.7 / 0.2));
  const double want_low = std::pow(10.0, 3.0 - u);
  const double want_high = std::pow(10.0, 3.0 + u);
  CHECK(rel_err(bisect(10.0, 1e3), want_low) < 1e-9);  // oracle self-check
  CHECK(rel_err(s.f_low, want_low) < 1e-4);
  CHECK(rel_err(s.f_high, want_high) < 1e-4);
  CHECK(s.f_low <= s.best_freq);
  CHECK(s.f_high >= s.best_freq);
}

TEST_CASE("equal minima break toward the lower angle") {
  SqueezeGrid grid;
  grid.freqs = {10.0, 100.0, 1000.0};
  grid.angles = {0.1, 0.2, 0.5};
  grid.total.assign(3, std::vector<double>(3, 1.0));
  grid.total[1][1] = 0.5;
  grid.total[2][1] = 0.5;
  const SqueezeSummary s = extract_summary(grid, 1000.0);
  CHECK(s.best_angle == 0.2);
}

TEST_CASE("baseline grid reproduces the published budget minimum") {
  // Baseline parameters, room-temperature thermal + measured RIN; phase
  // noise is common-mode rejected in a transmission homodyne and stays off.
  CavityConfig c = test::baseline_cavity();
  c.mode_matching = 0.4;
  NoiseModel noises;
  noises.laser.rin_asd = 1e-8;
  noises.pn = false;
  const SqueezeGrid grid = build_grid(c, fig39_oscillator(), noises,
                                      log_spaced(10.0, 1e6, 240), angle_grid(181));
  CHECK(grid.failed_freqs.empty());
  const SqueezeSummary s = extract_summary(grid, grid.f_os_hz / 3.0);
  REQUIRE(s.present);
  const double db = 10.0 * std::log10(s.n_min);
  CHECK(db < -2.0);
  CHECK(db > -4.6);
  CHECK(s.best_angle * 180.0 / kPi > 8.0);
  CHECK(s.best_angle * 180.0 / kPi < 22.0);
  CHECK(s.best_freq > 300.0);
  CHECK(s.best_freq < 2e4);
  CHECK(s.f_low < s.best_freq);
  CHECK(s.f_high > s.best_freq);
}

TEST_CASE("thermal layer is minimized at twice the squeezing angle") {
  CavityConfig c = test::baseline_cavity();
  NoiseModel noises;
  noises.rin = false;
  noises.pn = false;
  const Oscillator osc = test::single_mode_oscillator(10.0, 50e-12, 1e4);
  const std::vector<double> angles = angle_grid(360);
  const SqueezeGrid grid = build_grid(c, osc, noises, log_spaced(500.0, 2e3, 4), angles);
  const auto& thermal = grid.layers.at(NoiseSource::kThermal);
  const double two_xi0 = std::atan(c.detuning);  // 2 xi0 = atan(delta)
  for (std::size_t fi = 0; fi < grid.freqs.size(); ++fi) {
    double best = 1e99;
    std::size_t best_ai = 0;
    for (std::size_t ai = 0; ai < angles.size(); ++ai)
      if (thermal[ai][fi] < best) {
        best = thermal[ai][fi];
        best_ai = ai;
      }
    CHECK(std::abs(angles[best_ai] - two_xi0) < kPi / 360.0 + 1e-12);
  }
}

TEST_CASE("plateau flatness invariants") {
  CavityConfig c = test::baseline_cavity();
  const Oscillator osc = test::single_mode_oscillator(10.0, 50e-12, 1e4);

  SUBCASE("quantum-only noise at xi0 is flat between fundamental and spring") {
    const SqueezeGrid probe = build_grid(c, osc, quiet(), log_spaced(10.0, 11.0, 2), {0.0});
    const double xi0 = 0.5 * std::atan(c.detuning);
    const SqueezeGrid grid = build_grid(
        c, osc, quiet(), log_spaced(100.0, probe.f_os_hz / 10.0, 40), {xi0});
    double lo = 1e99, hi = 0.0;
    for (double v : grid.total[0]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK((hi - lo) / lo < 0.05);
  }

  SUBCASE("thermal + white RIN noise at 2 xi0 is frequency independent") {
    NoiseModel noises;
    noises.pn = false;
    noises.laser.rin_asd = 1e-8;
    const SqueezeGrid probe = build_grid(c, osc, quiet(), log_spaced(10.0, 11.0, 2), {0.0});
    const double two_xi0 = std::atan(c.detuning);
    const SqueezeGrid grid = build_grid(
        c, osc, noises, log_spaced(100.0, probe.f_os_hz / 10.0, 40), {two_xi0});
    double lo = 1e99, hi = 0.0;
    for (double v : grid.total[0]) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK((hi - lo) / lo < 0.05);
  }
}

TEST_CASE("raising the thermal strength never improves the best squeezing") {
  CavityConfig c = test::baseline_cavity();
  NoiseModel noises;
  noises.rin = false;
  noises.pn = false;
  Oscillator osc = fig39_oscillator();
  double prev = 0.0;
  for (double temperature : {50.0, 150.0, 295.0, 500.0}) {
    osc.temperature = temperature;
    const SqueezeGrid grid =
        build_grid(c, osc, noises, log_spaced(100.0, 6e4, 80), angle_grid(91));
    const SqueezeSummary s = extract_summary(grid, 6e4);
    REQUIRE(s.present);
    CHECK(s.n_min >= prev);
    prev = s.n_min;
  }
}

TEST_CASE("unbalanced homodyne composes with the transmission grid") {
  // Noise-budget pathway: lock the detector at constant detected power, read
  // the quadrature it selects, and project the grid through the splitter.
  CavityConfig c = test::baseline_cavity();
  NoiseModel noises;
  noises.pn = false;
  const Oscillator osc = test::single_mode_oscillator(221.0, 50e-12, 2e4);
  const double xi0 = 0.5 * std::atan(c.detuning);
  const SqueezeGrid grid =
      build_grid(c, osc, noises, log_spaced(500.0, 2e4, 20), {0.0, xi0});

  const double t2 = 0.965, r2 = 0.035, e_signal = std::sqrt(80e-6);
  const LoSolution lo = solve_lo_for_quadrature(xi0, 70e-6, t2, r2, e_signal);
  HomodyneSetup h;
  h.t2 = t2;
  h.r2 = r2;
  h.e_signal = e_signal;
  h.e_lo = lo.e_lo;
  h.theta = lo.theta;
  CHECK(std::abs(homodyne_angles(h).phi_s - xi0) < 1e-9);

  const auto rows = noise_budget(grid, xi0);
  for (const BudgetRow& r : rows) {
    const double detected = homodyne_spectrum(r.total, t2, r2);
    CHECK(detected == doctest::Approx(t2 * r.total + r2).epsilon(1e-12));
    // The splitter pulls the measured PSD toward (not past) shot noise.
    if (r.total < 1.0) {
      CHECK(detected >= r.total);
      CHECK(detected < 1.0);
    }
  }
  // Vacuum input stays exactly at shot noise through the splitter.
  CHECK(homodyne_spectrum(1.0, t2, r2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("squeezing area of a synthetic grid matches the trapezoid oracle") {
  SqueezeGrid grid;
  grid.freqs = log_spaced(10.0, 1e4, 500);
  grid.angles = {0.0};
  grid.total.assign(1, std::vector<double>(grid.freqs.size(), 0.0));
  for (std::size_t i = 0; i < grid.freqs.size(); ++i) {
    const double u = std::log10(grid.freqs[i]) - 2.5;
    grid.total[0][i] = 1.1 - 0.6 * std::exp(-u * u * 2.0);
  }
  const SqueezeSummary s = extract_summary(grid, 1e4);
  const double area = squeezing_area_db_decades(grid, s);
  double want = 0.0;  // independent dense trapezoid on the synthetic function
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double l0 = 1.0 + 3.0 * i / n, l1 = 1.0 + 3.0 * (i + 1) / n;
    auto val = [](double l) {
      const double u = l - 2.5;
      return std::max(0.0, -10.0 * std::log10(1.1 - 0.6 * std::exp(-u * u * 2.0)));
    };
    want += 0.5 * (val(l0) + val(l1)) * (l1 - l0);
  }
  CHECK(rel_err(area, want) < 1e-3);
}
