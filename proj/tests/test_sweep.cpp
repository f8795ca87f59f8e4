#include <doctest.h>

#include <cmath>

#include "ponder/metrics.hpp"
#include "ponder/sweep.hpp"
#include "test_util.hpp"

using namespace ponder;
using test::rel_err;

namespace {

SweepSpec small_spec() {
  SweepSpec spec;
  spec.base = test::baseline_cavity();
  spec.oscillator = test::single_mode_oscillator(221.0, 50e-12, 2e4);
  spec.noises.laser.rin_asd = 1e-8;
  spec.noises.pn = false;
  spec.freqs = log_spaced(100.0, 2e5, 60);
  spec.angles = angle_grid(61);
  return spec;
}

}  // namespace

TEST_CASE("degenerate sweep equals a direct metrics run") {
  SweepSpec spec = small_spec();
  spec.axes[SweepAxis::kT2] = {250e-6};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 1);
  REQUIRE_FALSE(rows[0].failed);

  const SqueezeGrid grid =
      build_grid(spec.base, spec.oscillator, spec.noises, spec.freqs, spec.angles);
  double f_cap = grid.f_os_hz / spec.f_cap_divisor;
  f_cap = std::clamp(f_cap, spec.freqs.front(), spec.freqs.back());
  const SqueezeSummary direct = extract_summary(grid, f_cap);
  CHECK(rows[0].summary.present == direct.present);
  CHECK(rows[0].summary.n_min == doctest::Approx(direct.n_min).epsilon(1e-14));
  CHECK(rows[0].summary.best_freq == doctest::Approx(direct.best_freq).epsilon(1e-14));
}

TEST_CASE("row order is lexicographic and worker-count independent") {
  SweepSpec spec = small_spec();
  spec.freqs = log_spaced(500.0, 1e5, 12);
  spec.angles = angle_grid(13);
  spec.axes[SweepAxis::kT2] = {100e-6, 250e-6, 600e-6};
  spec.axes[SweepAxis::kDetuning] = {0.4, 0.8};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 6);
  // t2 is the slower axis (enum order), detuning the faster one.
  CHECK(rows[0].values.at(SweepAxis::kT2) == 100e-6);
  CHECK(rows[0].values.at(SweepAxis::kDetuning) == 0.4);
  CHECK(rows[1].values.at(SweepAxis::kT2) == 100e-6);
  CHECK(rows[1].values.at(SweepAxis::kDetuning) == 0.8);
  CHECK(rows[5].values.at(SweepAxis::kT2) == 600e-6);

  setenv("PONDER_THREADS", "1", 1);
  const auto serial = run_sweep(spec);
  unsetenv("PONDER_THREADS");
  REQUIRE(serial.size() == rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(serial[i].values == rows[i].values);
    CHECK(serial[i].summary.n_min == rows[i].summary.n_min);
    CHECK(serial[i].area_db_decades == rows[i].area_db_decades);
  }
}

TEST_CASE("sweep caps the configuration count") {
  SweepSpec spec = small_spec();
  spec.axes[SweepAxis::kT2] = {1e-6, 2e-6, 3e-6, 4e-6};
  spec.axes[SweepAxis::kT1] = {1e-6, 2e-6, 3e-6};
  spec.max_configs = 10;
  CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
}

TEST_CASE("invalid configurations become error rows, not aborts") {
  SweepSpec spec = small_spec();
  spec.axes[SweepAxis::kT2] = {250e-6, 0.9999};  // second breaks t1+t2+l1+l2 < 1
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].failed);
  CHECK(rows[1].failed);
  CHECK_FALSE(rows[1].error.empty());
}

TEST_CASE("no-classical-noise squeezing improves monotonically with escape efficiency") {
  SweepSpec spec = small_spec();
  spec.noises.thermal = false;
  spec.noises.rin = false;
  spec.noises.pn = false;
  spec.oscillator = test::single_mode_oscillator(10.0, 50e-12, 1e4);
  spec.freqs = log_spaced(200.0, 2e3, 10);  // deep plateau band
  spec.angles = angle_grid(181);
  spec.axes[SweepAxis::kT2] = {100e-6, 200e-6, 400e-6, 800e-6};
  const auto rows = run_sweep(spec);
  double prev = 1.0;
  for (const auto& r : rows) {
    REQUIRE_FALSE(r.failed);
    REQUIRE(r.summary.present);
    CHECK(r.summary.n_min < prev);  // higher T2 -> higher E^T -> deeper squeezing
    prev = r.summary.n_min;
  }
}

TEST_CASE("select_optimum objectives and tie-breaks") {
  SweepRow a, b, c;
  a.values[SweepAxis::kT2] = 250e-6;
  a.summary.present = true;
  a.summary.n_min = 0.5;
  a.summary.f_low = 100.0;
  a.area_db_decades = 3.0;
  b.values[SweepAxis::kT2] = 600e-6;
  b.summary.present = true;
  b.summary.n_min = 0.5;
  b.summary.f_low = 50.0;
  b.area_db_decades = 4.0;
  c.values[SweepAxis::kT2] = 400e-6;
  c.failed = true;

  SUBCASE("single row returns itself") {
    const SweepRow best = select_optimum({a}, SweepObjective::kMinNMin);
    CHECK(best.values.at(SweepAxis::kT2) == 250e-6);
  }
  SUBCASE("equal n_min breaks toward smaller t2") {
    const SweepRow best = select_optimum({b, a, c}, SweepObjective::kMinNMin);
    CHECK(best.values.at(SweepAxis::kT2) == 250e-6);
  }
  SUBCASE("area objective picks the larger area") {
    const SweepRow best = select_optimum({a, b}, SweepObjective::kMaxAreaDbHz);
    CHECK(best.values.at(SweepAxis::kT2) == 600e-6);
  }
  SUBCASE("f_low objective picks the lower start frequency") {
    const SweepRow best = select_optimum({a, b}, SweepObjective::kMinFLow);
    CHECK(best.values.at(SweepAxis::kT2) == 600e-6);
  }
  SUBCASE("all-error input is rejected") {
    CHECK_THROWS_AS(select_optimum({c}, SweepObjective::kMinNMin), std::invalid_argument);
  }
}

TEST_CASE("optimal port transmission drops as classical noise rises") {
  // Two-level noise ladder: the T2 that minimizes n_min moves toward lower
  // transmission (higher finesse) when the laser noise worsens.
  auto optimum_t2 = [](double rin) {
    SweepSpec spec;
    spec.base = test::baseline_cavity();
    spec.base.mode_matching = 0.4;
    spec.oscillator.temperature = 295.0;
    spec.oscillator.modes = {{221.0, 50e-12, 1.0 / 20000.0, DampingKind::kStructural},
                             {3700.0, 1e-9, 1.0 / 20000.0, DampingKind::kStructural},
                             {15000.0, 5e-9, 1.0 / 20000.0, DampingKind::kStructural},
                             {28000.0, 2e-8, 1.0 / 1000.0, DampingKind::kStructural}};
    spec.noises.laser.rin_asd = rin;
    spec.noises.pn = false;
    spec.freqs = log_spaced(100.0, 2e5, 60);
    spec.angles = angle_grid(61);
    spec.axes[SweepAxis::kT2] = {50e-6, 100e-6, 250e-6, 600e-6, 1000e-6, 1600e-6};
    const SweepRow best = select_optimum(run_sweep(spec), SweepObjective::kMinNMin);
    return best.values.at(SweepAxis::kT2);
  };
  const double quiet_t2 = optimum_t2(1e-8);
  const double noisy_t2 = optimum_t2(5e-8);
  CHECK(noisy_t2 < quiet_t2);
}

TEST_CASE("area objective agrees with a trapezoid oracle on the stored spectrum") {
  SweepSpec spec = small_spec();
  spec.axes[SweepAxis::kDetuning] = {0.4, 0.6};
  const auto rows = run_sweep(spec);
  for (const auto& r : rows) {
    REQUIRE_FALSE(r.failed);
    // Recompute the area independently from a fresh grid.
    CavityConfig cfg = spec.base;
    cfg.detuning = r.values.at(SweepAxis::kDetuning);
    const SqueezeGrid grid =
        build_grid(cfg, spec.oscillator, spec.noises, spec.freqs, spec.angles);
    std::size_t ai = 0;
    for (std::size_t i = 0; i < grid.angles.size(); ++i)
      if (std::abs(grid.angles[i] - r.summary.best_angle) < 1e-12) ai = i;
    double want = 0.0;
    for (std::size_t i = 0; i + 1 < grid.freqs.size(); ++i) {
      const double v0 = std::max(0.0, -10.0 * std::log10(grid.total[ai][i]));
      const double v1 = std::max(0.0, -10.0 * std::log10(grid.total[ai][i + 1]));
      want += 0.5 * (v0 + v1) * (std::log10(grid.freqs[i + 1]) - std::log10(grid.freqs[i]));
    }
    CHECK(rel_err(r.area_db_decades, want) < 1e-12);
  }
}
