#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ponder/cavity.hpp"
#include "ponder/detection.hpp"
#include "ponder/mechanics.hpp"
#include "ponder/metrics.hpp"
#include "ponder/optomech.hpp"
#include "ponder/sweep.hpp"

namespace ponder {

struct GridSpec {
  double f_min = 10.0;          // Hz
  double f_max = 1e6;           // Hz
  std::size_t f_points = 400;
  std::size_t angle_points = 181;
  double f_cap_divisor = 3.0;   // f_cap = f_OS / divisor
};

struct LockConfig {
  RationalFilter filter;
  double f_min = 100.0;   // Hz
  double f_max = 1e6;     // Hz
  std::size_t points = 600;
};

/// Fully validated run configuration, defaults applied. All units SI; keys in
/// the TOML file carry unit suffixes (_m, _w, _hz, _k).
struct RunConfig {
  int schema_version = 1;
  CavityConfig cavity;
  LaserNoise laser;
  Oscillator oscillator;
  NoiseModel noises;
  GridSpec grids;
  std::optional<HomodyneSetup> detection;
  std::optional<CantileverGeometry> cantilever;
  std::optional<LockConfig> lock;

  std::vector<double> freq_grid() const;
  std::vector<double> angle_grid_rad() const;
};

/// Parse and validate a TOML run configuration. Errors carry key paths.
RunConfig parse_config(const std::string& path);

/// Parse a sweep specification: a run configuration plus a [sweep] table
/// holding the axes. Relative CSV paths resolve against the spec file.
SweepSpec parse_sweep_spec(const std::string& path);

}  // namespace ponder
