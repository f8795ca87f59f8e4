#pragma once

#include <map>
#include <string>
#include <vector>

#include "ponder/cavity.hpp"
#include "ponder/mechanics.hpp"
#include "ponder/metrics.hpp"

namespace ponder {

enum class SweepAxis { kT1, kT2, kL2, kDetuning, kModeMatching, kPower };

const char* sweep_axis_name(SweepAxis axis);

/// Cartesian parameter sweep. Axes are canonically ordered by the enum above;
/// rows enumerate the product lexicographically in that order.
struct SweepSpec {
  std::map<SweepAxis, std::vector<double>> axes;
  CavityConfig base;
  Oscillator oscillator;
  NoiseModel noises;
  std::vector<double> freqs;
  std::vector<double> angles;
  double f_cap_divisor = 3.0;  // f_cap = f_OS / divisor, clamped to the grid
  std::size_t max_configs = 1000000;

  void validate() const;
  std::size_t total_configs() const;
};

struct SweepRow {
  std::map<SweepAxis, double> values;
  bool failed = false;
  std::string error;
  SqueezeSummary summary;
  double gamma_hwhm = 0.0;        // Hz
  double f_os = 0.0;              // Hz
  double area_db_decades = 0.0;   // squeezing area at the best angle
};

/// Run the whole sweep. Row order is deterministic regardless of the worker
/// count; configurations that fail carry an error marker instead of aborting.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

enum class SweepObjective { kMinNMin, kMaxAreaDbHz, kMinFLow };

/// Pick the best non-error row; ties break toward smaller t2, then smaller t1,
/// then smaller |detuning|. Throws if every row is an error row.
SweepRow select_optimum(const std::vector<SweepRow>& rows, SweepObjective objective);

}  // namespace ponder
