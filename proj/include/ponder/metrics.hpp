#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ponder/cavity.hpp"
#include "ponder/mechanics.hpp"
#include "ponder/quantum.hpp"

namespace ponder {

/// Which noise sources feed the grid. Laser phase noise defaults off: with
/// the local oscillator drawn from the same laser it is common-mode rejected
/// in the homodyne readout, and the free-running NPRO level would otherwise
/// bury the audio band.
struct NoiseModel {
  bool thermal = true;
  bool rin = true;
  bool pn = false;
  LaserNoise laser;
};

enum class NoiseSource { kQuantum, kThermal, kRin, kPn };

inline const char* noise_source_name(NoiseSource s) {
  switch (s) {
    case NoiseSource::kQuantum: return "quantum";
    case NoiseSource::kThermal: return "thermal";
    case NoiseSource::kRin: return "rin";
    case NoiseSource::kPn: return "pn";
  }
  return "?";
}

/// (frequency x quadrature x source) noise grid, PSD relative to shot noise.
/// Layer values are stored as layer[angle_index][freq_index].
struct SqueezeGrid {
  std::vector<double> freqs;   // Hz, ascending
  std::vector<double> angles;  // rad, within [0, pi)
  std::map<NoiseSource, std::vector<std::vector<double>>> layers;
  std::vector<std::vector<double>> total;
  std::vector<double> failed_freqs;  // singular solves, flagged not zeroed
  double f_os_hz = 0.0;              // optical spring frequency of this config
};

SqueezeGrid build_grid(const CavityConfig& config, const Oscillator& osc,
                       const NoiseModel& noises, const std::vector<double>& freqs,
                       const std::vector<double>& angles);

/// Squeezing summary extracted from a grid: minimum-noise cell below f_cap
/// and the shot-noise crossings bracketing it at the best angle.
struct SqueezeSummary {
  bool present = false;
  double n_min = 1.0;
  double best_angle = 0.0;  // rad
  double best_freq = 0.0;   // Hz
  double f_low = 0.0;       // Hz
  double f_high = 0.0;      // Hz
};
SqueezeSummary extract_summary(const SqueezeGrid& grid, double f_cap);

/// Per-source budget at one angle, CSV-ready.
struct BudgetRow {
  double freq = 0.0;
  std::map<NoiseSource, double> per_source;
  double total = 0.0;
};
std::vector<BudgetRow> noise_budget(const SqueezeGrid& grid, double angle);

/// Area under the squeezing curve at the best angle:
/// integral of max(0, -10 log10 N) d(log10 f), in dB * decades.
double squeezing_area_db_decades(const SqueezeGrid& grid, const SqueezeSummary& summary);

/// Log-spaced grid helper, inclusive of both ends.
std::vector<double> log_spaced(double f_lo, double f_hi, std::size_t n);
/// Uniform angle grid over [0, pi), n points.
std::vector<double> angle_grid(std::size_t n);

}  // namespace ponder
