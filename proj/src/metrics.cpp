#include "ponder/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ponder/constants.hpp"
#include "ponder/optomech.hpp"
#include "ponder/threading.hpp"

namespace ponder {

std::vector<double> log_spaced(double f_lo, double f_hi, std::size_t n) {
  if (!(f_lo > 0.0 && f_hi > f_lo)) throw std::invalid_argument("log_spaced: need 0 < lo < hi");
  if (n < 2) throw std::invalid_argument("log_spaced: need n >= 2");
  std::vector<double> out(n);
  const double l0 = std::log10(f_lo), l1 = std::log10(f_hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  out.front() = f_lo;
  out.back() = f_hi;
  return out;
}

std::vector<double> angle_grid(std::size_t n) {
  if (n < 1) throw std::invalid_argument("angle_grid: need n >= 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = kPi * static_cast<double>(i) / static_cast<double>(n);
  return out;
}

SqueezeGrid build_grid(const CavityConfig& config, const Oscillator& osc,
                       const NoiseModel& noises, const std::vector<double>& freqs,
                       const std::vector<double>& angles) {
  osc.validate();
  if (freqs.empty() || angles.empty())
    throw std::invalid_argument("build_grid: empty frequency or angle grid");
  for (size_t i = 0; i < freqs.size(); ++i) {
    if (!(freqs[i] > 0.0)) throw std::invalid_argument("build_grid: frequencies must be > 0");
    if (i > 0 && !(freqs[i] > freqs[i - 1]))
      throw std::invalid_argument("build_grid: frequencies must be strictly ascending");
  }
  for (double a : angles)
    if (!(a >= 0.0 && a < kPi))
      throw std::invalid_argument("build_grid: angles must lie in [0, pi)");

  const DerivedCavity derived = derive(config);
  const PortRates rates = make_port_rates(config, derived);
  const OutputPort port = (config.measurement_port == MeasurementPort::kTransmission)
                              ? OutputPort::kTransmission
                              : OutputPort::kReflection;
  const double mm = config.mode_matching;
  const double coupled_p_in = mm * derived.p_in;

  SqueezeGrid grid;
  grid.freqs = freqs;
  grid.angles = angles;
  const SpringResponse spring = optical_spring(config, derived, osc.modes.front().modal_mass,
                                               freqs.front(), GainMode::kApproximate);
  grid.f_os_hz = spring.omega_os / (2.0 * kPi);

  std::vector<NoiseSource> sources{NoiseSource::kQuantum};
  if (noises.thermal) sources.push_back(NoiseSource::kThermal);
  if (noises.rin) sources.push_back(NoiseSource::kRin);
  if (noises.pn) sources.push_back(NoiseSource::kPn);
  // Layer storage is laid out before the parallel region; workers write only
  // through these pointers, into disjoint frequency columns.
  std::vector<std::vector<std::vector<double>>*> layer_of(sources.size());
  for (std::size_t si = 0; si < sources.size(); ++si) {
    auto& layer = grid.layers[sources[si]];
    layer.assign(angles.size(), std::vector<double>(freqs.size(), 0.0));
    layer_of[si] = &layer;
  }
  grid.total.assign(angles.size(), std::vector<double>(freqs.size(), 0.0));

  std::vector<char> failed(freqs.size(), 0);
  parallel_for(freqs.size(), [&](std::size_t fi) {
    const double f = freqs[fi];
    const auto tfs = port_transfer_matrices(rates, osc, f);
    if (!tfs) {
      failed[fi] = 1;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t ai = 0; ai < angles.size(); ++ai) {
        for (auto* layer : layer_of) (*layer)[ai][fi] = nan;
        grid.total[ai][fi] = nan;
      }
      return;
    }
    const ClassicalNoisePsd cls =
        classical_noise_psd(noises.laser, coupled_p_in, config.wavelength, f);
    for (std::size_t si = 0; si < sources.size(); ++si) {
      const NoiseSource s = sources[si];
      NoiseSelection sel;
      sel.vacuum = (s == NoiseSource::kQuantum);
      sel.s_rin = (s == NoiseSource::kRin) ? cls.s_rin : 0.0;
      sel.s_pn = (s == NoiseSource::kPn) ? cls.s_pn : 0.0;
      sel.s_f_th =
          (s == NoiseSource::kThermal) ? thermal_force_psd_effective(osc, f) : 0.0;
      const PortCovariance cov = port_covariance(*tfs, sel, config.detuning, mm, port);
      auto& layer = *layer_of[si];
      for (std::size_t ai = 0; ai < angles.size(); ++ai) {
        const double n = quadrature_noise(cov, angles[ai]);
        layer[ai][fi] = n;
        grid.total[ai][fi] += n;
      }
    }
  });
  for (std::size_t fi = 0; fi < freqs.size(); ++fi)
    if (failed[fi]) grid.failed_freqs.push_back(freqs[fi]);
  return grid;
}

SqueezeSummary extract_summary(const SqueezeGrid& grid, double f_cap) {
  if (!(f_cap >= grid.freqs.front() && f_cap <= grid.freqs.back()))
    throw std::invalid_argument("extract_summary: f_cap outside grid range");
  SqueezeSummary s;
  double best = 1.0;
  std::size_t best_ai = 0, best_fi = 0;
  bool found = false;
  for (std::size_t ai = 0; ai < grid.angles.size(); ++ai) {
    for (std::size_t fi = 0; fi < grid.freqs.size() && grid.freqs[fi] <= f_cap; ++fi) {
      const double n = grid.total[ai][fi];
      if (std::isfinite(n) && n < best) {  // ties keep the lower angle, then lower freq
        best = n;
        best_ai = ai;
        best_fi = fi;
        found = true;
      }
    }
  }
  if (!found) return s;  // nothing below shot noise
  s.present = true;
  s.n_min = best;
  s.best_angle = grid.angles[best_ai];
  s.best_freq = grid.freqs[best_fi];

  // Outermost shot-noise crossings at the best angle, interpolated in
  // (log f, total).
  const std::vector<double>& trace = grid.total[best_ai];
  auto interp_crossing = [&](std::size_t i) {
    const double t = (1.0 - trace[i]) / (trace[i + 1] - trace[i]);
    return std::exp(std::log(grid.freqs[i]) +
                    t * (std::log(grid.freqs[i + 1]) - std::log(grid.freqs[i])));
  };
  s.f_low = grid.freqs.front();
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (trace[i] > 1.0 && trace[i + 1] <= 1.0) {
      s.f_low = interp_crossing(i);
      break;
    }
    if (trace[i] <= 1.0) break;  // already squeezed at the grid edge
  }
  s.f_high = grid.freqs.back();
  for (std::size_t i = trace.size() - 1; i-- > 0;) {
    if (trace[i] <= 1.0 && trace[i + 1] > 1.0) {
      s.f_high = interp_crossing(i);
      break;
    }
    if (trace[i + 1] <= 1.0) break;
  }
  return s;
}

std::vector<BudgetRow> noise_budget(const SqueezeGrid& grid, double angle) {
  std::size_t ai = grid.angles.size();
  for (std::size_t i = 0; i < grid.angles.size(); ++i)
    if (std::abs(grid.angles[i] - angle) < 1e-12) ai = i;
  if (ai == grid.angles.size())
    throw std::invalid_argument("noise_budget: angle not present in grid");
  std::vector<BudgetRow> rows(grid.freqs.size());
  for (std::size_t fi = 0; fi < grid.freqs.size(); ++fi) {
    rows[fi].freq = grid.freqs[fi];
    for (const auto& [source, layer] : grid.layers)
      rows[fi].per_source[source] = layer[ai][fi];
    rows[fi].total = grid.total[ai][fi];
  }
  return rows;
}

double squeezing_area_db_decades(const SqueezeGrid& grid, const SqueezeSummary& summary) {
  if (!summary.present) return 0.0;
  std::size_t ai = 0;
  for (std::size_t i = 0; i < grid.angles.size(); ++i)
    if (std::abs(grid.angles[i] - summary.best_angle) < 1e-12) ai = i;
  const std::vector<double>& trace = grid.total[ai];
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const double a = std::max(0.0, -10.0 * std::log10(trace[i]));
    const double b = std::max(0.0, -10.0 * std::log10(trace[i + 1]));
    area += 0.5 * (a + b) * (std::log10(grid.freqs[i + 1]) - std::log10(grid.freqs[i]));
  }
  return area;
}

}  // namespace ponder
