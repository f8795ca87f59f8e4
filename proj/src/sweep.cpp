#include "ponder/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ponder/threading.hpp"

namespace ponder {

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kT1: return "t1";
    case SweepAxis::kT2: return "t2";
    case SweepAxis::kL2: return "l2";
    case SweepAxis::kDetuning: return "detuning";
    case SweepAxis::kModeMatching: return "mode_matching";
    case SweepAxis::kPower: return "power";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (axes.empty()) throw std::invalid_argument("sweep: at least one axis required");
  for (const auto& [axis, values] : axes) {
    if (values.empty())
      throw std::invalid_argument(std::string("sweep: axis ") + sweep_axis_name(axis) +
                                  " is empty");
    for (size_t i = 1; i < values.size(); ++i)
      if (!(values[i] > values[i - 1]))
        throw std::invalid_argument(std::string("sweep: axis ") + sweep_axis_name(axis) +
                                    " must be sorted ascending");
  }
  if (total_configs() > max_configs)
    throw std::invalid_argument("sweep: configuration count exceeds the cap");
  oscillator.validate();
}

std::size_t SweepSpec::total_configs() const {
  std::size_t n = 1;
  for (const auto& [axis, values] : axes) n *= values.size();
  return n;
}

namespace {

CavityConfig apply_axes(const SweepSpec& spec, std::size_t index,
                        std::map<SweepAxis, double>* values) {
  CavityConfig cfg = spec.base;
  // Lexicographic decode, last axis fastest (std::map iterates in enum order).
  std::size_t stride = spec.total_configs();
  for (const auto& [axis, axis_values] : spec.axes) {
    stride /= axis_values.size();
    const double v = axis_values[(index / stride) % axis_values.size()];
    (*values)[axis] = v;
    switch (axis) {
      case SweepAxis::kT1: cfg.t1 = v; break;
      case SweepAxis::kT2: cfg.t2 = v; break;
      case SweepAxis::kL2: cfg.l2 = v; break;
      case SweepAxis::kDetuning: cfg.detuning = v; break;
      case SweepAxis::kModeMatching: cfg.mode_matching = v; break;
      case SweepAxis::kPower: cfg.power_watts = v; break;
    }
  }
  return cfg;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n = spec.total_configs();
  std::vector<SweepRow> rows(n);
  parallel_for(n, [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      const CavityConfig cfg = apply_axes(spec, i, &row.values);
      const SqueezeGrid grid =
          build_grid(cfg, spec.oscillator, spec.noises, spec.freqs, spec.angles);
      if (!grid.failed_freqs.empty()) {
        row.failed = true;
        row.error = "singular solve at " + std::to_string(grid.failed_freqs.size()) +
                    " frequencies";
        return;
      }
      const DerivedCavity derived = derive(cfg);
      row.gamma_hwhm = derived.gamma_hwhm;
      row.f_os = grid.f_os_hz;
      double f_cap = grid.f_os_hz / spec.f_cap_divisor;
      f_cap = std::clamp(f_cap, grid.freqs.front(), grid.freqs.back());
      row.summary = extract_summary(grid, f_cap);
      row.area_db_decades = squeezing_area_db_decades(grid, row.summary);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });
  return rows;
}

SweepRow select_optimum(const std::vector<SweepRow>& rows, SweepObjective objective) {
  auto axis_value = [](const SweepRow& r, SweepAxis a, double fallback) {
    const auto it = r.values.find(a);
    return it == r.values.end() ? fallback : it->second;
  };
  auto score = [objective](const SweepRow& r) {
    switch (objective) {
      case SweepObjective::kMinNMin:
        return r.summary.present ? r.summary.n_min : std::numeric_limits<double>::infinity();
      case SweepObjective::kMaxAreaDbHz:
        return -r.area_db_decades;
      case SweepObjective::kMinFLow:
        return r.summary.present ? r.summary.f_low : std::numeric_limits<double>::infinity();
    }
    return std::numeric_limits<double>::infinity();
  };
  const SweepRow* best = nullptr;
  for (const SweepRow& r : rows) {
    if (r.failed) continue;
    if (!best) {
      best = &r;
      continue;
    }
    const double a = score(r), b = score(*best);
    if (a < b) {
      best = &r;
    } else if (a == b) {
      auto key = [&](const SweepRow& x) {
        return std::make_tuple(axis_value(x, SweepAxis::kT2, 0.0),
                               axis_value(x, SweepAxis::kT1, 0.0),
                               std::abs(axis_value(x, SweepAxis::kDetuning, 0.0)));
      };
      if (key(r) < key(*best)) best = &r;
    }
  }
  if (!best) throw std::invalid_argument("select_optimum: no non-error rows");
  return *best;
}

}  // namespace ponder
