#include <clocale>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ponder/analytic.hpp"
#include "ponder/cavity.hpp"
#include "ponder/config.hpp"
#include "ponder/constants.hpp"
#include "ponder/io.hpp"
#include "ponder/mechanics.hpp"
#include "ponder/metrics.hpp"
#include "ponder/optomech.hpp"
#include "ponder/quantum.hpp"
#include "ponder/sweep.hpp"

namespace {

using json = nlohmann::json;
using namespace ponder;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitOracle = 3;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

int cmd_derive(const std::string& config_path, const std::string& out_path) {
  const RunConfig rc = parse_config(config_path);
  const DerivedCavity d = derive(rc.cavity);
  json j = {
      {"schema_version", 1},
      {"gamma_hwhm_hz", d.gamma_hwhm},
      {"gamma_hwhm_exact_hz", exact_linewidth(rc.cavity)},
      {"finesse", d.finesse},
      {"total_loss", d.total_loss},
      {"escape_refl", d.escape_refl},
      {"escape_trans", d.escape_trans},
      {"p_cav_w", d.p_cav},
      {"p_in_w", d.p_in},
      {"p_trans_w", d.p_trans},
      {"carrier_rotation_rad", d.carrier_rotation},
      {"xi0_rad", d.xi0},
  };
  const SpringResponse spring = optical_spring(
      rc.cavity, d, rc.oscillator.modes.front().modal_mass, rc.grids.f_min,
      GainMode::kApproximate);
  j["f_os_hz"] = spring.omega_os / (2.0 * kPi);
  j["gamma_os_rad_s"] = spring.gamma_os;
  write_text(out_path, j.dump(2) + "\n");
  return kExitOk;
}

SqueezeGrid grid_for(const RunConfig& rc) {
  return build_grid(rc.cavity, rc.oscillator, rc.noises, rc.freq_grid(),
                    rc.angle_grid_rad());
}

int check_failed(const SqueezeGrid& grid) {
  if (grid.failed_freqs.empty()) return kExitOk;
  std::cerr << "singular solve at " << grid.failed_freqs.size() << " frequencies:";
  for (double f : grid.failed_freqs) std::cerr << " " << fmt_full(f);
  std::cerr << "\n";
  return kExitNumerical;
}

int cmd_spectrum(const std::string& config_path, const std::string& out_path) {
  const RunConfig rc = parse_config(config_path);
  const SqueezeGrid grid = grid_for(rc);
  const NoiseSource order[] = {NoiseSource::kQuantum, NoiseSource::kThermal,
                               NoiseSource::kRin, NoiseSource::kPn};
  std::string csv = "# ponder spectrum schema_version=1\n";
  csv += "f_hz,angle_deg,quantum,thermal,rin,pn,total\n";
  for (std::size_t ai = 0; ai < grid.angles.size(); ++ai) {
    for (std::size_t fi = 0; fi < grid.freqs.size(); ++fi) {
      csv += fmt_full(grid.freqs[fi]) + "," + fmt_full(grid.angles[ai] * 180.0 / kPi);
      for (NoiseSource s : order) {
        const auto it = grid.layers.find(s);
        csv += "," + fmt_full(it == grid.layers.end() ? 0.0 : it->second[ai][fi]);
      }
      csv += "," + fmt_full(grid.total[ai][fi]) + "\n";
    }
  }
  write_text(out_path, csv);
  return check_failed(grid);
}

int cmd_budget(const std::string& config_path, double angle_deg, const std::string& out_path) {
  const RunConfig rc = parse_config(config_path);
  const SqueezeGrid grid = grid_for(rc);
  // Snap to the nearest grid angle.
  double target = angle_deg * kPi / 180.0, best = grid.angles.front();
  for (double a : grid.angles)
    if (std::abs(a - target) < std::abs(best - target)) best = a;
  const auto rows = noise_budget(grid, best);
  std::string csv = "# ponder budget schema_version=1 angle_deg=" +
                    fmt_full(best * 180.0 / kPi) + "\n";
  csv += "f_hz,quantum,thermal,rin,pn,total";
  // With an unbalanced homodyne configured, also report the PSD seen on the
  // single photodiode when this quadrature is measured: t^2 S + r^2.
  if (rc.detection) csv += ",detected";
  csv += "\n";
  const NoiseSource order[] = {NoiseSource::kQuantum, NoiseSource::kThermal,
                               NoiseSource::kRin, NoiseSource::kPn};
  for (const BudgetRow& r : rows) {
    csv += fmt_full(r.freq);
    for (NoiseSource s : order) {
      const auto it = r.per_source.find(s);
      csv += "," + fmt_full(it == r.per_source.end() ? 0.0 : it->second);
    }
    csv += "," + fmt_full(r.total);
    if (rc.detection)
      csv += "," + fmt_full(homodyne_spectrum(r.total, rc.detection->t2, rc.detection->r2));
    csv += "\n";
  }
  write_text(out_path, csv);
  return check_failed(grid);
}

int cmd_summary(const std::string& config_path, const std::string& out_path) {
  const RunConfig rc = parse_config(config_path);
  const SqueezeGrid grid = grid_for(rc);
  double f_cap = grid.f_os_hz / rc.grids.f_cap_divisor;
  f_cap = std::clamp(f_cap, grid.freqs.front(), grid.freqs.back());
  const SqueezeSummary s = extract_summary(grid, f_cap);
  json j = {{"schema_version", 1}, {"present", s.present}, {"f_cap_hz", f_cap}};
  if (s.present) {
    j["n_min"] = s.n_min;
    j["n_min_db"] = 10.0 * std::log10(s.n_min);
    j["best_angle_deg"] = s.best_angle * 180.0 / kPi;
    j["best_freq_hz"] = s.best_freq;
    j["f_low_hz"] = s.f_low;
    j["f_high_hz"] = s.f_high;
  }
  write_text(out_path, j.dump(2) + "\n");
  return check_failed(grid);
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path,
              const std::string& objective_name) {
  const SweepSpec spec = parse_sweep_spec(spec_path);
  const std::vector<SweepRow> rows = run_sweep(spec);
  std::string csv = "# ponder sweep schema_version=1\n";
  std::vector<SweepAxis> axes;
  for (const auto& [axis, values] : spec.axes) axes.push_back(axis);
  for (SweepAxis a : axes) csv += std::string(sweep_axis_name(a)) + ",";
  csv += "failed,n_min,best_angle_deg,best_freq_hz,f_low_hz,f_high_hz,"
         "gamma_hwhm_hz,f_os_hz,area_db_decades\n";
  for (const SweepRow& r : rows) {
    for (SweepAxis a : axes) csv += fmt_full(r.values.at(a)) + ",";
    csv += r.failed ? "1" : "0";
    if (r.failed || !r.summary.present) {
      csv += ",,,,,";
    } else {
      csv += "," + fmt_full(r.summary.n_min);
      csv += "," + fmt_full(r.summary.best_angle * 180.0 / kPi);
      csv += "," + fmt_full(r.summary.best_freq);
      csv += "," + fmt_full(r.summary.f_low);
      csv += "," + fmt_full(r.summary.f_high);
    }
    csv += "," + fmt_full(r.gamma_hwhm) + "," + fmt_full(r.f_os) + "," +
           fmt_full(r.area_db_decades) + "\n";
  }
  write_text(out_path, csv);
  if (!objective_name.empty()) {
    SweepObjective obj;
    if (objective_name == "min_n_min") obj = SweepObjective::kMinNMin;
    else if (objective_name == "max_area_db_hz") obj = SweepObjective::kMaxAreaDbHz;
    else if (objective_name == "min_f_low") obj = SweepObjective::kMinFLow;
    else throw std::invalid_argument("unknown objective: " + objective_name);
    const SweepRow best = select_optimum(rows, obj);
    json j = {{"objective", objective_name}};
    for (const auto& [axis, v] : best.values) j[sweep_axis_name(axis)] = v;
    if (best.summary.present) j["n_min"] = best.summary.n_min;
    j["area_db_decades"] = best.area_db_decades;
    std::cout << j.dump(2) << "\n";
  }
  for (const SweepRow& r : rows)
    if (r.failed) return kExitNumerical;
  return kExitOk;
}

int cmd_lock(const std::string& config_path, const std::string& out_path,
             const std::string& margins_path) {
  const RunConfig rc = parse_config(config_path);
  if (!rc.lock) throw std::invalid_argument("lock subcommand needs a [lock] table");
  const DerivedCavity d = derive(rc.cavity);
  const Oscillator& osc = rc.oscillator;
  const CavityConfig cavity = rc.cavity;

  LoopModel loop;
  loop.label = "radiation-pressure lock";
  loop.filter = rc.lock->filter;
  loop.plant = std::function<std::complex<double>(double)>([cavity, d, osc](double f) {
    const SpringResponse sp =
        optical_spring(cavity, d, osc.modes.front().modal_mass, f, GainMode::kApproximate);
    const std::complex<double> g_os = open_loop_gain(sp.k_os, susceptibility(osc, f));
    return 1.0 / (1.0 + g_os);
  });

  const std::vector<double> grid = log_spaced(rc.lock->f_min, rc.lock->f_max, rc.lock->points);
  std::string csv = "# ponder lock schema_version=1\n";
  csv += "element,f_hz,mag_db,phase_deg\n";
  auto emit = [&csv, &grid](const std::string& name, auto&& fn) {
    for (double f : grid) {
      const std::complex<double> v = fn(f);
      csv += name + "," + fmt_full(f) + "," + fmt_full(20.0 * std::log10(std::abs(v))) +
             "," + fmt_full(std::arg(v) * 180.0 / kPi) + "\n";
    }
  };
  emit("plant", [&loop](double f) { return loop.plant_at(f); });
  emit("filter", [&loop](double f) { return loop.filter.eval(f); });
  emit("open_loop", [&loop](double f) { return loop.open_loop_at(f); });
  write_text(out_path, csv);

  const MarginReport rep = loop_margins(loop, grid);
  json j = {{"schema_version", 1},
            {"label", loop.label},
            {"stable", rep.stable},
            {"unity_gain_crossings_hz", rep.unity_gain_crossings},
            {"phase_margins_deg", rep.phase_margins_deg}};
  if (rep.has_gain_margin) j["gain_margin_db"] = rep.gain_margin_db;
  write_text(margins_path, j.dump(2) + "\n");
  return kExitOk;
}

int cmd_modes(const std::string& config_path, const std::string& out_path) {
  const RunConfig rc = parse_config(config_path);
  if (!rc.cantilever) throw std::invalid_argument("modes subcommand needs a [cantilever] table");
  json j = json::array();
  for (const AnalyticMode& m : analytic_modes(*rc.cantilever))
    j.push_back({{"kind", mode_kind_name(m)}, {"freq_hz", m.freq}});
  write_text(out_path, json{{"schema_version", 1}, {"modes", j}}.dump(2) + "\n");
  return kExitOk;
}

// Analytic-vs-numeric consistency suite on the configured cavity, evaluated
// in the plateau between the fundamental and the optical spring.
int cmd_oracle_check(const std::string& config_path) {
  const RunConfig rc = parse_config(config_path);
  const DerivedCavity d = derive(rc.cavity);
  const PortRates rates = make_port_rates(rc.cavity, d);
  const double delta = rc.cavity.detuning;
  if (std::abs(delta) < 0.01)
    throw std::invalid_argument("oracle-check needs |detuning| >= 0.01");
  const SpringResponse spring = optical_spring(
      rc.cavity, d, rc.oscillator.modes.front().modal_mass, 1.0, GainMode::kApproximate);
  const double f_os = spring.omega_os / (2.0 * kPi);
  const double f_fund = rc.oscillator.fundamental_freq();
  if (!(f_os > 25.0 * f_fund))
    throw std::invalid_argument("oracle-check: optical spring too weak for a plateau");
  const double f = std::sqrt(f_fund * f_os);

  const auto tfs = port_transfer_matrices(rates, rc.oscillator, f);
  if (!tfs) {
    std::cerr << "oracle-check: singular solve at " << f << " Hz\n";
    return kExitNumerical;
  }
  int failures = 0;
  auto check = [&failures](const std::string& name, double got, double want, double tol) {
    const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
    const bool ok = err <= tol;
    if (!ok) ++failures;
    std::cout << (ok ? "ok   " : "FAIL ") << name << ": got " << got << " want " << want
              << " (tol " << tol << ")\n";
  };

  NoiseSelection quantum_only;
  const PortCovariance trans =
      port_covariance(*tfs, quantum_only, delta, 1.0, OutputPort::kTransmission);
  const Eigen::Matrix2d want_q = sigma_quantum_port(d.escape_trans, delta).sigma;
  check("sigma_trans_11", trans.matrix(0, 0), want_q(0, 0), 0.02);
  check("sigma_trans_12", trans.matrix(0, 1), want_q(0, 1), 0.02);
  check("sigma_trans_22", trans.matrix(1, 1), want_q(1, 1), 0.02);

  const PortCovariance refl =
      port_covariance(*tfs, quantum_only, delta, 1.0, OutputPort::kReflection);
  const Eigen::Matrix2d want_r = sigma_quantum_port(d.escape_refl, delta).sigma;
  check("sigma_refl_11", refl.matrix(0, 0), want_r(0, 0), 0.02);
  check("sigma_refl_22", refl.matrix(1, 1), want_r(1, 1), 0.02);

  const MultiportUncertainty joint = multiport_uncertainty(*tfs, quantum_only, delta, 1.0);
  const double e_loss = rc.cavity.l2 / d.total_loss;
  check("multiport_det", joint.det, total_uncertainty(0.0, delta, true, e_loss), 0.02);

  if (failures) {
    std::cout << failures << " oracle check(s) failed\n";
    return kExitOracle;
  }
  std::cout << "all oracle checks passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");
  CLI::App app{"detuned-cavity ponderomotive squeezing model"};
  app.require_subcommand(1);

  std::string config_path, out_path, margins_path, spec_path, objective;
  double angle_deg = 0.0;

  auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "TOML run configuration")->required();
  };
  auto add_out = [&out_path](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output path ('-' = stdout)");
  };

  CLI::App* c_derive = app.add_subcommand("derive", "derived cavity quantities as JSON");
  add_config(c_derive);
  add_out(c_derive);
  CLI::App* c_spectrum = app.add_subcommand("spectrum", "noise grid as long-format CSV");
  add_config(c_spectrum);
  add_out(c_spectrum);
  CLI::App* c_budget = app.add_subcommand("budget", "per-source budget at one quadrature");
  add_config(c_budget);
  add_out(c_budget);
  c_budget->add_option("--angle-deg", angle_deg, "quadrature angle in degrees")->required();
  CLI::App* c_summary = app.add_subcommand("summary", "squeezing summary as JSON");
  add_config(c_summary);
  add_out(c_summary);
  CLI::App* c_sweep = app.add_subcommand("sweep", "parameter-grid sweep to CSV");
  c_sweep->add_option("--spec", spec_path, "TOML sweep specification")->required();
  c_sweep->add_option("--out", out_path, "output CSV")->required();
  c_sweep->add_option("--objective", objective, "optionally print the optimum row as JSON");
  CLI::App* c_lock = app.add_subcommand("lock", "lock-loop Bode CSV and margin JSON");
  add_config(c_lock);
  add_out(c_lock);
  c_lock->add_option("--margins", margins_path, "margin report path ('-' = stdout)");
  CLI::App* c_modes = app.add_subcommand("modes", "closed-form cantilever modes as JSON");
  add_config(c_modes);
  add_out(c_modes);
  CLI::App* c_oracle = app.add_subcommand("oracle-check", "analytic-vs-numeric consistency");
  add_config(c_oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitValidation : kExitOk;
  }

  try {
    if (c_derive->parsed()) return cmd_derive(config_path, out_path);
    if (c_spectrum->parsed()) return cmd_spectrum(config_path, out_path);
    if (c_budget->parsed()) return cmd_budget(config_path, angle_deg, out_path);
    if (c_summary->parsed()) return cmd_summary(config_path, out_path);
    if (c_sweep->parsed()) return cmd_sweep(spec_path, out_path, objective);
    if (c_lock->parsed()) return cmd_lock(config_path, out_path, margins_path);
    if (c_modes->parsed()) return cmd_modes(config_path, out_path);
    if (c_oracle->parsed()) return cmd_oracle_check(config_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}
