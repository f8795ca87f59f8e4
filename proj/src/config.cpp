#include "ponder/config.hpp"

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "ponder/toml.hpp"

namespace ponder {

namespace {

CavityConfig parse_cavity(const toml::Table& t) {
  CavityConfig c;
  c.length = toml::get_number(t, "length_m", "cavity");
  c.wavelength = toml::get_number(t, "wavelength_m", "cavity");
  c.t1 = toml::get_number(t, "t1", "cavity");
  c.t2 = toml::get_number(t, "t2", "cavity");
  c.l1 = toml::get_number_or(t, "l1", 0.0);
  c.l2 = toml::get_number_or(t, "l2", 0.0);
  c.detuning = toml::get_number(t, "detuning", "cavity");
  const std::string kind = toml::get_string_or(t, "power_kind", "intracavity_resonant");
  if (kind == "input") {
    c.power_kind = PowerSpec::kInput;
  } else if (kind == "intracavity_resonant") {
    c.power_kind = PowerSpec::kIntracavityResonant;
  } else {
    throw std::invalid_argument("cavity.power_kind must be 'input' or 'intracavity_resonant'");
  }
  c.power_watts = toml::get_number(t, "power_w", "cavity");
  c.mode_matching = toml::get_number_or(t, "mode_matching", 1.0);
  const std::string port = toml::get_string_or(t, "measurement_port", "transmission");
  if (port == "transmission") {
    c.measurement_port = MeasurementPort::kTransmission;
  } else if (port == "reflection") {
    c.measurement_port = MeasurementPort::kReflection;
  } else {
    throw std::invalid_argument("cavity.measurement_port must be 'transmission' or 'reflection'");
  }
  c.validate();
  return c;
}

LaserNoise parse_laser(const toml::Table* t) {
  LaserNoise l;
  l.rin_asd = 1e-8;          // default, 1/sqrt(Hz)
  l.freq_noise_coeff = 1e8;  // default NPRO law, Hz^3
  l.freq_noise_exponent = 2.0;
  if (t) {
    l.rin_asd = toml::get_number_or(*t, "rin_asd", l.rin_asd);
    l.freq_noise_coeff = toml::get_number_or(*t, "freq_noise_coeff", l.freq_noise_coeff);
    l.freq_noise_exponent = toml::get_number_or(*t, "freq_noise_exponent", l.freq_noise_exponent);
  }
  l.validate();
  return l;
}

Oscillator parse_oscillator(const toml::Table& t, const std::filesystem::path& base_dir) {
  Oscillator osc;
  osc.temperature = toml::get_number_or(t, "temperature_k", 295.0);
  const double default_q = toml::get_number_or(t, "default_q", 20000.0);
  if (t.count("modes_csv")) {
    const std::string rel = toml::get_string(t, "modes_csv", "oscillator");
    const std::filesystem::path p = std::filesystem::path(rel).is_absolute()
                                        ? std::filesystem::path(rel)
                                        : base_dir / rel;
    osc.modes = load_modes_csv(p.string());
  } else {
    const auto freqs = toml::get_array(t, "freq_hz", "oscillator");
    const auto masses = toml::get_array(t, "modal_mass_kg", "oscillator");
    if (freqs.size() != masses.size())
      throw std::invalid_argument("oscillator.freq_hz and modal_mass_kg differ in length");
    std::vector<double> qs(freqs.size(), default_q);
    if (t.count("q")) {
      qs = toml::get_array(t, "q", "oscillator");
      if (qs.size() != freqs.size())
        throw std::invalid_argument("oscillator.q length mismatch");
    }
    for (size_t i = 0; i < freqs.size(); ++i) {
      MechMode m;
      m.freq = freqs[i];
      m.modal_mass = masses[i];
      if (!(qs[i] > 1.0))
        throw std::invalid_argument("oscillator.q[" + std::to_string(i) + "] must be > 1");
      m.loss_factor = 1.0 / qs[i];
      osc.modes.push_back(m);
    }
  }
  // Phenomenological per-mode Q override (e.g. low-Q drumhead modes).
  if (t.count("q_override_index")) {
    const auto idx = toml::get_array(t, "q_override_index", "oscillator");
    const auto qv = toml::get_array(t, "q_override_q", "oscillator");
    if (idx.size() != qv.size())
      throw std::invalid_argument("oscillator.q_override arrays differ in length");
    for (size_t i = 0; i < idx.size(); ++i) {
      const auto j = static_cast<size_t>(idx[i]);
      if (j >= osc.modes.size())
        throw std::invalid_argument("oscillator.q_override_index out of range");
      if (!(qv[i] > 1.0)) throw std::invalid_argument("oscillator.q_override_q must be > 1");
      osc.modes[j].loss_factor = 1.0 / qv[i];
    }
  }
  const std::string damping = toml::get_string_or(t, "damping", "structural");
  for (auto& m : osc.modes)
    m.damping_kind =
        (damping == "viscous") ? DampingKind::kViscous : DampingKind::kStructural;
  osc.validate();
  return osc;
}

GridSpec parse_grids(const toml::Table* t) {
  GridSpec g;
  if (t) {
    g.f_min = toml::get_number_or(*t, "f_min_hz", g.f_min);
    g.f_max = toml::get_number_or(*t, "f_max_hz", g.f_max);
    g.f_points = static_cast<std::size_t>(toml::get_number_or(*t, "f_points", 400));
    g.angle_points = static_cast<std::size_t>(toml::get_number_or(*t, "angle_points", 181));
    g.f_cap_divisor = toml::get_number_or(*t, "f_cap_divisor", 3.0);
  }
  if (!(g.f_min > 0.0))
    throw std::invalid_argument("grids.f_min_hz must be > 0 (f = 0 is singular)");
  if (!(g.f_max > g.f_min)) throw std::invalid_argument("grids.f_max_hz must exceed f_min_hz");
  if (g.f_points < 2 || g.angle_points < 1)
    throw std::invalid_argument("grids: need f_points >= 2 and angle_points >= 1");
  if (!(g.f_cap_divisor > 0.0)) throw std::invalid_argument("grids.f_cap_divisor must be > 0");
  return g;
}

}  // namespace

std::vector<double> RunConfig::freq_grid() const {
  return log_spaced(grids.f_min, grids.f_max, grids.f_points);
}

std::vector<double> RunConfig::angle_grid_rad() const { return angle_grid(grids.angle_points); }

RunConfig parse_config(const std::string& path) {
  const toml::Document doc = toml::parse_file(path);
  const std::filesystem::path base_dir = std::filesystem::path(path).parent_path();
  RunConfig rc;
  rc.schema_version =
      static_cast<int>(toml::get_number_or(doc.root, "schema_version", 1.0));
  if (rc.schema_version != 1)
    throw std::invalid_argument("unsupported schema_version (expected 1)");
  rc.cavity = parse_cavity(doc.table("cavity"));
  rc.laser = parse_laser(doc.has_table("laser") ? &doc.table("laser") : nullptr);
  rc.oscillator = parse_oscillator(doc.table("oscillator"), base_dir);
  rc.noises.laser = rc.laser;
  if (doc.has_table("noise")) {
    const toml::Table& t = doc.table("noise");
    rc.noises.thermal = toml::get_bool_or(t, "thermal", true);
    rc.noises.rin = toml::get_bool_or(t, "rin", true);
    rc.noises.pn = toml::get_bool_or(t, "pn", false);
  }
  rc.grids = parse_grids(doc.has_table("grids") ? &doc.table("grids") : nullptr);
  if (doc.has_table("detection")) {
    const toml::Table& t = doc.table("detection");
    HomodyneSetup h;
    h.t2 = toml::get_number(t, "t2", "detection");
    h.r2 = toml::get_number_or(t, "r2", 1.0 - h.t2);
    h.e_signal = toml::get_number(t, "e_signal_sqrtw", "detection");
    h.e_lo = toml::get_number(t, "e_lo_sqrtw", "detection");
    h.theta = toml::get_number_or(t, "theta_rad", 0.0);
    h.validate();
    rc.detection = h;
  }
  if (doc.has_table("cantilever")) {
    const toml::Table& t = doc.table("cantilever");
    CantileverGeometry g;
    g.length_l = toml::get_number(t, "length_m", "cantilever");
    g.radius_r = toml::get_number(t, "radius_m", "cantilever");
    g.width_w = toml::get_number(t, "width_m", "cantilever");
    g.thickness_cantilever = toml::get_number(t, "thickness_cantilever_m", "cantilever");
    g.thickness_mirror = toml::get_number(t, "thickness_mirror_m", "cantilever");
    g.youngs_modulus = toml::get_number_or(t, "youngs_modulus_pa", 85e9);
    g.shear_modulus = toml::get_number_or(t, "shear_modulus_pa", 60e9);
    g.density_mirror = toml::get_number_or(t, "density_mirror_kgm3", 4562.0);
    g.density_cantilever = toml::get_number_or(t, "density_cantilever_kgm3", 5316.0);
    g.validate();
    rc.cantilever = g;
  }
  if (doc.has_table("lock")) {
    const toml::Table& t = doc.table("lock");
    LockConfig lc;
    lc.filter.gain = toml::get_number_or(t, "filter_gain", 1.0);
    if (t.count("filter_zeros_hz")) lc.filter.zeros_hz = toml::get_array(t, "filter_zeros_hz", "lock");
    if (t.count("filter_poles_hz")) lc.filter.poles_hz = toml::get_array(t, "filter_poles_hz", "lock");
    lc.f_min = toml::get_number_or(t, "f_min_hz", lc.f_min);
    lc.f_max = toml::get_number_or(t, "f_max_hz", lc.f_max);
    lc.points = static_cast<std::size_t>(toml::get_number_or(t, "points", 600));
    if (!(lc.f_min > 0.0 && lc.f_max > lc.f_min))
      throw std::invalid_argument("lock: need 0 < f_min_hz < f_max_hz");
    rc.lock = lc;
  }
  return rc;
}

SweepSpec parse_sweep_spec(const std::string& path) {
  const toml::Document doc = toml::parse_file(path);
  RunConfig rc = parse_config(path);
  SweepSpec spec;
  spec.base = rc.cavity;
  spec.oscillator = rc.oscillator;
  spec.noises = rc.noises;
  spec.freqs = rc.freq_grid();
  spec.angles = rc.angle_grid_rad();
  spec.f_cap_divisor = rc.grids.f_cap_divisor;
  if (!doc.has_table("sweep"))
    throw std::invalid_argument("sweep spec needs a [sweep] table with axes");
  const toml::Table& t = doc.table("sweep");
  spec.max_configs =
      static_cast<std::size_t>(toml::get_number_or(t, "max_configs", 1e6));
  const std::pair<const char*, SweepAxis> names[] = {
      {"t1", SweepAxis::kT1},          {"t2", SweepAxis::kT2},
      {"l2", SweepAxis::kL2},          {"detuning", SweepAxis::kDetuning},
      {"mode_matching", SweepAxis::kModeMatching}, {"power", SweepAxis::kPower}};
  for (const auto& [key, axis] : names)
    if (t.count(key)) spec.axes[axis] = toml::get_array(t, key, "sweep");
  spec.validate();
  return spec;
}

}  // namespace ponder
