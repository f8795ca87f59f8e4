#include "ponder/optomech.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ponder/constants.hpp"

namespace ponder {

namespace {

using cd = std::complex<double>;

struct PoleSet {
  double gamma_rad;  // HWHM in rad/s
  cd gamma_plus, gamma_minus;
  double gamma_0;
};

PoleSet poles(const CavityConfig& config, const DerivedCavity& derived) {
  PoleSet p;
  p.gamma_rad = 2.0 * kPi * derived.gamma_hwhm;
  p.gamma_plus = p.gamma_rad * cd(1.0, config.detuning);
  p.gamma_minus = p.gamma_rad * cd(1.0, -config.detuning);
  p.gamma_0 = p.gamma_rad * (1.0 + config.detuning * config.detuning);
  return p;
}

/// Exact round-trip quantities shared by the full gain expressions.
struct RoundTrip {
  double rho1, rho2, r;   // amplitude reflectivities and their product
  double theta;           // carrier single-trip phase, L Delta / c
  cd phi;                 // sideband single-trip phase, i L s / c
  cd e_iphi, e_2iphi, e_4iphi;
  cd denom_ac;            // 1 + r^2 e^{4i phi} - 2 r e^{2i phi} cos 2 theta
  double denom_dc;        // 1 + r^2 - 2 r cos 2 theta
};

RoundTrip round_trip(const CavityConfig& config, const DerivedCavity& derived, cd s) {
  RoundTrip rt;
  rt.rho1 = std::sqrt(1.0 - config.t1 - config.l1);
  rt.rho2 = std::sqrt(1.0 - config.t2 - config.l2);
  rt.r = rt.rho1 * rt.rho2;
  const double delta_abs = config.detuning * 2.0 * kPi * derived.gamma_hwhm;
  rt.theta = config.length * delta_abs / kSpeedOfLight;
  rt.phi = cd(0.0, 1.0) * config.length * s / kSpeedOfLight;
  rt.e_iphi = std::exp(cd(0.0, 1.0) * rt.phi);
  rt.e_2iphi = rt.e_iphi * rt.e_iphi;
  rt.e_4iphi = rt.e_2iphi * rt.e_2iphi;
  const double c2t = std::cos(2.0 * rt.theta);
  rt.denom_ac = 1.0 + rt.r * rt.r * rt.e_4iphi - 2.0 * rt.r * rt.e_2iphi * c2t;
  rt.denom_dc = 1.0 + rt.r * rt.r - 2.0 * rt.r * c2t;
  return rt;
}

cd k_os_at(const CavityConfig& config, const DerivedCavity& derived, cd s, GainMode mode) {
  const double k = 2.0 * kPi / config.wavelength;
  if (mode == GainMode::kApproximate) {
    const PoleSet p = poles(config, derived);
    const double delta = config.detuning;
    const cd filt = (1.0 + s / p.gamma_plus) * (1.0 + s / p.gamma_minus);
    return 16.0 * k * derived.p_cav / (kSpeedOfLight * derived.total_loss) * delta /
           (1.0 + delta * delta) / filt;
  }
  const RoundTrip rt = round_trip(config, derived, s);
  const double front = 1.0 + rt.rho2 * rt.rho2 - config.t2;
  return 4.0 * k * front * derived.p_cav * rt.r * rt.e_2iphi * std::sin(2.0 * rt.theta) /
         (kSpeedOfLight * rt.denom_ac);
}

}  // namespace

SpringResponse optical_spring(const CavityConfig& config, const DerivedCavity& derived,
                              double mass, double f, GainMode mode) {
  if (!(mass > 0.0)) throw std::invalid_argument("optical_spring: mass must be > 0");
  SpringResponse r;
  const PoleSet p = poles(config, derived);
  r.gamma_plus = p.gamma_plus;
  r.gamma_minus = p.gamma_minus;
  r.gamma_0 = p.gamma_0;
  r.k_os = k_os_at(config, derived, cd(0.0, 2.0 * kPi * f), mode);
  const double k_dc = std::real(k_os_at(config, derived, cd(0.0, 0.0), mode));
  r.omega_os_sq = k_dc / mass;
  r.omega_os = std::sqrt(std::abs(r.omega_os_sq));
  r.gamma_os = 2.0 * r.omega_os_sq / p.gamma_0;
  return r;
}

ModulationGains modulation_gains(const CavityConfig& config, const DerivedCavity& derived,
                                 double f, GainMode mode) {
  const cd s(0.0, 2.0 * kPi * f);
  ModulationGains g;
  if (mode == GainMode::kApproximate) {
    const PoleSet p = poles(config, derived);
    const double delta = config.detuning;
    const double t1sq = config.t1;
    const double tt = derived.total_loss;
    const cd filt = (1.0 + s / p.gamma_plus) * (1.0 + s / p.gamma_minus);
    g.g_in_am = 4.0 * t1sq / (tt * tt) / (1.0 + delta * delta) * (1.0 + s / p.gamma_0) / filt;
    g.g_in_pm = -4.0 * t1sq / (tt * tt) * delta / (1.0 + delta * delta) * (s / p.gamma_0) / filt;
    return g;
  }
  const RoundTrip rt = round_trip(config, derived, s);
  const double t1sq = config.t1;
  const cd denom = rt.denom_dc * rt.denom_ac;
  g.g_in_am = t1sq *
              ((1.0 + rt.r * rt.r * rt.e_2iphi) * rt.e_iphi -
               2.0 * rt.r * rt.e_2iphi * std::cos(2.0 * rt.theta) * std::cos(rt.phi)) /
              denom;
  g.g_in_pm = t1sq * cd(0.0, 2.0) * rt.e_2iphi * rt.r * std::sin(2.0 * rt.theta) *
              std::sin(rt.phi) / denom;
  return g;
}

EffectiveOscillator effective_oscillator(double omega_m, double gamma_m,
                                         const SpringResponse& spring) {
  EffectiveOscillator e;
  e.omega_om_sq = omega_m * omega_m + spring.omega_os_sq;
  e.omega_om = std::sqrt(std::abs(e.omega_om_sq));
  e.gamma_om = gamma_m - spring.gamma_os;
  e.stable = e.gamma_om > 0.0 && e.omega_om_sq > 0.0;
  return e;
}

double suppression_factor(double omega_os, double omega_m, double gamma_m, double f) {
  if (!(f >= 0.0)) throw std::invalid_argument("suppression_factor: f must be >= 0");
  const double w = 2.0 * kPi * f;
  const cd denom(omega_m * omega_m - w * w, w * gamma_m);
  return omega_os * omega_os / std::abs(denom);
}

// ---------------------------------------------------------------------------
// Loop margins
// ---------------------------------------------------------------------------

std::complex<double> RationalFilter::eval(double f) const {
  cd v(gain, 0.0);
  for (double z : zeros_hz) {
    if (!std::isfinite(z) || z == 0.0)
      throw std::invalid_argument("filter zero must be finite and nonzero");
    v *= cd(1.0, f / z);
  }
  for (double p : poles_hz) {
    if (!std::isfinite(p) || p == 0.0)
      throw std::invalid_argument("filter pole must be finite and nonzero");
    v /= cd(1.0, f / p);
  }
  return v;
}

std::complex<double> TabulatedResponse::eval(double f) const {
  if (freqs_hz.size() != values.size() || freqs_hz.size() < 2)
    throw std::invalid_argument("tabulated response needs >= 2 samples");
  if (f <= freqs_hz.front()) return values.front();
  if (f >= freqs_hz.back()) return values.back();
  const auto it = std::upper_bound(freqs_hz.begin(), freqs_hz.end(), f);
  const size_t i = static_cast<size_t>(it - freqs_hz.begin()) - 1;
  const double t = (std::log(f) - std::log(freqs_hz[i])) /
                   (std::log(freqs_hz[i + 1]) - std::log(freqs_hz[i]));
  return values[i] + t * (values[i + 1] - values[i]);
}

std::complex<double> LoopModel::plant_at(double f) const {
  if (std::holds_alternative<TabulatedResponse>(plant))
    return std::get<TabulatedResponse>(plant).eval(f);
  return std::get<std::function<cd(double)>>(plant)(f);
}

MarginReport loop_margins(const LoopModel& loop, const std::vector<double>& f_grid) {
  if (f_grid.size() < 2) throw std::invalid_argument("loop_margins: grid too small");
  const double max_ratio = std::pow(10.0, 1.0 / 50.0);
  for (size_t i = 1; i < f_grid.size(); ++i) {
    if (!(f_grid[i] > f_grid[i - 1]))
      throw std::invalid_argument("loop_margins: grid must be strictly ascending");
    if (f_grid[i] / f_grid[i - 1] > max_ratio * (1.0 + 1e-12))
      throw std::invalid_argument("loop_margins: grid sparser than 50 points/decade");
  }

  const size_t n = f_grid.size();
  std::vector<cd> g(n);
  std::vector<double> logmag(n), logf(n);
  for (size_t i = 0; i < n; ++i) {
    g[i] = loop.open_loop_at(f_grid[i]);
    logmag[i] = std::log10(std::abs(g[i]));
    logf[i] = std::log10(f_grid[i]);
  }

  MarginReport rep;
  auto wrapped_phase_deg = [](cd v) { return std::arg(v) * 180.0 / kPi; };

  for (size_t i = 0; i + 1 < n; ++i) {
    const double a = logmag[i], b = logmag[i + 1];
    if (a == 0.0 || (a > 0.0) != (b > 0.0)) {
      const double t = (a == b) ? 0.0 : (0.0 - a) / (b - a);
      const double fc = std::pow(10.0, logf[i] + t * (logf[i + 1] - logf[i]));
      // interpolate the loop response itself for the phase
      const cd gc = g[i] + t * (g[i + 1] - g[i]);
      if (!rep.unity_gain_crossings.empty() &&
          std::abs(fc - rep.unity_gain_crossings.back()) < 1e-12 * fc)
        continue;
      rep.unity_gain_crossings.push_back(fc);
      rep.phase_margins_deg.push_back(180.0 - std::abs(wrapped_phase_deg(gc)));
    }
  }

  // Gain margin at the first crossing of the negative real axis.
  for (size_t i = 0; i < n && !rep.has_gain_margin; ++i) {
    const bool on_axis = std::imag(g[i]) == 0.0 && std::real(g[i]) < 0.0;
    if (on_axis) {
      rep.has_gain_margin = true;
      rep.gain_margin_db = -20.0 * std::log10(std::abs(g[i]));
      break;
    }
    if (i + 1 < n && std::real(g[i]) < 0.0 && std::real(g[i + 1]) < 0.0 &&
        std::imag(g[i]) * std::imag(g[i + 1]) < 0.0) {
      const double t = -std::imag(g[i]) / (std::imag(g[i + 1]) - std::imag(g[i]));
      const double lm = logmag[i] + t * (logmag[i + 1] - logmag[i]);
      rep.has_gain_margin = true;
      rep.gain_margin_db = -20.0 * lm;
    }
  }

  rep.stable = true;
  for (double pm : rep.phase_margins_deg)
    if (!(pm > 0.0)) rep.stable = false;
  if (rep.has_gain_margin && !(rep.gain_margin_db > 0.0)) rep.stable = false;
  return rep;
}

}  // namespace ponder
