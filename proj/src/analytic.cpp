#include "ponder/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "ponder/constants.hpp"

namespace ponder {

namespace {

Eigen::Matrix2d rotation(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

}  // namespace

IdealSqueeze ideal_squeeze(double delta) {
  if (!std::isfinite(delta)) throw std::invalid_argument("ideal_squeeze: delta must be finite");
  IdealSqueeze out;
  const double d2 = delta * delta;
  out.s_ideal = d2 / (2.0 + d2 + 2.0 * std::sqrt(1.0 + d2));
  out.xi_min = 0.5 * std::atan(delta);
  return out;
}

QuantumPort sigma_quantum_port(double e, double delta) {
  if (!(e >= 0.0 && e <= 1.0))
    throw std::invalid_argument("sigma_quantum_port: e must be in [0,1]");
  if (delta == 0.0)
    throw std::invalid_argument("sigma_quantum_port: delta = 0 has no squeezing");
  QuantumPort out;
  out.sigma << 1.0, -2.0 * e / delta, -2.0 * e / delta, 1.0 + 4.0 * e / (delta * delta);
  out.s_q = 1.0 - e * (1.0 - ideal_squeeze(delta).s_ideal);
  return out;
}

Eigen::Matrix2d classical_perturbation(AnalyticPort port, ClassicalNoiseKind noise,
                                       double e_meas, double e_refl, double delta,
                                       double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("classical_perturbation: lambda >= 0");
  if (delta == 0.0) throw std::invalid_argument("classical_perturbation: delta = 0");
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  switch (noise) {
    case ClassicalNoiseKind::kThermal: {
      m << 1.0, -1.0 / delta, -1.0 / delta, 1.0 / (delta * delta);
      return (e_meas * lambda * m).eval();
    }
    case ClassicalNoiseKind::kCln: {
      if (port != AnalyticPort::kTrans)
        throw std::invalid_argument("classical_perturbation: cln applies to transmission only");
      m(1, 1) = 4.0 * e_meas * e_refl * lambda / (delta * delta);
      return m;
    }
    case ClassicalNoiseKind::kRin: {
      if (port != AnalyticPort::kRefl)
        throw std::invalid_argument("classical_perturbation: rin applies to reflection only");
      const double q = (2.0 * e_refl + delta * delta) / delta;
      m << 1.0, -q, -q, q * q;
      return (lambda * m).eval();
    }
    case ClassicalNoiseKind::kPn: {
      if (port != AnalyticPort::kRefl)
        throw std::invalid_argument("classical_perturbation: pn applies to reflection only");
      const double q = (1.0 - 2.0 * e_refl) / delta;
      m << 1.0, q, q, q * q;
      return (lambda * m).eval();
    }
  }
  return m;
}

Eigen::Matrix2d sigma_with_classical(AnalyticPort port, ClassicalNoiseKind noise,
                                     double e_meas, double e_refl, double delta,
                                     double lambda) {
  return sigma_quantum_port(e_meas, delta).sigma +
         classical_perturbation(port, noise, e_meas, e_refl, delta, lambda);
}

double perturbed_trans_squeezing(double e_t, double e_r, double delta, double lambda_th,
                                 double lambda_rin, double lambda_pn) {
  const double d2 = delta * delta;
  const double root = std::sqrt(1.0 + d2);
  const double denom = 2.0 * (1.0 + d2 + root);
  const double s_q = 1.0 - e_t * (1.0 - ideal_squeeze(delta).s_ideal);
  const double ds_th = e_t * lambda_th * (1.0 + d2) / denom;
  const double ds_rin = 4.0 * e_t * e_r * lambda_rin / denom;
  const double ds_pn = 4.0 * e_t * e_r * lambda_pn / denom;
  return s_q + ds_th + ds_rin + ds_pn;
}

PerturbationResult perturbation_effects(AnalyticPort port, ClassicalNoiseKind noise,
                                        double e_meas, double e_refl, double xi0,
                                        double lambda) {
  if (!(std::abs(xi0) < kPi / 4.0) || xi0 == 0.0)
    throw std::invalid_argument("perturbation_effects: need 0 < |xi0| < pi/4");
  const double delta = std::tan(2.0 * xi0);
  const Eigen::Matrix2d dsig =
      classical_perturbation(port, noise, e_meas, e_refl, delta, lambda);
  const Eigen::Matrix2d r = rotation(xi0);
  const Eigen::Matrix2d prime = r.transpose() * dsig * r;
  const double tan_xi = std::tan(xi0);
  const double s_min = 1.0 - e_meas + e_meas * tan_xi * tan_xi;
  const double s_max = 1.0 - e_meas + e_meas / (tan_xi * tan_xi);
  PerturbationResult out;
  out.d_squeeze = prime(0, 0);
  out.d_antisqueeze = prime(1, 1);
  out.rotation = prime(1, 0) / (s_min - s_max);
  return out;
}

double total_uncertainty(double e, double delta, bool multiport, double e_loss) {
  if (delta == 0.0) throw std::invalid_argument("total_uncertainty: delta = 0");
  const double frac = multiport ? e_loss : e;
  if (!(frac >= 0.0 && frac <= 1.0))
    throw std::invalid_argument("total_uncertainty: efficiency must be in [0,1]");
  return (4.0 * frac * (1.0 - frac) + delta * delta) / (delta * delta);
}

QrpnClosedForms qrpn_closed_forms(double mass, double p_circ, double t_i, double delta,
                                  double wavelength, double f, const SingleModeParams& mode) {
  QrpnClosedForms out;
  const double w = 2.0 * kPi * f;
  const double w0 = 2.0 * kPi * kSpeedOfLight / wavelength;
  out.x_qrpn = 1.0 / (mass * kSpeedOfLight * w * w) *
               std::sqrt(32.0 * kHbar * w0 * p_circ / (t_i * (1.0 + delta * delta)));
  const double wm = 2.0 * kPi * mode.freq;
  out.x_th = std::sqrt(4.0 * kBoltzmann * mode.temperature * wm * wm /
                       (std::pow(w, 5) * mass * mode.quality));
  out.ratio = out.x_qrpn / out.x_th;
  return out;
}

std::vector<double> qrpn_projection(const std::vector<std::complex<double>>& tf_am,
                                    const std::vector<std::complex<double>>& tf_cal,
                                    double p_in, double t_total, double t_i,
                                    double wavelength) {
  if (tf_am.size() != tf_cal.size())
    throw std::invalid_argument("qrpn_projection: transfer functions differ in length");
  const double w0 = 2.0 * kPi * kSpeedOfLight / wavelength;
  const double p_eff = std::sqrt(t_total / t_i * 2.0 * kHbar * w0 * p_in);
  std::vector<double> out(tf_am.size());
  for (size_t i = 0; i < tf_am.size(); ++i) {
    if (tf_cal[i] == std::complex<double>(0.0, 0.0))
      throw std::invalid_argument("qrpn_projection: tf_cal vanishes at grid point " +
                                  std::to_string(i));
    out[i] = p_eff * std::abs(tf_am[i] / tf_cal[i]);
  }
  return out;
}

}  // namespace ponder
