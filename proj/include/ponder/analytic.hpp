#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace ponder {

enum class AnalyticPort { kTrans, kRefl };
enum class ClassicalNoiseKind { kThermal, kCln, kRin, kPn };

/// Squeezing and squeezing quadrature of the ideal single-port cavity:
/// S = delta^2 / (2 + delta^2 + 2 sqrt(1+delta^2)), xi_min = atan(delta)/2.
struct IdealSqueeze {
  double s_ideal = 0.0;
  double xi_min = 0.0;  // rad
};
IdealSqueeze ideal_squeeze(double delta);

/// Quantum-only covariance of a port with escape efficiency e:
/// [[1, -2e/d],[-2e/d, 1+4e/d^2]]; s_q = 1 - e (1 - S_ideal) is its smaller
/// eigenvalue. delta = 0 is rejected.
struct QuantumPort {
  Eigen::Matrix2d sigma;
  double s_q = 0.0;
};
QuantumPort sigma_quantum_port(double e, double delta);

/// First-order classical perturbation matrix for a (port, noise) pairing.
/// cln is valid only in transmission, rin/pn only in reflection; thermal is
/// port-agnostic. `lambda` is the raw dimensionless noise strength.
Eigen::Matrix2d classical_perturbation(AnalyticPort port, ClassicalNoiseKind noise,
                                       double e_meas, double e_refl, double delta,
                                       double lambda);

/// Full covariance sigma_Q + perturbation for a (port, noise) pairing.
Eigen::Matrix2d sigma_with_classical(AnalyticPort port, ClassicalNoiseKind noise,
                                     double e_meas, double e_refl, double delta,
                                     double lambda);

/// First-order squeezed-quadrature PSD in transmission with all three
/// classical noises. Validity requires small lambdas.
double perturbed_trans_squeezing(double e_t, double e_r, double delta, double lambda_th,
                                 double lambda_rin, double lambda_pn);

/// First-order effects of one classical noise on the squeezing ellipse:
/// eigenvalue shifts of the squeezed/anti-squeezed quadratures and the
/// ellipse rotation, evaluated in the basis rotated by xi0 (tan 2 xi0 = delta).
struct PerturbationResult {
  double d_squeeze = 0.0;
  double d_antisqueeze = 0.0;
  double rotation = 0.0;  // rad, positive = counterclockwise
};
PerturbationResult perturbation_effects(AnalyticPort port, ClassicalNoiseKind noise,
                                        double e_meas, double e_refl, double xi0,
                                        double lambda);

/// Determinant of the output state: single port (4e(1-e)+d^2)/d^2, or the
/// joint reflection-transmission state (4eL(1-eL)+d^2)/d^2.
double total_uncertainty(double e, double delta, bool multiport, double e_loss);

/// Back-of-envelope QRPN, thermal displacement, and their ratio for a single
/// structurally damped mode well above its resonance.
struct SingleModeParams {
  double freq = 0.0;         // Hz
  double quality = 0.0;      // Q
  double temperature = 0.0;  // K
};
struct QrpnClosedForms {
  double x_qrpn = 0.0;  // m/sqrt(Hz)
  double x_th = 0.0;    // m/sqrt(Hz)
  double ratio = 0.0;   // x_qrpn / x_th
};
QrpnClosedForms qrpn_closed_forms(double mass, double p_circ, double t_i, double delta,
                                  double wavelength, double f, const SingleModeParams& mode);

/// Projected displacement ASD from a measured amplitude-modulation transfer
/// function and a displacement calibration: P_eff |TF_AM / TF_cal|.
std::vector<double> qrpn_projection(const std::vector<std::complex<double>>& tf_am,
                                    const std::vector<std::complex<double>>& tf_cal,
                                    double p_in, double t_total, double t_i,
                                    double wavelength);

}  // namespace ponder
