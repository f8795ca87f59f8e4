#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>

#include "ponder/cavity.hpp"
#include "ponder/mechanics.hpp"

namespace ponder {

/// Field-variable ordering of the frequency-domain linear system. Fixed; the
/// daggered partner of each field sits at index + 1.
enum FieldIndex : int {
  kA = 0, kAd,
  kAin3, kAin3d,
  kAin2, kAin2d,
  kAout2, kAout2d,
  kAin1, kAin1d,
  kAout1, kAout1d,
  kX, kP,
  kFrad, kFth,
  kFieldCount  // 16
};

enum class InputPort { kLaser, kTransVacuum, kLossVacuum, kThermalForce };
enum class OutputPort { kReflection, kTransmission };

/// Cavity decay rates per port and the optomechanical coupling, all in
/// angular units. gamma_i = c T_i / 4L; g^2 = 4 pi P_cav / (hbar L lambda).
struct PortRates {
  double gamma1 = 0.0;     // laser/reflection port, rad/s
  double gamma2 = 0.0;     // transmission port, rad/s
  double gamma3 = 0.0;     // loss port, rad/s
  double gamma = 0.0;      // sum, rad/s
  double delta_abs = 0.0;  // detuning delta * gamma, rad/s
  double g = 0.0;          // coupling, 1/(m s)
};

PortRates make_port_rates(const CavityConfig& config, const DerivedCavity& derived);

using Matrix16 = Eigen::Matrix<std::complex<double>, 16, 16>;
using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

/// Dynamical matrix of the linearized field equations at sideband frequency f.
/// The force-to-displacement entries carry the full multi-mode susceptibility.
/// f = 0 is singular and rejected.
Matrix16 build_dynamical_matrix(const PortRates& rates, const Oscillator& osc, double f);

/// 2x2 quadrature-basis transfer matrices from every input port to both
/// output ports, plus the 2x1 thermal-force responses, at one frequency.
struct PortTransfer {
  double freq = 0.0;
  // [output][input]: output 0 = reflection, 1 = transmission;
  // input 0 = laser, 1 = trans vacuum, 2 = loss vacuum.
  Matrix2c field_tf[2][3];
  Vector2c force_tf[2];
};

/// Solve (I - DM) X = S at frequency f. Returns nullopt if the system is
/// singular at this frequency (the caller flags and skips it).
std::optional<PortTransfer> port_transfer_matrices(const PortRates& rates,
                                                   const Oscillator& osc, double f);

/// Laser input covariance in the cavity quadrature basis:
/// R(theta_d) diag(1 + S_RIN, 1 + S_PN) R(theta_d)^T with tan theta_d = -delta.
Eigen::Matrix2d input_laser_covariance(double s_rin, double s_pn, double delta);

/// Frequency-resolved quadrature covariance of one output port.
struct PortCovariance {
  OutputPort port = OutputPort::kTransmission;
  double freq = 0.0;
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Identity();
};

/// Which noise inputs feed the covariance assembly.
struct NoiseSelection {
  bool vacuum = true;    // all vacuum inputs incl. the laser's quantum part
  double s_rin = 0.0;    // laser RIN PSD rel. shot at the input
  double s_pn = 0.0;     // laser phase-noise PSD rel. shot at the input
  double s_f_th = 0.0;   // thermal force PSD, N^2/Hz
};

/// Assemble one port's covariance from the solved transfer matrices.
/// `delta` fixes the laser-basis rotation; `mode_matching` (reflection only)
/// mixes the output with vacuum at the stated power ratio.
PortCovariance port_covariance(const PortTransfer& tfs, const NoiseSelection& sel,
                               double delta, double mode_matching, OutputPort port);

/// Noise in the generalized quadrature xi: u^T sigma u, u = (cos xi, sin xi).
double quadrature_noise(const PortCovariance& cov, double xi);
double quadrature_noise(const Eigen::Matrix2d& sigma, double xi);

/// Joint reflection (+) transmission covariance with cross blocks, and its
/// determinant.
struct MultiportUncertainty {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Identity();
  double det = 1.0;
};
MultiportUncertainty multiport_uncertainty(const PortTransfer& tfs,
                                           const NoiseSelection& sel, double delta,
                                           double mode_matching);

}  // namespace ponder
