#include "ponder/quantum.hpp"

#include <cmath>
#include <stdexcept>

#include "ponder/constants.hpp"

namespace ponder {

namespace {

using cd = std::complex<double>;

const Matrix2c kSidebandToQuad = [] {
  Matrix2c m;
  m << cd(1, 0), cd(1, 0), cd(0, -1), cd(0, 1);
  return Matrix2c(m / std::sqrt(2.0));
}();
const Matrix2c kQuadToSideband = kSidebandToQuad.inverse();

Matrix2c quad_tf(const Matrix16& tfm, int out, int in) {
  Matrix2c ts;
  ts << tfm(out, in), tfm(out, in + 1), tfm(out + 1, in), tfm(out + 1, in + 1);
  return kSidebandToQuad * ts * kQuadToSideband;
}

Vector2c quad_force_tf(const Matrix16& tfm, int out, int in) {
  Vector2c ts;
  ts << tfm(out, in), tfm(out + 1, in);
  return kSidebandToQuad * ts;
}

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

/// Accumulate sum_i T_i sigma_i T_i^dagger for the selected noises into an
/// N x N Hermitian matrix, given the stacked transfer blocks.
template <int N>
Eigen::Matrix<cd, N, N> accumulate_covariance(
    const Eigen::Matrix<cd, N, 2>& t_laser, const Eigen::Matrix<cd, N, 2>& t_trans,
    const Eigen::Matrix<cd, N, 2>& t_loss, const Eigen::Matrix<cd, N, 1>& t_force,
    const NoiseSelection& sel, double delta) {
  Eigen::Matrix<cd, N, N> m = Eigen::Matrix<cd, N, N>::Zero();
  if (sel.vacuum) {
    m += t_laser * t_laser.adjoint();
    m += t_trans * t_trans.adjoint();
    m += t_loss * t_loss.adjoint();
  }
  if (sel.s_rin > 0.0 || sel.s_pn > 0.0) {
    const Eigen::Matrix2d classical =
        input_laser_covariance(sel.s_rin, sel.s_pn, delta) - Eigen::Matrix2d::Identity();
    m += t_laser * classical.cast<cd>() * t_laser.adjoint();
  }
  if (sel.s_f_th > 0.0) m += t_force * t_force.adjoint() * sel.s_f_th;
  return m;
}

template <int N>
Eigen::Matrix<double, N, N> to_real_symmetric(const Eigen::Matrix<cd, N, N>& m,
                                              const char* what) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && herm_err > 1e-9 * scale)
    throw std::runtime_error(std::string(what) + ": covariance asymmetry beyond 1e-9");
  // The imaginary part of a Hermitian accumulation is antisymmetric and drops
  // out of every homodyne quadratic form; the measured covariance is Re(m).
  Eigen::Matrix<double, N, N> r = m.real();
  return ((r + r.transpose()) / 2.0).eval();
}

}  // namespace

PortRates make_port_rates(const CavityConfig& config, const DerivedCavity& derived) {
  PortRates r;
  const double scale = kSpeedOfLight / (4.0 * config.length);
  r.gamma1 = scale * config.t1;
  r.gamma2 = scale * config.t2;
  r.gamma3 = scale * config.l2;
  r.gamma = r.gamma1 + r.gamma2 + r.gamma3;
  r.delta_abs = config.detuning * r.gamma;
  r.g = std::sqrt(4.0 * kPi * derived.p_cav / (kHbar * config.length * config.wavelength));
  return r;
}

Matrix16 build_dynamical_matrix(const PortRates& rates, const Oscillator& osc, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("build_dynamical_matrix: f must be > 0");
  const double omega = 2.0 * kPi * f;
  const cd inv_miw = 1.0 / cd(0.0, -omega);
  const cd gp(rates.gamma, -rates.delta_abs);   // gamma - i Delta
  const cd gm(rates.gamma, rates.delta_abs);    // gamma + i Delta

  Matrix16 dm = Matrix16::Zero();
  dm(kA, kA) = -gp * inv_miw;
  dm(kAd, kAd) = -gm * inv_miw;
  dm(kA, kX) = cd(0.0, rates.g) * inv_miw;
  dm(kAd, kX) = cd(0.0, -rates.g) * inv_miw;
  dm(kA, kAin3) = std::sqrt(2.0 * rates.gamma3) * inv_miw;
  dm(kAd, kAin3d) = std::sqrt(2.0 * rates.gamma3) * inv_miw;
  dm(kA, kAin2) = std::sqrt(2.0 * rates.gamma2) * inv_miw;
  dm(kAd, kAin2d) = std::sqrt(2.0 * rates.gamma2) * inv_miw;
  dm(kA, kAin1) = std::sqrt(2.0 * rates.gamma1) * inv_miw;
  dm(kAd, kAin1d) = std::sqrt(2.0 * rates.gamma1) * inv_miw;
  dm(kAout2, kAin2) = -1.0;
  dm(kAout2d, kAin2d) = -1.0;
  dm(kAout2, kA) = std::sqrt(2.0 * rates.gamma2);
  dm(kAout2d, kAd) = std::sqrt(2.0 * rates.gamma2);
  dm(kAout1, kAin1) = -1.0;
  dm(kAout1d, kAin1d) = -1.0;
  dm(kAout1, kA) = std::sqrt(2.0 * rates.gamma1);
  dm(kAout1d, kAd) = std::sqrt(2.0 * rates.gamma1);
  // Full multi-mode susceptibility in place of the free-mass 1/(M(-W^2)).
  // susceptibility() uses the e^{+iwt} sign convention (Im chi < 0); this
  // system is written for e^{-iwt}, so take the conjugate.
  const cd chi = std::conj(susceptibility(osc, f));
  dm(kX, kFrad) = chi;
  dm(kX, kFth) = chi;
  dm(kFrad, kA) = -kHbar * rates.g;
  dm(kFrad, kAd) = -kHbar * rates.g;
  return dm;
}

std::optional<PortTransfer> port_transfer_matrices(const PortRates& rates,
                                                   const Oscillator& osc, double f) {
  const Matrix16 system = Matrix16::Identity() - build_dynamical_matrix(rates, osc, f);
  // Row scales span many orders of magnitude (field rates vs hbar-scale
  // forces), so rank-revealing thresholds misfire; detect singularity from
  // exact zero pivots and non-finite entries instead.
  Eigen::PartialPivLU<Matrix16> lu(system);
  for (int i = 0; i < 16; ++i)
    if (lu.matrixLU()(i, i) == cd(0.0, 0.0)) return std::nullopt;
  const Matrix16 tfm = lu.inverse();
  if (!tfm.allFinite()) return std::nullopt;

  PortTransfer pt;
  pt.freq = f;
  const int outs[2] = {kAout1, kAout2};
  const int ins[3] = {kAin1, kAin2, kAin3};
  for (int o = 0; o < 2; ++o) {
    for (int i = 0; i < 3; ++i) pt.field_tf[o][i] = quad_tf(tfm, outs[o], ins[i]);
    pt.force_tf[o] = quad_force_tf(tfm, outs[o], kFth);
  }
  return pt;
}

Eigen::Matrix2d input_laser_covariance(double s_rin, double s_pn, double delta) {
  if (!(s_rin >= 0.0 && s_pn >= 0.0))
    throw std::invalid_argument("input_laser_covariance: PSDs must be >= 0");
  Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
  diag(0, 0) = 1.0 + s_rin;
  diag(1, 1) = 1.0 + s_pn;
  const Eigen::Matrix2d r = rotation(std::atan(-delta));
  return r * diag * r.transpose();
}

PortCovariance port_covariance(const PortTransfer& tfs, const NoiseSelection& sel,
                               double delta, double mode_matching, OutputPort port) {
  const int o = (port == OutputPort::kReflection) ? 0 : 1;
  using M2 = Eigen::Matrix<cd, 2, 2>;
  const M2 accum = accumulate_covariance<2>(tfs.field_tf[o][0], tfs.field_tf[o][1],
                                            tfs.field_tf[o][2], tfs.force_tf[o], sel, delta);
  PortCovariance cov;
  cov.port = port;
  cov.freq = tfs.freq;
  cov.matrix = to_real_symmetric<2>(accum, "port_covariance");
  if (port == OutputPort::kReflection && mode_matching < 1.0) {
    cov.matrix = mode_matching * cov.matrix;
    if (sel.vacuum)
      cov.matrix += (1.0 - mode_matching) * Eigen::Matrix2d::Identity();
  }
  return cov;
}

double quadrature_noise(const Eigen::Matrix2d& sigma, double xi) {
  Eigen::Vector2d u(std::cos(xi), std::sin(xi));
  return u.dot(sigma * u);
}

double quadrature_noise(const PortCovariance& cov, double xi) {
  return quadrature_noise(cov.matrix, xi);
}

MultiportUncertainty multiport_uncertainty(const PortTransfer& tfs,
                                           const NoiseSelection& sel, double delta,
                                           double mode_matching) {
  using M42 = Eigen::Matrix<cd, 4, 2>;
  using V4 = Eigen::Matrix<cd, 4, 1>;
  M42 t_in[3];
  for (int i = 0; i < 3; ++i) {
    t_in[i].topRows(2) = tfs.field_tf[0][i];
    t_in[i].bottomRows(2) = tfs.field_tf[1][i];
  }
  V4 t_force;
  t_force.head(2) = tfs.force_tf[0];
  t_force.tail(2) = tfs.force_tf[1];

  const Eigen::Matrix<cd, 4, 4> accum =
      accumulate_covariance<4>(t_in[0], t_in[1], t_in[2], t_force, sel, delta);
  MultiportUncertainty out;
  out.matrix = to_real_symmetric<4>(accum, "multiport_uncertainty");
  if (mode_matching < 1.0) {
    // Beam splitter on the reflection half: R -> sqrt(mm) R + sqrt(1-mm) vac.
    Eigen::Matrix4d mix = Eigen::Matrix4d::Identity();
    mix(0, 0) = mix(1, 1) = std::sqrt(mode_matching);
    out.matrix = mix * out.matrix * mix.transpose();
    if (sel.vacuum) {
      out.matrix(0, 0) += 1.0 - mode_matching;
      out.matrix(1, 1) += 1.0 - mode_matching;
    }
  }
  out.det = out.matrix.determinant();
  return out;
}

}  // namespace ponder
