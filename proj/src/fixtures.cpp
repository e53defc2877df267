#include "qsynth/fixtures.hpp"

#include <cmath>

namespace qsynth::fixtures {

namespace {
const double kKappa1 = 2.6;
const double kKappa2 = 0.2;
const double kKappa3 = 0.2;
const double kGamma = kKappa1 + kKappa2 + kKappa3;
}  // namespace

Plant cavity() {
  const Mat I2 = Mat::Identity(2, 2);
  Plant p;
  p.A = -0.5 * kGamma * I2;
  p.B0 = -std::sqrt(kKappa1) * I2;
  p.B1 = -std::sqrt(kKappa2) * I2;
  p.B2 = -std::sqrt(kKappa3) * I2;
  p.C1 = std::sqrt(kKappa3) * I2;
  p.D12 = I2;
  p.C2 = std::sqrt(kKappa2) * I2;
  p.D20 = Mat::Zero(2, 2);
  p.D21 = I2;
  p.Fv = canonical_ito(2);
  p.Fw = canonical_ito(2);
  p.thetaP = CommutationMatrix::canonical(2);
  p.validate();
  return p;
}

UncertainPlant uncertain_cavity(double g) {
  return overbound_uncertainty(cavity(), 0.1, 1.5 * Mat::Identity(2, 2), g);
}

Plant measured_cavity() {
  Plant p = cavity();
  Mat C2(1, 2), D21(1, 2);
  C2 << std::sqrt(kKappa2), 0.0;
  D21 << 1.0, 0.0;
  p.C2 = C2;
  p.D21 = D21;
  p.D20 = Mat::Zero(1, 2);
  p.validate();
  return p;
}

Plant amplifier_cavity() {
  const double alpha = 1.0;
  const double beta = 0.5;
  const double thermal_n = 0.5;
  const Mat I2 = Mat::Identity(2, 2);
  const Mat Z2 = Mat::Zero(2, 2);

  Plant p;
  p.A.resize(4, 4);
  p.A << -0.5 * kGamma * I2, -std::sqrt(kKappa3 * alpha) * I2, Z2, -0.5 * (alpha - beta) * I2;
  p.B0.resize(4, 4);
  p.B0 << -std::sqrt(kKappa1) * I2, Z2, Z2, std::sqrt(beta) * I2;
  p.B1.resize(4, 2);
  p.B1 << -std::sqrt(kKappa2) * I2, Z2;
  p.B2.resize(4, 2);
  p.B2 << -std::sqrt(kKappa3) * I2, -std::sqrt(alpha) * I2;
  p.C1.resize(2, 4);
  p.C1 << std::sqrt(kKappa3) * I2, Z2;
  p.D12 = I2;
  p.C2.resize(2, 4);
  p.C2 << std::sqrt(kKappa2) * I2, Z2;
  p.D20 = Mat::Zero(2, 4);
  p.D21 = I2;

  // inverted heat bath on the amplifier's auxiliary input
  ItoMatrix heat;
  heat.n_w = 2;
  heat.S = (2.0 * thermal_n + 1.0) * I2;
  heat.Tim = block_diag_j(1);
  p.Fv = ito_concat(canonical_ito(2), heat);
  p.Fw = canonical_ito(2);
  p.thetaP = CommutationMatrix::canonical(4);
  p.validate();
  return p;
}

}  // namespace qsynth::fixtures
