#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qsynth/matops.hpp"
#include "qsynth/qsde.hpp"

using namespace qsynth;

namespace {

std::mt19937 rng(4242);

Mat random_matrix(int r, int c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Cavity model from the worked example: A = -1.5 I, three coupled channels.
LinearQsde cavity_qsde(double b0_scale = 1.0) {
  LinearQsde sys;
  const Mat I2 = Mat::Identity(2, 2);
  sys.A = -1.5 * I2;
  sys.B.resize(2, 6);
  sys.B << -b0_scale * std::sqrt(2.6) * I2, -std::sqrt(0.2) * I2, -std::sqrt(0.2) * I2;
  sys.C = std::sqrt(0.2) * I2;
  sys.D = Mat::Zero(2, 6);
  sys.D.block<2, 2>(0, 2) = I2;
  sys.theta = CommutationMatrix::canonical(2);
  sys.ito = canonical_ito(6);
  sys.output_channel_offset = 2;
  return sys;
}

// A random commutation-preserving system: A = (1/2) S Theta^{-1} + 2 Theta R
// solves A Theta + Theta A^T = S for the skew S = -B Tim B^T.
LinearQsde random_preserving(int pairs, int noise_pairs) {
  const int n = 2 * pairs;
  LinearQsde sys;
  sys.theta = CommutationMatrix::canonical(n);
  sys.ito = canonical_ito(2 * noise_pairs);
  do {
    sys.B = random_matrix(n, 2 * noise_pairs);
  } while (norm2(Mat(sys.B * sys.ito.Tim * sys.B.transpose())) < 0.1);
  const Mat skew = -sys.B * sys.ito.Tim * sys.B.transpose();
  Mat R = random_matrix(n, n);
  R = (0.5 * (R + R.transpose())).eval();
  sys.A = 0.5 * skew * sys.theta.theta.inverse() + 2.0 * sys.theta.theta * R;
  sys.C = Mat::Zero(2, n);
  sys.D = Mat::Zero(2, 2 * noise_pairs);
  sys.D.leftCols(2) = Mat::Identity(2, 2);
  sys.output_channel_offset = 0;
  return sys;
}

}  // namespace

TEST_CASE("commutation matrix forms") {
  const auto cm = CommutationMatrix::canonical(4);
  CHECK(cm.theta == block_diag_j(2));
  CHECK(cm.canonical_form());

  const auto dm = CommutationMatrix::degenerate(4, 2);
  CHECK(dm.nprime == 2);
  CHECK(dm.theta.topLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

  // a quantum-first ordering diag(J, 0) is recognized as degenerate
  Mat mixed = Mat::Zero(4, 4);
  mixed.topLeftCorner(2, 2) = j2();
  const auto mm = CommutationMatrix::from_matrix(mixed);
  CHECK(mm.kind == CommutationMatrix::Kind::kDegenerate);
  CHECK(mm.nprime == 2);

  CHECK_THROWS_AS(CommutationMatrix::canonical(3), InvalidArgument);
  CHECK_THROWS_AS(CommutationMatrix::from_matrix(random_matrix(3, 3)), InvalidArgument);
}

TEST_CASE("canonical ito matrix") {
  const ItoMatrix f2 = canonical_ito(2);
  Eigen::SelfAdjointEigenSolver<CMat> es(f2.F());
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));

  const ItoMatrix f4 = canonical_ito(4);
  CHECK((f4.S - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f4.Tim - block_diag_j(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f4.is_canonical());

  for (int nw : {2, 4, 6, 8}) {
    Eigen::SelfAdjointEigenSolver<CMat> e(canonical_ito(nw).F(), Eigen::EigenvaluesOnly);
    CHECK(e.eigenvalues().minCoeff() >= -1e-12);
  }
  CHECK_THROWS_AS(canonical_ito(3), InvalidArgument);
}

TEST_CASE("ito decomposition") {
  const Complex i(0, 1);
  const CMat F1 = CMat::Identity(2, 2) + i * j2().cast<Complex>();
  const ItoMatrix d1 = ito_decompose(F1);
  CHECK((d1.S - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((d1.Tim - j2()).cwiseAbs().maxCoeff() < 1e-15);

  // inverted heat bath with N = 0.5: F = 2I + iJ
  const CMat Fh = 2.0 * CMat::Identity(2, 2) + i * j2().cast<Complex>();
  const ItoMatrix dh = ito_decompose(Fh);
  CHECK((dh.S - 2.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((dh.Tim - j2()).cwiseAbs().maxCoeff() < 1e-15);

  Mat sym = random_matrix(3, 3);
  sym = (sym + sym.transpose()).eval();
  CHECK(ito_decompose(sym.cast<Complex>()).Tim.cwiseAbs().maxCoeff() == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 5;
    CMat H = random_matrix(n, n).cast<Complex>() +
             i * random_matrix(n, n).cast<Complex>();
    H = (0.5 * (H + H.adjoint())).eval();
    const ItoMatrix d = ito_decompose(H);
    CHECK((d.F() - H).cwiseAbs().maxCoeff() < 1e-12);
  }

  CMat bad(2, 2);
  bad << 1, 2, 3, 4;
  CHECK_THROWS_AS(ito_decompose(bad), InvalidArgument);
}

TEST_CASE("commutation preservation for the cavity") {
  const auto ok = preserves_commutation(cavity_qsde());
  CHECK(ok.holds);
  CHECK(ok.residual < 1e-12);

  LinearQsde zero;
  zero.A = Mat::Zero(2, 2);
  zero.B = Mat::Zero(2, 2);
  zero.C = Mat::Zero(2, 2);
  zero.D = Mat::Identity(2, 2);
  zero.theta = CommutationMatrix::canonical(2);
  zero.ito = canonical_ito(2);
  CHECK(preserves_commutation(zero).holds);

  // scaling B0 by 1.1 unbalances the J coefficient by 2.6 (1.1^2 - 1) = 0.546
  const auto bad = preserves_commutation(cavity_qsde(1.1));
  CHECK(!bad.holds);
  CHECK(bad.residual == doctest::Approx(2.6 * 0.21).epsilon(1e-10));
}

TEST_CASE("commutation ode oracle") {
  CHECK(commutation_ode_oracle(cavity_qsde(), 10.0) <= 1e-8);
  CHECK(commutation_ode_oracle(cavity_qsde(1.1), 1.0) >= 0.1);

  LinearQsde still;
  still.A = Mat::Zero(2, 2);
  still.B = Mat::Zero(2, 2);
  still.C = Mat::Zero(2, 2);
  still.D = Mat::Identity(2, 2);
  still.theta = CommutationMatrix::canonical(2);
  still.ito = canonical_ito(2);
  CHECK(commutation_ode_oracle(still, 5.0) == 0.0);
}

TEST_CASE("algebraic test agrees with the ode oracle") {
  for (int trial = 0; trial < 50; ++trial) {
    LinearQsde sys = random_preserving(1 + trial % 3, 1 + trial % 2);
    const bool break_it = trial % 2 == 1;
    if (break_it) sys.B *= 1.05;
    const auto chk = preserves_commutation(sys);
    const double dev = commutation_ode_oracle(sys, 2.0);
    if (chk.holds) {
      CHECK(dev <= 1e-7);
    } else {
      CHECK(dev > 1e-7);
    }
    CHECK(chk.holds == !break_it);
  }
}

TEST_CASE("padding to convention") {
  LinearQsde odd;
  odd.A = Mat::Constant(1, 1, -1.0);
  odd.B = Mat::Constant(1, 1, 1.0);
  odd.C = Mat::Constant(1, 1, 1.0);
  odd.D = Mat::Constant(1, 1, 1.0);
  Mat th = Mat::Zero(1, 1);
  odd.theta = CommutationMatrix::from_matrix(th);
  odd.ito = classical_ito(1);
  const LinearQsde padded = pad_to_convention(odd);
  CHECK(padded.n_y() % 2 == 0);
  CHECK(padded.n_w() >= padded.n_y());
  CHECK(padded.B.rightCols(padded.n_w() - 1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(padded.C.row(1).cwiseAbs().maxCoeff() == 0.0);
}
