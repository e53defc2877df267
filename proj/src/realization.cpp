#include "qsynth/realization.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace qsynth {

namespace {

void require_even(int value, const char* what) {
  if (value <= 0 || value % 2 != 0) {
    throw InvalidArgument(std::string("realization: ") + what + " must be positive even");
  }
}

Mat permutation_from_order(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  Mat S = Mat::Zero(n, n);
  for (int r = 0; r < n; ++r) S(r, order[r]) = 1.0;
  return S;
}

CMat diag_m(int count) {
  const Complex i(0.0, 1.0);
  CMat M(2, 2);
  M << 0.5, 0.5 * i, 0.5, -0.5 * i;
  CMat out = CMat::Zero(2 * count, 2 * count);
  for (int k = 0; k < count; ++k) out.block<2, 2>(2 * k, 2 * k) = M;
  return out;
}

}  // namespace

FullController realize_quantum_controller(const ControllerTriple& triple,
                                          const RealizationChoice& choice) {
  const int nk = static_cast<int>(triple.A_K.rows());
  const int ny = static_cast<int>(triple.B_K.cols());
  const int nu = static_cast<int>(triple.C_K.rows());
  require_even(nk, "n_K");
  require_even(ny, "n_y");
  require_even(nu, "n_u");
  const int Nu = nu / 2;
  const int Ny = ny / 2;
  const Complex im(0.0, 1.0);

  const Mat theta = block_diag_j(nk / 2);
  const Mat Z = -0.5 * theta * triple.A_K;
  const Mat R = 0.5 * (Z + Z.transpose());

  // Coupling block carrying the measured signal y.
  CMat sel_top(Ny, ny);
  sel_top << CMat::Identity(Ny, Ny), CMat::Zero(Ny, Ny);
  const CMat Lb2 = -im * sel_top * permutation_matrix(Ny).cast<Complex>() * diag_m(Ny) *
                   triple.B_K.transpose().cast<Complex>() * theta.cast<Complex>();

  // Skew budget that the free coupling block must absorb.
  const Mat skew = 0.5 * (Z - Z.transpose()) -
                   0.25 * triple.C_K.transpose() * block_diag_j(Nu) * triple.C_K -
                   (Lb2.adjoint() * Lb2).imag();
  const CMat candidate = im * skew.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMat> es(candidate, Eigen::EigenvaluesOnly);
  const double alpha = std::max(0.0, -es.eigenvalues().minCoeff()) + choice.xi_shift_margin;
  const CMat xi2 = alpha * CMat::Identity(nk, nk) + candidate;

  CMat Lb1 = psd_factor(xi2);
  if (choice.min_n_vK > Nu + Lb1.rows()) {
    const int extra = choice.min_n_vK - Nu - static_cast<int>(Lb1.rows());
    CMat padded = CMat::Zero(Lb1.rows() + extra, nk);
    padded.topRows(Lb1.rows()) = Lb1;
    Lb1 = padded;
  }
  const int r = static_cast<int>(Lb1.rows());
  const int Nvk = Nu + r;

  const Mat BK11 = theta * triple.C_K.transpose() * block_diag_j(Nu);
  CMat side(nk, 2 * r);
  side.leftCols(r) = -Lb1.adjoint();
  side.rightCols(r) = Lb1.transpose();
  const CMat BK12c = Complex(0, 2) * theta.cast<Complex>() * side *
                     permutation_matrix(r).cast<Complex>() * diag_m(r);
  if (BK12c.imag().cwiseAbs().maxCoeff() > 1e-10 * (1.0 + BK12c.real().cwiseAbs().maxCoeff())) {
    throw NumericalError("realize_quantum_controller: noise block has a nonreal residue");
  }

  FullController out;
  out.A_K = triple.A_K;
  out.B_K = triple.B_K;
  out.C_K = triple.C_K;
  out.B_K1.resize(nk, nu + 2 * r);
  out.B_K1 << BK11, BK12c.real();
  out.B_K0 = Mat::Zero(nu, 2 * Nvk);
  out.B_K0.leftCols(nu) = Mat::Identity(nu, nu);
  out.theta_K = CommutationMatrix::canonical(nk);
  out.F_vK = canonical_ito(2 * Nvk);

  OscillatorParams osc;
  osc.R = R;
  osc.Lambda.resize(Nu + r + Ny, nk);
  CMat row_sel(Nu, nu);
  row_sel << CMat::Identity(Nu, Nu), im * CMat::Identity(Nu, Nu);
  osc.Lambda.topRows(Nu) =
      0.5 * row_sel * permutation_matrix(Nu).cast<Complex>() * triple.C_K.cast<Complex>();
  osc.Lambda.middleRows(Nu, r) = Lb1;
  osc.Lambda.bottomRows(Ny) = Lb2;
  out.oscillator = osc;
  return out;
}

FullController realize_classical_controller(const ControllerTriple& triple, const ItoMatrix& F_y) {
  const int nk = static_cast<int>(triple.A_K.rows());
  const int ny = static_cast<int>(triple.B_K.cols());
  const int nu = static_cast<int>(triple.C_K.rows());
  require_even(ny, "n_y");
  require_even(nu, "n_u");
  if (F_y.n_w != ny) throw InvalidArgument("realize_classical_controller: F_y dimension mismatch");

  // Column map K with K diag(J) K^T = -Tim_y, one 2x2 block per y pair.
  Mat K = Mat::Zero(ny, ny);
  for (int p = 0; p < ny / 2; ++p) {
    const Mat blk = F_y.Tim.block<2, 2>(2 * p, 2 * p);
    Mat off = F_y.Tim.middleRows(2 * p, 2);
    off.middleCols(2 * p, 2).setZero();
    if (off.cwiseAbs().maxCoeff() > kStructuralTol) {
      throw InvalidArgument("realize_classical_controller: y Ito matrix couples across pairs");
    }
    if ((blk - j2()).cwiseAbs().maxCoeff() <= kStructuralTol) {
      K.block<2, 2>(2 * p, 2 * p) << 0, 1, 1, 0;  // swapped pair flips the sign of J
    } else if (blk.cwiseAbs().maxCoeff() <= kStructuralTol) {
      // commutative pair, nothing to cancel
    } else {
      throw InvalidArgument("realize_classical_controller: unsupported y Ito block");
    }
  }

  FullController out;
  out.A_K = triple.A_K;
  out.B_K = triple.B_K;
  out.C_K = triple.C_K;
  out.B_K1 = Mat::Zero(nk, nu + ny);
  out.B_K1.rightCols(ny) = triple.B_K * K;
  out.B_K0 = Mat::Zero(nu, nu + ny);
  out.B_K0.leftCols(nu) = Mat::Identity(nu, nu);
  out.theta_K = CommutationMatrix::degenerate(nk, nk);
  out.F_vK = canonical_ito(nu + ny);
  return out;
}

FullController realize_classical_controller(const ControllerTriple& triple) {
  return realize_classical_controller(triple, canonical_ito(static_cast<int>(triple.B_K.cols())));
}

FullController realize_mixed_controller(const ControllerTriple& triple,
                                        const CommutationMatrix& theta_K,
                                        const RealizationChoice& choice) {
  const int nk = static_cast<int>(triple.A_K.rows());
  const int ny = static_cast<int>(triple.B_K.cols());
  const int nu = static_cast<int>(triple.C_K.rows());
  if (theta_K.n != nk) throw InvalidArgument("realize_mixed_controller: theta dimension mismatch");
  require_even(ny, "n_y");
  require_even(nu, "n_u");
  if (theta_K.canonical_form()) return realize_quantum_controller(triple, choice);
  const int np = theta_K.nprime;
  if (np == 0) throw InvalidArgument("realize_mixed_controller: theta must be canonical or degenerate");

  // Standardize: classical variables first.
  std::vector<int> classical, quantum;
  for (int i = 0; i < nk; ++i) {
    if (theta_K.theta.row(i).cwiseAbs().maxCoeff() <= kStructuralTol) {
      classical.push_back(i);
    } else {
      quantum.push_back(i);
    }
  }
  std::vector<int> order = classical;
  order.insert(order.end(), quantum.begin(), quantum.end());
  const Mat S = permutation_from_order(order);

  // Augment with one conjugate partner per classical variable; the auxiliary
  // dynamics are free for a realization, so they are left at zero. Pairing
  // permutation (c_1, z_1, ..., c_np, z_np, quantum...) makes the augmented
  // commutation matrix canonical.
  const int na = nk + np;
  std::vector<int> pair_order;
  for (int i = 0; i < np; ++i) {
    pair_order.push_back(i);
    pair_order.push_back(nk + i);
  }
  for (int i = np; i < nk; ++i) pair_order.push_back(i);
  const Mat P = permutation_from_order(pair_order);

  ControllerTriple aug;
  Mat A_std = Mat::Zero(na, na);
  A_std.topLeftCorner(nk, nk) = S * triple.A_K * S.transpose();
  Mat B_std = Mat::Zero(na, ny);
  B_std.topRows(nk) = S * triple.B_K;
  Mat C_std = Mat::Zero(nu, na);
  C_std.leftCols(nk) = triple.C_K * S.transpose();
  aug.A_K = P * A_std * P.transpose();
  aug.B_K = P * B_std;
  aug.C_K = C_std * P.transpose();

  const FullController realized = realize_quantum_controller(aug, choice);

  FullController out;
  out.A_K = triple.A_K;
  out.B_K = triple.B_K;
  out.C_K = triple.C_K;
  const Mat B_K1_std = P.transpose() * realized.B_K1;
  out.B_K1 = S.transpose() * B_K1_std.topRows(nk);
  out.B_K0 = realized.B_K0;
  out.theta_K = theta_K;
  out.F_vK = realized.F_vK;
  out.oscillator = realized.oscillator;  // oscillator data of the augmentation
  return out;
}

bool check_compatibility(const FullController& ctrl, double tol) {
  if (ctrl.B_K0.cols() != ctrl.F_vK.n_w) {
    throw InvalidArgument("check_compatibility: B_K0 / F_vK dimension mismatch");
  }
  ItoMatrix Fu;
  Fu.n_w = static_cast<int>(ctrl.B_K0.rows());
  Fu.S = ctrl.B_K0 * ctrl.F_vK.S * ctrl.B_K0.transpose();
  Fu.Tim = ctrl.B_K0 * ctrl.F_vK.Tim * ctrl.B_K0.transpose();
  return Fu.is_canonical(tol);
}

}  // namespace qsynth
