#include "qsynth/realizability.hpp"

#include <cmath>

#include "qsynth/matops.hpp"

namespace qsynth {

namespace {

// Moves the output-feeding noise columns of B/D (and the matching rows and
// columns of Tim/S) to the front.
struct WindowPermuted {
  Mat B, D, Tim, S;
};

WindowPermuted permute_output_window(const LinearQsde& sys) {
  const int nw = sys.n_w();
  const int ny = sys.n_y();
  const int off = sys.output_channel_offset;
  if (off % 2 != 0) throw InvalidArgument("output_channel_offset must be pair-aligned (even)");
  Eigen::VectorXi order(nw);
  int k = 0;
  for (int j = off; j < off + ny; ++j) order(k++) = j;
  for (int j = 0; j < nw; ++j) {
    if (j < off || j >= off + ny) order(k++) = j;
  }
  WindowPermuted out;
  out.B.resize(sys.B.rows(), nw);
  out.D.resize(sys.D.rows(), nw);
  out.Tim.resize(nw, nw);
  out.S.resize(nw, nw);
  for (int j = 0; j < nw; ++j) {
    out.B.col(j) = sys.B.col(order(j));
    out.D.col(j) = sys.D.col(order(j));
  }
  for (int r = 0; r < nw; ++r) {
    for (int c = 0; c < nw; ++c) {
      out.Tim(r, c) = sys.ito.Tim(order(r), order(c));
      out.S(r, c) = sys.ito.S(order(r), order(c));
    }
  }
  return out;
}

// Standardizing permutation for a degenerate commutation matrix: classical
// variables first, then quantum pairs. Returns row indices in new order.
std::vector<int> standard_order(const CommutationMatrix& cm) {
  std::vector<int> classical, quantum;
  for (int i = 0; i < cm.n; ++i) {
    if (cm.theta.row(i).cwiseAbs().maxCoeff() <= kStructuralTol) {
      classical.push_back(i);
    } else {
      quantum.push_back(i);
    }
  }
  std::vector<int> order = classical;
  order.insert(order.end(), quantum.begin(), quantum.end());
  return order;
}

Mat permutation_from_order(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  Mat S = Mat::Zero(n, n);
  for (int r = 0; r < n; ++r) S(r, order[r]) = 1.0;
  return S;
}

}  // namespace

RealizabilityReport check_physical_realizability(const LinearQsde& sys) {
  sys.validate();
  const int ny = sys.n_y();
  const int nw = sys.n_w();
  if (ny % 2 != 0) throw InvalidArgument("check_physical_realizability: n_y must be even");
  if (nw < ny) throw InvalidArgument("check_physical_realizability: n_w must be >= n_y");

  const Mat& theta = sys.theta.theta;
  const WindowPermuted wp = permute_output_window(sys);

  RealizabilityReport rep;
  rep.residual_A = norm2((sys.A * theta + theta * sys.A.transpose() +
                          sys.B * sys.ito.Tim * sys.B.transpose())
                             .eval());
  const Mat target_B = theta * sys.C.transpose() * block_diag_j(ny / 2);
  rep.residual_B = norm2((wp.B.leftCols(ny) - target_B).eval());

  Mat d_target = Mat::Zero(ny, nw);
  d_target.leftCols(ny) = Mat::Identity(ny, ny);
  const double d_res = (wp.D - d_target).cwiseAbs().maxCoeff();

  const double bnorm = norm2(sys.B);
  rep.tol = kResidualTol * (1.0 + norm2(sys.A) + bnorm * bnorm);
  rep.d_conforms = d_res <= rep.tol;
  rep.realizable = rep.residual_A <= rep.tol && rep.residual_B <= rep.tol && rep.d_conforms;

  if (rep.realizable) {
    if (sys.theta.canonical_form() && sys.ito.is_canonical()) {
      rep.params = extract_hamiltonian_coupling(sys);
    } else if (sys.theta.nprime > 0) {
      rep.augmentation = augment_degenerate(sys);
    }
  }
  return rep;
}

OscillatorParams extract_hamiltonian_coupling(const LinearQsde& sys) {
  sys.validate();
  if (!sys.theta.canonical_form()) {
    throw InvalidArgument("extract_hamiltonian_coupling: Theta must be canonical (augment first)");
  }
  const Mat& theta = sys.theta.theta;
  const int nw = sys.n_w();
  if (nw % 2 != 0) throw InvalidArgument("extract_hamiltonian_coupling: n_w must be even");
  const int Nw = nw / 2;

  OscillatorParams p;
  Mat R = 0.25 * (-theta * sys.A + sys.A.transpose() * theta);
  p.R = 0.5 * (R + R.transpose());

  const WindowPermuted wp = permute_output_window(sys);
  const CMat gamma_inv_t = gamma_matrix(Nw).inverse().transpose();
  const CMat T = Complex(0, -0.5) * gamma_inv_t * wp.B.transpose().cast<Complex>() * theta.cast<Complex>();
  p.Lambda = T.bottomRows(Nw);
  // Top block must be -conj(Lambda); anything else means inconsistent input.
  const double mismatch = (T.topRows(Nw) + p.Lambda.conjugate()).cwiseAbs().maxCoeff();
  if (mismatch > 1e-10 * (1.0 + p.Lambda.cwiseAbs().maxCoeff())) {
    throw NumericalError("extract_hamiltonian_coupling: coupling blocks inconsistent; system is not realizable");
  }
  return p;
}

LinearQsde build_oscillator(const OscillatorParams& params, int n_y, const CommutationMatrix& theta) {
  const int n = static_cast<int>(params.R.rows());
  if (params.R.cols() != n) throw InvalidArgument("build_oscillator: R must be square");
  if ((params.R - params.R.transpose()).cwiseAbs().maxCoeff() >
      kStructuralTol * (1.0 + params.R.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("build_oscillator: R must be symmetric");
  }
  if (!theta.canonical_form() || theta.n != n) {
    throw InvalidArgument("build_oscillator: Theta must be canonical of matching dimension");
  }
  if (n_y <= 0 || n_y % 2 != 0) throw InvalidArgument("build_oscillator: n_y must be positive even");
  const int Nw = static_cast<int>(params.Lambda.rows());
  const int Ny = n_y / 2;
  if (params.Lambda.cols() != n) throw InvalidArgument("build_oscillator: Lambda column count mismatch");
  if (Nw < Ny) throw InvalidArgument("build_oscillator: Lambda needs at least n_y/2 rows");

  const CMat L = params.Lambda;
  const Mat th = theta.theta;

  LinearQsde sys;
  sys.A = 2.0 * th * (params.R + (L.adjoint() * L).imag());

  CMat side(n, 2 * Nw);
  side.leftCols(Nw) = -L.adjoint();
  side.rightCols(Nw) = L.transpose();
  const CMat Bc = Complex(0, 2) * th.cast<Complex>() * side * gamma_matrix(Nw);
  if (Bc.imag().cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Bc.real().cwiseAbs().maxCoeff())) {
    throw NumericalError("build_oscillator: B has a nonreal residue");
  }
  sys.B = Bc.real();

  Mat stacked(2 * Nw, n);
  stacked.topRows(Nw) = 2.0 * L.real();
  stacked.bottomRows(Nw) = 2.0 * L.imag();
  Mat sel(2 * Ny, n);
  sel.topRows(Ny) = stacked.topRows(Ny);
  sel.bottomRows(Ny) = stacked.middleRows(Nw, Ny);
  sys.C = permutation_matrix(Ny).transpose() * sel;

  sys.D = Mat::Zero(n_y, 2 * Nw);
  sys.D.leftCols(n_y) = Mat::Identity(n_y, n_y);

  sys.theta = theta;
  sys.ito = canonical_ito(2 * Nw);
  sys.output_channel_offset = 0;
  sys.validate();
  return sys;
}

AugmentedSystem augment_degenerate(const LinearQsde& sys) {
  sys.validate();
  if (sys.theta.nprime == 0) {
    throw InvalidArgument("augment_degenerate: Theta has no classical variables");
  }
  const int n = sys.n();
  const int nw = sys.n_w();
  const int ny = sys.n_y();
  const int np = sys.theta.nprime;
  const int nq = n - np;

  // Work in standard variable order (classical first) and with the output
  // window in front; undo both at the end.
  const std::vector<int> order = standard_order(sys.theta);
  const Mat S = permutation_from_order(order);
  const Mat A = S * sys.A * S.transpose();
  const Mat C = sys.C * S.transpose();
  const WindowPermuted wp = permute_output_window(sys);
  const Mat B = S * wp.B;
  const Mat& Tim = wp.Tim;

  const Mat C1 = C.leftCols(np);                     // n_y x n'
  const Mat Bp1 = -C1.transpose() * block_diag_j(ny / 2);  // n' x n_y
  const Mat TimYY = Tim.topLeftCorner(ny, ny);
  const Mat Ap1 = -0.5 * Bp1 * TimYY * Bp1.transpose();

  // [A'' , -A'_2 diag(J)] = -[A11^T A21^T] + B'_1 Tim[:ny,:] B^T
  const Mat rhs = -A.leftCols(np).transpose() + Bp1 * Tim.topRows(ny) * B.transpose();
  const Mat App = rhs.leftCols(np);
  Mat Ap2(np, nq);
  if (nq > 0) {
    Ap2 = rhs.rightCols(nq) * block_diag_j(nq / 2);
  }

  LinearQsde aug;
  aug.A = Mat::Zero(n + np, n + np);
  aug.A.topLeftCorner(n, n) = A;
  aug.A.block(n, 0, np, np) = Ap1;
  if (nq > 0) aug.A.block(n, np, np, nq) = Ap2;
  aug.A.bottomRightCorner(np, np) = App;

  aug.B = Mat::Zero(n + np, nw);
  aug.B.topRows(n) = B;
  aug.B.block(n, 0, np, ny) = Bp1;

  aug.C = Mat::Zero(ny, n + np);
  aug.C.leftCols(n) = C;

  // Restore the original noise column order so the first n rows of the
  // augmentation reproduce (A, B, C, D) verbatim; the auxiliary coupling
  // lands on the original output window.
  const int off = sys.output_channel_offset;
  Mat Bux(n + np, nw);
  Mat Dux(ny, nw);
  for (int j = 0; j < nw; ++j) {
    const int src = j < off ? ny + j : (j < off + ny ? j - off : j);
    Bux.col(j) = aug.B.col(src);
    Dux.col(j) = wp.D.col(src);
  }
  aug.B = Bux;
  aug.D = Dux;

  // Theta~ = [[0, 0, I], [0, theta_q, 0], [-I, 0, 0]]
  Mat theta_aug = Mat::Zero(n + np, n + np);
  if (nq > 0) theta_aug.block(np, np, nq, nq) = block_diag_j(nq / 2);
  theta_aug.block(0, n, np, np) = Mat::Identity(np, np);
  theta_aug.block(n, 0, np, np) = -Mat::Identity(np, np);
  aug.theta = CommutationMatrix::from_matrix(theta_aug);

  aug.ito = sys.ito;
  aug.output_channel_offset = off;

  // Undo the standardizing state permutation: x~ = [S x; z].
  Mat T = Mat::Identity(n + np, n + np);
  T.topLeftCorner(n, n) = S;
  aug.A = (T.transpose() * aug.A * T).eval();
  aug.B = (T.transpose() * aug.B).eval();
  aug.C = (aug.C * T).eval();
  aug.theta.theta = (T.transpose() * aug.theta.theta * T).eval();

  // Pairing permutation: (c_1, z_1, ..., c_{n'}, z_{n'}, q_1, ..., q_{nq}),
  // expressed against the un-standardized augmented coordinates.
  std::vector<int> pair_order;
  pair_order.reserve(n + np);
  for (int i = 0; i < np; ++i) {
    pair_order.push_back(i);      // classical (standard order)
    pair_order.push_back(n + i);  // its auxiliary partner
  }
  for (int i = 0; i < nq; ++i) pair_order.push_back(np + i);
  const Mat P_std = permutation_from_order(pair_order);

  AugmentedSystem out;
  out.sys = aug;
  out.P = P_std * T;  // composed with the standardizer
  out.embed.resize(n);
  for (int i = 0; i < n; ++i) out.embed[i] = i;
  out.sys.validate();
  return out;
}

}  // namespace qsynth
