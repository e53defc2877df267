#include "qsynth/riccati.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qsynth/matops.hpp"

namespace qsynth {

namespace {

constexpr double kAxisTol = 1e-7;  // Hamiltonian eigenvalue proximity to the imaginary axis

void check_symmetric(const Mat& M, const char* name) {
  if (M.rows() != M.cols() ||
      (M - M.transpose()).cwiseAbs().maxCoeff() > kStructuralTol * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw InvalidArgument(std::string("solve_care: ") + name + " must be square symmetric");
  }
}

// Swaps the diagonal entries (k, k+1) of the complex upper triangular T by a
// unitary similarity, updating U accordingly.
void swap_schur_entries(CMat& T, CMat& U, int k) {
  const Complex a = T(k, k);
  const Complex b = T(k + 1, k + 1);
  const Complex c = T(k, k + 1);
  // Eigenvector of [[a, c], [0, b]] for eigenvalue b is [c, b - a]^T.
  Complex v1 = c;
  Complex v2 = b - a;
  const double nv = std::sqrt(std::norm(v1) + std::norm(v2));
  CMat W(2, 2);
  if (nv < 1e-300) {
    W << 0, 1, 1, 0;
  } else {
    v1 /= nv;
    v2 /= nv;
    W << v1, -std::conj(v2), v2, std::conj(v1);
  }
  T.middleRows(k, 2) = W.adjoint() * T.middleRows(k, 2);
  T.middleCols(k, 2) = T.middleCols(k, 2) * W;
  U.middleCols(k, 2) = U.middleCols(k, 2) * W;
  T(k + 1, k) = 0.0;
}

// Reorders the Schur form so that eigenvalues with negative real part occupy
// the leading diagonal positions. Returns the count of stable eigenvalues.
int reorder_stable_first(CMat& T, CMat& U) {
  const int m = static_cast<int>(T.rows());
  int stable = 0;
  for (int k = 0; k < m; ++k) {
    if (T(k, k).real() < 0) ++stable;
  }
  for (int pass = 0; pass < m; ++pass) {
    bool moved = false;
    for (int k = 0; k + 1 < m; ++k) {
      if (T(k, k).real() >= 0 && T(k + 1, k + 1).real() < 0) {
        swap_schur_entries(T, U, k);
        moved = true;
      }
    }
    if (!moved) break;
  }
  return stable;
}

}  // namespace

// Matrix sign iteration with determinant scaling. The stable invariant
// subspace of H is the kernel of sign(H) + I.
Mat detail::care_stable_subspace_sign(const Mat& H, int n) {
  Mat S = H;
  const int m = static_cast<int>(H.rows());
  for (int it = 0; it < 100; ++it) {
    Eigen::PartialPivLU<Mat> lu(S);
    const Mat Sinv = lu.inverse();
    double mu = std::pow(std::abs(lu.determinant()), 1.0 / m);
    if (!(mu > 1e-12 && std::isfinite(mu))) mu = 1.0;
    const Mat next = 0.5 * (S / mu + mu * Sinv);
    const double delta = (next - S).cwiseAbs().maxCoeff();
    S = next;
    if (delta < 1e-13 * (1.0 + S.cwiseAbs().maxCoeff())) break;
  }
  // (S + I) [I; X] = 0  =>  [S12; S22 + I] X = -[S11 + I; S21]
  Mat lhs(2 * n, n), rhs(2 * n, n);
  lhs.topRows(n) = S.topRightCorner(n, n);
  lhs.bottomRows(n) = S.bottomRightCorner(n, n) + Mat::Identity(n, n);
  rhs.topRows(n) = -(S.topLeftCorner(n, n) + Mat::Identity(n, n));
  rhs.bottomRows(n) = -S.bottomLeftCorner(n, n);
  Eigen::ColPivHouseholderQR<Mat> qr(lhs);
  if (qr.rank() < n) {
    throw CareFailure(CareFailure::Kind::kSubspaceExtractionFailure,
                      "solve_care: sign-function subspace extraction failed");
  }
  return qr.solve(rhs);
}

CareSolution solve_care(const CareProblem& p) {
  const int n = static_cast<int>(p.A.rows());
  if (p.A.cols() != n) throw InvalidArgument("solve_care: A must be square");
  check_symmetric(p.Mq, "Mq");
  check_symmetric(p.Q, "Q");

  // Balance the off-diagonal blocks with the similarity diag(I, sI); the
  // solution scales back as X = s X'. Keeps the eigensolver accurate when
  // Mq and Q differ by orders of magnitude (small-g bounded-real problems).
  const double nm = norm2(p.Mq);
  const double nq = norm2(p.Q);
  const double s = (nm > 0 && nq > 0) ? std::sqrt(nq / nm) : 1.0;

  Mat H(2 * n, 2 * n);
  H << p.A, s * p.Mq, -p.Q / s, -p.A.transpose();

  Eigen::ComplexSchur<CMat> schur(H.cast<Complex>());
  if (schur.info() != Eigen::Success) {
    throw NumericalError("solve_care: Schur decomposition failed");
  }
  CMat T = schur.matrixT();
  CMat U = schur.matrixU();
  for (int k = 0; k < 2 * n; ++k) {
    if (std::abs(T(k, k).real()) < kAxisTol) {
      throw CareFailure(CareFailure::Kind::kImaginaryAxisEigenvalue,
                        "solve_care: Hamiltonian eigenvalue on the imaginary axis; "
                        "no stabilizing solution exists at this parameter");
    }
  }

  Mat X;
  const int stable = reorder_stable_first(T, U);
  bool used_fallback = false;
  if (stable != n) {
    // Hamiltonian spectra are symmetric; a miscount means reordering stalled.
    X = detail::care_stable_subspace_sign(H, n);
    used_fallback = true;
  } else {
    const CMat U11 = U.topLeftCorner(n, n);
    const CMat U21 = U.bottomLeftCorner(n, n);
    // X = U21 U11^{-1}, via U11^T X^T = U21^T
    Eigen::FullPivLU<CMat> lu(U11.transpose());
    if (!lu.isInvertible()) {
      X = detail::care_stable_subspace_sign(H, n);
      used_fallback = true;
    } else {
      const CMat Xc = lu.solve(U21.transpose()).transpose();
      if (Xc.imag().cwiseAbs().maxCoeff() > 1e-7 * (1.0 + Xc.real().cwiseAbs().maxCoeff())) {
        X = detail::care_stable_subspace_sign(H, n);
        used_fallback = true;
      } else {
        X = Xc.real();
      }
    }
  }
  X = (s * 0.5 * (X + X.transpose())).eval();

  CareSolution sol;
  sol.X = X;
  sol.residual = norm2((p.A.transpose() * X + X * p.A + X * p.Mq * X + p.Q).eval());
  sol.closed_loop_eigs = eigenvalues(p.A + p.Mq * X);
  sol.stabilizing = true;
  for (const Complex& ev : sol.closed_loop_eigs) {
    if (ev.real() >= -1e-9) sol.stabilizing = false;
  }
  const double qscale = 1.0 + norm2(p.Q);
  if (sol.residual > 1e-6 * qscale * (1.0 + norm2(X)) ) {
    throw CareFailure(CareFailure::Kind::kSubspaceExtractionFailure,
                      used_fallback ? "solve_care: sign-function solution residual too large"
                                    : "solve_care: Schur solution residual too large");
  }
  return sol;
}

namespace {

// True iff the bounded-real Hamiltonian at level gamma has an eigenvalue on
// the imaginary axis, meaning gamma <= ||G||_inf.
bool gamma_level_hit(const Mat& A, const Mat& B, const Mat& C, const Mat& D, double gamma) {
  const int m = static_cast<int>(B.cols());
  const Mat R = gamma * gamma * Mat::Identity(m, m) - D.transpose() * D;
  Eigen::SelfAdjointEigenSolver<Mat> es(R, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-12 * gamma * gamma) return true;
  const Mat Rinv = R.inverse();
  const Mat Abar = A + B * Rinv * D.transpose() * C;
  const int n = static_cast<int>(A.rows());
  const Mat Mq = B * Rinv * B.transpose();
  const Mat Q =
      C.transpose() * (Mat::Identity(C.rows(), C.rows()) + D * Rinv * D.transpose()) * C;
  const double nm = norm2(Mq);
  const double nq = norm2(Q);
  const double s = (nm > 0 && nq > 0) ? std::sqrt(nq / nm) : 1.0;
  Mat H(2 * n, 2 * n);
  H << Abar, s * Mq, -Q / s, -Abar.transpose();
  for (const Complex& ev : eigenvalues(H)) {
    if (std::abs(ev.real()) <= 1e-8 * (1.0 + std::abs(ev))) return true;
  }
  return false;
}

}  // namespace

double hinf_norm(const Mat& A, const Mat& B, const Mat& C, const Mat& D, double tol) {
  if (!is_hurwitz(A)) throw UnstableA("hinf_norm: A is not Hurwitz");
  if (tol <= 0) throw InvalidArgument("hinf_norm: tol must be positive");
  double lo = norm2(D);
  // Crude upper bound seed, doubled until the level test reports feasible.
  double abscissa = 0.0;
  for (const Complex& ev : eigenvalues(A)) abscissa = std::max(abscissa, ev.real());
  double hi = lo + norm2(B) * norm2(C) / std::max(1e-12, -abscissa) + 1.0;
  int guard = 0;
  while (gamma_level_hit(A, B, C, D, hi)) {
    hi *= 2.0;
    if (++guard > 60) throw NumericalError("hinf_norm: failed to bracket the norm");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_level_hit(A, B, C, D, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

double pencil_sigma_min(const Mat& M0, const Mat& E, double omega) {
  const Complex jw(0.0, omega);
  const CMat M = M0.cast<Complex>() - jw * E.cast<Complex>();
  const auto sv = M.jacobiSvd().singularValues();
  return sv(sv.size() - 1);
}

}  // namespace

bool pencil_full_rank_on_axis(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                              PencilRank which) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() || D.cols() != B.cols()) {
    throw InvalidArgument("pencil_full_rank_on_axis: block dimensions incompatible");
  }
  Mat M0(n + C.rows(), n + B.cols());
  M0 << A, B, C, D;
  Mat E = Mat::Zero(M0.rows(), M0.cols());
  E.topLeftCorner(n, n) = Mat::Identity(n, n);
  if (which == PencilRank::kRow) {
    M0 = M0.transpose().eval();
    E = E.transpose().eval();
  }
  if (M0.rows() < M0.cols()) return false;  // cannot have full column rank

  const double scale = 1.0 + M0.cwiseAbs().maxCoeff();
  const double drop_tol = 1e-7 * scale;

  // Identically rank-deficient pencils drop rank at generic frequencies.
  if (pencil_sigma_min(M0, E, 0.7310562) < drop_tol && pencil_sigma_min(M0, E, 2.193042) < drop_tol) {
    return false;
  }
  if (pencil_sigma_min(M0, E, 0.0) < drop_tol) return false;

  // M(w) = M0 - jwE loses column rank at real w iff the realified quadratic
  // pencil A0 + w A1 + w^2 A2 is singular there.
  const int c = static_cast<int>(M0.cols());
  const Mat S0 = M0.transpose() * M0;
  const Mat S2 = E.transpose() * E;
  const Mat K = M0.transpose() * E - E.transpose() * M0;
  Mat A0 = Mat::Zero(2 * c, 2 * c), A1 = Mat::Zero(2 * c, 2 * c), A2 = Mat::Zero(2 * c, 2 * c);
  A0.topLeftCorner(c, c) = S0;
  A0.bottomRightCorner(c, c) = S0;
  A1.topRightCorner(c, c) = K;
  A1.bottomLeftCorner(c, c) = -K;
  A2.topLeftCorner(c, c) = S2;
  A2.bottomRightCorner(c, c) = S2;

  Mat L(4 * c, 4 * c), Rm = Mat::Zero(4 * c, 4 * c);
  L << -A1, -A0, Mat::Identity(2 * c, 2 * c), Mat::Zero(2 * c, 2 * c);
  Rm.topLeftCorner(2 * c, 2 * c) = A2;
  Rm.bottomRightCorner(2 * c, 2 * c) = Mat::Identity(2 * c, 2 * c);

  Eigen::GeneralizedEigenSolver<Mat> ges(L, Rm, /*computeEigenvectors=*/false);
  if (ges.info() != Eigen::Success) {
    throw NumericalError("pencil_full_rank_on_axis: generalized eigensolver failed");
  }
  for (int k = 0; k < ges.alphas().size(); ++k) {
    const Complex alpha = ges.alphas()(k);
    const double beta = ges.betas()(k);
    if (std::abs(beta) < 1e-10 * (1.0 + std::abs(alpha))) continue;  // eigenvalue at infinity
    const Complex lam = alpha / beta;
    if (std::abs(lam.imag()) > 1e-6 * (1.0 + std::abs(lam))) continue;
    if (pencil_sigma_min(M0, E, lam.real()) < drop_tol) return false;
  }
  return true;
}

}  // namespace qsynth
