#include "qsynth/matops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsynth {

Mat j2() {
  Mat J(2, 2);
  J << 0, 1, -1, 0;
  return J;
}

Mat block_diag_j(int pairs) {
  if (pairs < 0) throw InvalidArgument("block_diag_j: pairs must be >= 0");
  Mat out = Mat::Zero(2 * pairs, 2 * pairs);
  for (int k = 0; k < pairs; ++k) out.block<2, 2>(2 * k, 2 * k) = j2();
  return out;
}

Mat permutation_matrix(int m) {
  if (m < 1) throw InvalidArgument("permutation_matrix: m must be >= 1");
  Mat P = Mat::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    P(i, 2 * i) = 1.0;      // odd-indexed entries first
    P(m + i, 2 * i + 1) = 1.0;  // then even-indexed entries
  }
  return P;
}

CMat gamma_matrix(int n_w_half) {
  if (n_w_half < 1) throw InvalidArgument("gamma_matrix: N_w must be >= 1");
  const Complex i(0.0, 1.0);
  CMat M(2, 2);
  M << 0.5, 0.5 * i, 0.5, -0.5 * i;
  CMat diagM = CMat::Zero(2 * n_w_half, 2 * n_w_half);
  for (int k = 0; k < n_w_half; ++k) diagM.block<2, 2>(2 * k, 2 * k) = M;
  return permutation_matrix(n_w_half) * diagM;
}

bool is_hermitian(const CMat& S, double tol) {
  if (S.rows() != S.cols()) return false;
  return (S - S.adjoint()).cwiseAbs().maxCoeff() <= tol * (1.0 + S.cwiseAbs().maxCoeff());
}

CMat hermitian_part(const CMat& S) { return 0.5 * (S + S.adjoint()); }

Definiteness classify_definiteness(const CMat& S, double tol) {
  if (!is_hermitian(S, tol)) {
    throw InvalidArgument("classify_definiteness: matrix is not Hermitian within tol");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(S), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("classify_definiteness: eigensolver failed");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo > tol) return Definiteness::kPositiveDefinite;
  if (hi < -tol) return Definiteness::kNegativeDefinite;
  if (lo >= -tol) return Definiteness::kPositiveSemidefinite;
  if (hi <= tol) return Definiteness::kNegativeSemidefinite;
  return Definiteness::kIndefinite;
}

CMat psd_factor(const CMat& S, double rank_tol) {
  if (!is_hermitian(S, 10 * rank_tol + kStructuralTol)) {
    throw InvalidArgument("psd_factor: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(S));
  if (es.info() != Eigen::Success) throw NumericalError("psd_factor: eigensolver failed");
  const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  const double thr = rank_tol * scale;
  if (es.eigenvalues().minCoeff() < -thr) {
    throw InvalidArgument("psd_factor: matrix has a negative eigenvalue beyond rank_tol");
  }
  // Rows of L are sqrt(d_k) v_k^dagger for eigenvalues above threshold,
  // largest first. L^dagger L = sum d_k v_k v_k^dagger = S.
  std::vector<int> keep;
  for (int k = static_cast<int>(es.eigenvalues().size()) - 1; k >= 0; --k) {
    if (es.eigenvalues()(k) > thr) keep.push_back(k);
  }
  if (keep.empty()) return CMat::Zero(1, S.cols());
  CMat L(static_cast<int>(keep.size()), S.cols());
  for (int r = 0; r < static_cast<int>(keep.size()); ++r) {
    L.row(r) = std::sqrt(es.eigenvalues()(keep[r])) * es.eigenvectors().col(keep[r]).adjoint();
  }
  return L;
}

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw InvalidArgument("solve_lyapunov: A must be square");
  if (Q.rows() != n || Q.cols() != n) throw InvalidArgument("solve_lyapunov: Q dimension mismatch");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > kStructuralTol * (1.0 + Q.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("solve_lyapunov: Q must be symmetric");
  }
  // A real, so A^H = A^T and the equation A^H P + P A + Q = 0 can be reduced
  // with a complex Schur form A = U T U^H to T^H P' + P' T = -Q',
  // P' = U^H P U. Columns of P' solve lower triangular systems.
  Eigen::ComplexSchur<CMat> schur(A.cast<Complex>());
  if (schur.info() != Eigen::Success) throw NumericalError("solve_lyapunov: Schur failed");
  const CMat T = schur.matrixT();
  const CMat U = schur.matrixU();
  const CMat Qp = U.adjoint() * Q.cast<Complex>() * U;
  CMat Pp = CMat::Zero(n, n);
  const double scale = 1.0 + T.cwiseAbs().maxCoeff();
  for (int k = 0; k < n; ++k) {
    CVec rhs = -Qp.col(k);
    for (int j = 0; j < k; ++j) rhs -= Pp.col(j) * T(j, k);
    // Solve (T^H + T(k,k) I) x = rhs, lower triangular.
    CVec x(n);
    for (int r = 0; r < n; ++r) {
      Complex acc = rhs(r);
      for (int c = 0; c < r; ++c) acc -= std::conj(T(c, r)) * x(c);
      const Complex piv = std::conj(T(r, r)) + T(k, k);
      if (std::abs(piv) < 1e-13 * scale) {
        throw NumericalError("solve_lyapunov: singular Sylvester operator (A and -A^T share an eigenvalue)");
      }
      x(r) = acc / piv;
    }
    Pp.col(k) = x;
  }
  const CMat Pc = U * Pp * U.adjoint();
  Mat P = Pc.real();
  return 0.5 * (P + P.transpose());
}

std::vector<Complex> eigenvalues(const Mat& A) {
  Eigen::EigenSolver<Mat> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: solver failed");
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

double spectral_radius(const Mat& A) {
  double r = 0.0;
  for (const Complex& ev : eigenvalues(A)) r = std::max(r, std::abs(ev));
  return r;
}

double norm2(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return A.jacobiSvd().singularValues()(0);
}

double norm2(const CMat& A) {
  if (A.size() == 0) return 0.0;
  return A.jacobiSvd().singularValues()(0);
}

bool is_hurwitz(const Mat& A, double tol) {
  for (const Complex& ev : eigenvalues(A)) {
    if (ev.real() >= -tol) return false;
  }
  return true;
}

}  // namespace qsynth
