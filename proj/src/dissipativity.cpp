#include "qsynth/dissipativity.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsynth {

Mat SupplyRate::assembled() const {
  const int n = static_cast<int>(R11.rows());
  const int m = static_cast<int>(R22.rows());
  Mat R(n + m, n + m);
  R << R11, R12, R12.transpose(), R22;
  return R;
}

DissipationCheck verify_dissipation(const Mat& A, const Mat& B, const Mat& G,
                                    const SupplyRate& supply, const Mat& X,
                                    const ItoMatrix& F, bool strict, double tol) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (X.rows() != n || X.cols() != n) throw InvalidArgument("verify_dissipation: X dimension mismatch");
  if (supply.R11.rows() != n || supply.R12.rows() != n || supply.R12.cols() != m ||
      supply.R22.rows() != m) {
    throw InvalidArgument("verify_dissipation: supply rate dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Mat> esx(0.5 * (X + X.transpose()), Eigen::EigenvaluesOnly);
  if (esx.eigenvalues().minCoeff() <= -tol) {
    throw InvalidArgument("verify_dissipation: X is not positive definite");
  }

  Mat lmi(n + m, n + m);
  lmi.topLeftCorner(n, n) = A.transpose() * X + X * A + supply.R11;
  lmi.topRightCorner(n, m) = supply.R12 + X * B;
  lmi.bottomLeftCorner(m, n) = lmi.topRightCorner(n, m).transpose();
  lmi.bottomRightCorner(m, m) = supply.R22;

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (lmi + lmi.transpose()), Eigen::EigenvaluesOnly);
  DissipationCheck out;
  out.lmi_max_eig = es.eigenvalues().maxCoeff();
  const double scale = tol * (1.0 + lmi.cwiseAbs().maxCoeff());
  out.ok = strict ? out.lmi_max_eig < -scale : out.lmi_max_eig <= scale;
  out.lambda0 = compute_lambda0(X, B, G, F);
  return out;
}

double compute_lambda0(const Mat& X, const Mat& B, const Mat& G, const ItoMatrix& F) {
  const int m = static_cast<int>(B.cols());
  const int q = static_cast<int>(G.cols());
  if (F.n_w != m + q) throw InvalidArgument("compute_lambda0: Ito matrix dimension mismatch");
  Mat BG(B.rows(), m + q);
  if (m > 0) BG.leftCols(m) = B;
  if (q > 0) BG.rightCols(q) = G;
  const CMat prod = (BG.transpose() * X * BG).cast<Complex>() * F.F();
  const double lam = prod.trace().real();
  if (std::abs(prod.trace().imag()) > 1e-10 * (1.0 + std::abs(lam))) {
    throw NumericalError("compute_lambda0: trace has a nonreal residue");
  }
  return lam;
}

SupplyRate bounded_real_supply(const Mat& C, const Mat& D, double g) {
  if (g <= 0) throw InvalidArgument("bounded_real_supply: g must be positive");
  SupplyRate s;
  s.R11 = C.transpose() * C;
  s.R12 = C.transpose() * D;
  s.R22 = D.transpose() * D - g * g * Mat::Identity(D.cols(), D.cols());
  return s;
}

SbrResult strict_bounded_real_check(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                                    double g) {
  SbrResult out;
  if (!is_hurwitz(A)) {
    out.reason = SbrFailure::kUnstableA;
    return out;
  }
  const int m = static_cast<int>(B.cols());
  const Mat R = g * g * Mat::Identity(m, m) - D.transpose() * D;
  if (classify_definiteness(R.cast<Complex>()) != Definiteness::kPositiveDefinite) {
    out.reason = SbrFailure::kFeedthroughTooLarge;
    return out;
  }
  // A^T X + X A + C^T C + (X B + C^T D) R^{-1} (B^T X + D^T C) = 0 in the
  // standard CARE form with shifted drift.
  const Mat Rinv = R.inverse();
  CareProblem p;
  p.A = A + B * Rinv * D.transpose() * C;
  p.Mq = B * Rinv * B.transpose();
  p.Q = C.transpose() * (Mat::Identity(C.rows(), C.rows()) + D * Rinv * D.transpose()) * C;
  p.Mq = 0.5 * (p.Mq + p.Mq.transpose()).eval();
  p.Q = 0.5 * (p.Q + p.Q.transpose()).eval();
  try {
    const CareSolution sol = solve_care(p);
    Eigen::SelfAdjointEigenSolver<Mat> es(sol.X, Eigen::EigenvaluesOnly);
    if (!sol.stabilizing || es.eigenvalues().minCoeff() < -kStructuralTol * (1.0 + norm2(sol.X))) {
      out.reason = SbrFailure::kNoStabilizingSolution;
      return out;
    }
    out.holds = true;
    out.X = sol.X;
  } catch (const CareFailure&) {
    out.reason = SbrFailure::kNoStabilizingSolution;
  }
  return out;
}

MeanSquareStability mean_square_stable(const Mat& Abar) {
  if (Abar.rows() != Abar.cols()) throw InvalidArgument("mean_square_stable: matrix must be square");
  MeanSquareStability out;
  out.stable = is_hurwitz(Abar);
  if (out.stable) {
    out.X = solve_lyapunov(Abar, Mat::Identity(Abar.rows(), Abar.cols()));
  }
  return out;
}

}  // namespace qsynth
