#pragma once

#include <optional>

#include "qsynth/matops.hpp"
#include "qsynth/qsde.hpp"
#include "qsynth/riccati.hpp"

namespace qsynth {

// Quadratic supply rate r(x, b_w) = [x; b_w]^T [[R11, R12], [R12^T, R22]] [x; b_w].
struct SupplyRate {
  Mat R11, R12, R22;

  Mat assembled() const;
};

// Storage matrix X with the achieved dissipation bound.
struct DissipationCertificate {
  Mat X;
  double lambda0 = 0.0;
  bool strict = false;
  double epsilon = 0.0;  // strictness margin, -max eigenvalue of the LMI
};

struct DissipationCheck {
  bool ok = false;
  double lmi_max_eig = 0.0;
  double lambda0 = 0.0;
};

// Evaluates the dissipation LMI
//   [[A^T X + X A + R11, R12 + X B], [B^T X + R12^T, R22]]
// for a given storage matrix X > 0. B multiplies the signal-bearing input,
// G the pure-noise input; F is the Ito matrix of the combined (w, v) input
// and feeds the lambda0 trace formula.
DissipationCheck verify_dissipation(const Mat& A, const Mat& B, const Mat& G,
                                    const SupplyRate& supply, const Mat& X,
                                    const ItoMatrix& F, bool strict,
                                    double tol = kStructuralTol);

// lambda0 = tr([B G]^T X [B G] F), real part (the imaginary part cancels).
double compute_lambda0(const Mat& X, const Mat& B, const Mat& G, const ItoMatrix& F);

// Bounded-real supply rate b_z^T b_z - g^2 b_w^T b_w with b_z = C x + D b_w.
SupplyRate bounded_real_supply(const Mat& C, const Mat& D, double g);

enum class SbrFailure { kNone, kUnstableA, kFeedthroughTooLarge, kNoStabilizingSolution };

struct SbrResult {
  bool holds = false;
  std::optional<Mat> X;  // stabilizing Riccati solution when holds
  SbrFailure reason = SbrFailure::kNone;
};

// Strict bounded real test at attenuation g: A Hurwitz, g^2 I - D^T D > 0,
// and the bounded-real Riccati equation has a stabilizing solution X >= 0.
SbrResult strict_bounded_real_check(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                                    double g);

struct MeanSquareStability {
  bool stable = false;
  std::optional<Mat> X;  // Lyapunov witness A^T X + X A + I = 0
};

// Mean square stability is equivalent to the drift being Hurwitz.
MeanSquareStability mean_square_stable(const Mat& Abar);

}  // namespace qsynth
