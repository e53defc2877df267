#pragma once

#include <vector>

#include "qsynth/types.hpp"

namespace qsynth {

// Continuous algebraic Riccati equation A^T X + X A + X Mq X + Q = 0.
struct CareProblem {
  Mat A;
  Mat Mq;  // quadratic coefficient, symmetric
  Mat Q;   // constant term, symmetric
};

struct CareSolution {
  Mat X;  // symmetric
  double residual = 0.0;
  std::vector<Complex> closed_loop_eigs;  // eigenvalues of A + Mq X
  bool stabilizing = false;
};

class CareFailure : public Error {
 public:
  enum class Kind { kImaginaryAxisEigenvalue, kSubspaceExtractionFailure };
  CareFailure(Kind kind, const std::string& what) : Error(what), kind(kind) {}
  Kind kind;
};

class UnstableA : public Error {
 public:
  explicit UnstableA(const std::string& what) : Error(what) {}
};

// Stabilizing solution via the stable invariant subspace of the Hamiltonian
// [[A, Mq], [-Q, -A^T]]. Schur with eigenvalue reordering; falls back to the
// matrix sign iteration if the subspace extraction is ill conditioned.
// Throws CareFailure when the Hamiltonian has eigenvalues on the imaginary
// axis (no stabilizing solution at this parameter).
CareSolution solve_care(const CareProblem& p);

namespace detail {
// The sign-iteration route on its own, for cross-checking the two methods.
Mat care_stable_subspace_sign(const Mat& hamiltonian, int n);
}  // namespace detail

// H-infinity norm of C (sI - A)^{-1} B + D for Hurwitz A, by bisection on the
// imaginary-axis eigenvalue test of the gamma-parameterized Hamiltonian.
double hinf_norm(const Mat& A, const Mat& B, const Mat& C, const Mat& D, double tol = 1e-9);

enum class PencilRank { kColumn, kRow };

// True iff [[A - jwI, B], [C, D]] has full column (resp. row) rank for all
// real w >= 0. Candidate rank-drop frequencies come from a realified
// quadratic eigenvalue problem; each candidate is confirmed by a direct
// smallest-singular-value evaluation, so a degenerate (identically
// rank-deficient) pencil reports false.
bool pencil_full_rank_on_axis(const Mat& A, const Mat& B, const Mat& C, const Mat& D,
                              PencilRank which = PencilRank::kColumn);

}  // namespace qsynth
