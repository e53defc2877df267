#pragma once

#include <vector>

#include "qsynth/types.hpp"

namespace qsynth {

// The 2x2 symplectic form J = [[0, 1], [-1, 0]].
Mat j2();

// Block diagonal diag(J, ..., J) with `pairs` copies, size 2*pairs.
Mat block_diag_j(int pairs);

// The 2m x 2m permutation P_m mapping (a1, a2, ..., a_{2m}) to
// (a1, a3, ..., a_{2m-1}, a2, a4, ..., a_{2m}).
Mat permutation_matrix(int m);

// Gamma = P_{N_w} diag_{N_w}(M) with M = (1/2) [[1, i], [1, -i]].
CMat gamma_matrix(int n_w_half);

enum class Definiteness {
  kPositiveDefinite,
  kPositiveSemidefinite,
  kIndefinite,
  kNegativeSemidefinite,
  kNegativeDefinite,
};

// Classifies a Hermitian matrix by the signs of its eigenvalues. Inputs
// within tol of Hermitian are symmetrized first; anything further off is
// rejected. A zero matrix reports positive semidefinite.
Definiteness classify_definiteness(const CMat& S, double tol = kStructuralTol);

// Factor L of a Hermitian PSD matrix with L^dagger L = S. L has one row per
// numerically nonzero eigenvalue (at least one row, all zeros for S = 0).
// Throws if S has an eigenvalue below -rank_tol * (1 + |S|).
CMat psd_factor(const CMat& S, double rank_tol = kRankTol);

// Solves A^T P + P A + Q = 0 for symmetric P (Bartels-Stewart on the complex
// Schur form of A). Requires that A and -A^T share no eigenvalue.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

// Eigenvalues sorted lexicographically by (real, imag) so reports are
// deterministic across runs.
std::vector<Complex> eigenvalues(const Mat& A);

double spectral_radius(const Mat& A);

// Largest singular value.
double norm2(const Mat& A);
double norm2(const CMat& A);

// All eigenvalues have real part < -tol.
bool is_hurwitz(const Mat& A, double tol = 0.0);

bool is_hermitian(const CMat& S, double tol = kStructuralTol);

// (S + S^dagger) / 2
CMat hermitian_part(const CMat& S);

}  // namespace qsynth
