#pragma once

#include <optional>

#include "qsynth/types.hpp"

namespace qsynth {

// Commutation matrix Theta with [x_j, x_k] = 2i Theta_jk. Canonical means
// diag(J, ..., J); degenerate canonical has n' leading classical (commuting)
// variables: diag(0_{n' x n'}, J, ..., J).
struct CommutationMatrix {
  // kPermutedCanonical covers matrices that become canonical after a
  // relabelling of variables but are not block diagonal as stored (they show
  // up as the commutation matrices of augmented systems).
  enum class Kind { kCanonical, kDegenerate, kPermutedCanonical };

  int n = 0;
  Kind kind = Kind::kCanonical;
  int nprime = 0;  // classical variable count, 0 when canonical
  Mat theta;

  static CommutationMatrix canonical(int n);
  static CommutationMatrix degenerate(int n, int nprime);
  // Accepts any antisymmetric 0/±1 pattern pairing each variable with at most
  // one conjugate partner (e.g. diag(J, 0_{2x2}), or a permuted canonical).
  static CommutationMatrix from_matrix(const Mat& theta, double tol = kStructuralTol);

  bool canonical_form() const { return kind == Kind::kCanonical; }
};

// Quantum Ito matrix F = S + i Tim with S real symmetric and Tim real
// antisymmetric; F must be positive semidefinite. Canonical form is
// S = I, Tim = diag(J, ..., J).
struct ItoMatrix {
  int n_w = 0;
  Mat S;
  Mat Tim;

  CMat F() const { return S.cast<Complex>() + Complex(0, 1) * Tim.cast<Complex>(); }
  bool is_canonical(double tol = kStructuralTol) const;
};

// Canonical Ito matrix of even dimension n_w.
ItoMatrix canonical_ito(int n_w);

// Classical (commutative) inputs: S = I, Tim = 0.
ItoMatrix classical_ito(int n_w);

// Splits a Hermitian F into its real symmetric and imaginary antisymmetric
// parts, F = S + i Tim.
ItoMatrix ito_decompose(const CMat& F, double tol = kStructuralTol);

// Direct sum of Ito matrices (independent input groups).
ItoMatrix ito_concat(const ItoMatrix& a, const ItoMatrix& b);

// dx = A x dt + B dw, dy = C x dt + D dw with commutation matrix theta and
// input Ito matrix ito. output_channel_offset is the column index in B/D
// where the n_y noise columns feeding the output begin (the realizability
// conditions assume that block comes first; real plants order channels
// differently).
struct LinearQsde {
  Mat A, B, C, D;
  CommutationMatrix theta;
  ItoMatrix ito;
  int output_channel_offset = 0;

  int n() const { return static_cast<int>(A.rows()); }
  int n_w() const { return static_cast<int>(B.cols()); }
  int n_y() const { return static_cast<int>(C.rows()); }

  void validate() const;  // throws InvalidArgument on shape violations
};

struct CommutationCheck {
  bool holds = false;
  double residual = 0.0;
};

// Algebraic test for preservation of the commutation relations:
// residual = |A Theta + Theta A^T + B Tim B^T| in the spectral norm
// (the common factor i is cancelled so the algebra stays real).
CommutationCheck preserves_commutation(const LinearQsde& sys, double tol = kResidualTol);

// Integrates the skew second-moment ODE Cdot = A C + C A^T + 2 B Tim B^T
// from C(0) = 2 Theta with fixed-step RK4 and returns max_t |C(t) - 2 Theta|.
// Under the preservation condition the deviation is integrator error only.
double commutation_ode_oracle(const LinearQsde& sys, double horizon, int steps = 0);

// Appends dummy noise columns to B (extending the Ito matrix canonically) and
// dummy output rows to C/D until n_y is even and n_w >= n_y.
LinearQsde pad_to_convention(const LinearQsde& sys);

}  // namespace qsynth
