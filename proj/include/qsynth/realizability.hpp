#pragma once

#include <optional>
#include <vector>

#include "qsynth/qsde.hpp"

namespace qsynth {

// Open quantum harmonic oscillator data: quadratic Hamiltonian x^T R x and
// coupling operator Lambda x.
struct OscillatorParams {
  Mat R;        // n x n real symmetric
  CMat Lambda;  // N_w x n complex
};

// Embedding of a degenerate-Theta system into one whose commutation matrix is
// canonical up to the returned permutation P (P Theta~ P^T = diag(J, ..., J)).
struct AugmentedSystem {
  LinearQsde sys;
  std::vector<int> embed;  // original variable i lives at sys row embed[i]
  Mat P;
};

struct RealizabilityReport {
  bool realizable = false;
  double residual_A = 0.0;  // drift/noise commutation condition
  double residual_B = 0.0;  // output coupling condition
  bool d_conforms = false;  // D = [I 0] up to the output window
  double tol = 0.0;
  std::optional<OscillatorParams> params;        // canonical Theta only
  std::optional<AugmentedSystem> augmentation;   // degenerate Theta only
};

// Decides physical realizability of a linear QSDE. The output-feeding noise
// columns are taken from sys.output_channel_offset; the offset must be
// pair-aligned (even) so the window permutation preserves quadrature pairs.
RealizabilityReport check_physical_realizability(const LinearQsde& sys);

// Reads off R = (1/4)(-Theta A + A^T Theta) and
// Lambda = -(i/2) [0 I] (Gamma^{-1})^T B^T Theta for a canonical-Theta system
// that passed the realizability check. The enforced-zero top block of the
// coupling extraction is asserted small as a consistency check.
OscillatorParams extract_hamiltonian_coupling(const LinearQsde& sys);

// Builds the QSDE of an open quantum harmonic oscillator from (R, Lambda).
// The result has canonical input Ito matrix, D = [I 0] and output window 0,
// and always passes check_physical_realizability.
LinearQsde build_oscillator(const OscillatorParams& params, int n_y, const CommutationMatrix& theta);

// Canonical-up-to-permutation augmentation of a degenerate-Theta system, per
// the constructive existence proof: one auxiliary variable per classical
// variable, with the auxiliary drift rows chosen minimum-norm.
AugmentedSystem augment_degenerate(const LinearQsde& sys);

}  // namespace qsynth
