#pragma once

#include "qsynth/synthesis.hpp"

namespace qsynth {

struct RealizationChoice {
  // Margin added to the positive shift that makes the coupling Gram matrix PSD.
  double xi_shift_margin = 1e-6;
  // Optional lower bound on the controller noise pair count N_vK (extra pairs
  // are padded with zero coupling). 0 means rank-minimal.
  int min_n_vK = 0;
};

// Realizes a controller triple as a fully quantum system (Theta_K canonical):
// constructs the coupling blocks, the positive-shifted Gram factor and the
// noise input matrices, and packages the resulting oscillator data. Requires
// n_K, n_y, n_u all even.
FullController realize_quantum_controller(const ControllerTriple& triple,
                                          const RealizationChoice& choice = {});

// Realizes a controller triple as a classical system (Theta_K = 0). The
// measured signal's Ito matrix F_y determines the cancelling noise block: a
// fresh canonical pair carries the control displacement, and for each
// conjugate y pair a column-swapped copy of B_K cancels its skew
// contribution exactly.
FullController realize_classical_controller(const ControllerTriple& triple, const ItoMatrix& F_y);
FullController realize_classical_controller(const ControllerTriple& triple);

// Realizes a controller triple with a degenerate canonical Theta_K (mixed
// quantum/classical degrees of freedom) by realizing a canonical-up-to-
// permutation augmentation and projecting the noise couplings back onto the
// original variables.
FullController realize_mixed_controller(const ControllerTriple& triple,
                                        const CommutationMatrix& theta_K,
                                        const RealizationChoice& choice = {});

// True iff B_K0 F_vK B_K0^T is canonical, so the controller output can drive
// a plant expecting a canonical control field.
bool check_compatibility(const FullController& ctrl, double tol = kStructuralTol);

}  // namespace qsynth
