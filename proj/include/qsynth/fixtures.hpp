#pragma once

#include "qsynth/robustness.hpp"
#include "qsynth/synthesis.hpp"

namespace qsynth::fixtures {

// Optical cavity resonantly coupled to three channels (kappa1 = 2.6,
// kappa2 = kappa3 = 0.2, gamma = 3).
Plant cavity();

// The same cavity with a +-10% uncertain kappa1, overbounded with S = 1.5 I
// at attenuation g.
UncertainPlant uncertain_cavity(double g = 0.1);

// Cavity with homodyne measurement of the real quadrature (classical scalar y).
Plant measured_cavity();

// Cascade of an optical amplifier (alpha = 1, beta = 0.5, thermal N = 0.5)
// and the cavity.
Plant amplifier_cavity();

}  // namespace qsynth::fixtures
