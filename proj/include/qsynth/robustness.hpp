#pragma once

#include "qsynth/synthesis.hpp"

namespace qsynth {

// Plant with a norm-bounded real uncertainty A <- A + Btil1 Delta Ctil1,
// |Delta| <= 1, overbounded into extra disturbance/performance channels.
struct UncertainPlant {
  Plant nominal;
  Plant augmented;  // carries the UncertaintyChannel window
  Mat Btil1;        // (mu/2) S
  Mat Ctil1;        // S^{-1}
  Mat S;
  double mu = 0.0;
  double g = 0.0;
};

// Builds the augmented synthesis plant: B1 <- [B1, (mu/2) S], C1 <- [C1; g S^{-1}],
// D12 <- [D12; 0], D21 <- [D21, 0].
UncertainPlant overbound_uncertainty(const Plant& plant, double mu, const Mat& S, double g);

// Perturbed drift Abar = Atil + [Btil1; 0] Delta [Ctil1, 0] from the closed
// loop's uncertainty sub-blocks (the stored C rows are divided by g). When
// within_bound is supplied it reports Delta^T Delta <= (1/g^2) I.
Mat perturbed_drift(const ClosedLoop& cl, const Mat& Delta, bool* within_bound = nullptr);

struct RobustnessReport {
  bool certified = false;      // uncertainty channel strictly bounded real at unity
  double channel_norm = 0.0;   // H-infinity norm of the uncertainty channel
  double worst_margin = 0.0;   // max real part of Abar eigenvalues over the Delta grid
  int samples = 0;
  // structured samples Delta = -(delta/mu) I: (delta, rightmost eigenvalue)
  std::vector<std::pair<double, double>> structured_margins;
};

// Small-gain certificate plus a diagnostic sweep over admissible Delta
// samples (structured -(delta/mu) I values and random contractions).
RobustnessReport robust_stability_check(const ClosedLoop& cl, double g, int grid = 11);

}  // namespace qsynth
