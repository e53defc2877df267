#pragma once

#include <optional>
#include <vector>

#include "qsynth/dissipativity.hpp"
#include "qsynth/qsde.hpp"

namespace qsynth {

struct GaussianState {
  Vec mean;
  Mat cov;  // symmetrized covariance, PSD
};

// Piecewise-constant command signal beta_w(t).
struct InputSignal {
  std::vector<double> switch_times;  // ascending, first entry 0
  std::vector<Vec> values;           // one per segment
  double horizon = 0.0;

  Vec value(double t) const;
  static InputSignal zero(int dim, double horizon);
  static InputSignal constant(const Vec& v, double horizon);
  static InputSignal steps(std::vector<double> times, std::vector<Vec> vals, double horizon);
};

// Optional quadratic outputs accumulated alongside the moments.
struct OutputSpec {
  Mat Cz, Dz;  // beta_z = Cz x + Dz beta_w
  Mat X;       // storage matrix for <V>
  std::optional<SupplyRate> supply;  // running integral of <r(x, beta_w)>
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> means;
  std::vector<Mat> covs;
  std::vector<double> int_zz;    // integral of <beta_z^T beta_z>
  std::vector<double> int_xx;    // integral of <x^T x>
  std::vector<double> int_bwbw;  // integral of beta_w^T beta_w
  std::vector<double> int_r;     // integral of <r>, 0 unless a supply was given
  std::vector<double> V;         // <x^T X x>, 0 unless X was given
  bool step_warning = false;     // |A| dt exceeded 0.1
  InputSignal signal;
  std::optional<SupplyRate> supply_used;
};

// Gaussian moment propagation for d x = A x dt + B dw + G dv with
// dw = beta_w dt + dw~: RK4 on the mean/covariance pair
//   mu'    = A mu + B beta_w
//   Sigma' = A Sigma + Sigma A^T + [B G] S_F [B G]^T
// where S_F is the symmetric part of the combined Ito matrix F. The running
// integrals are carried in the RK4 state, so they share its accuracy.
// dt <= 0 selects min(0.01, 0.1 / |A|).
Trajectory propagate_moments(const Mat& Atil, const Mat& Bbeta, const Mat& Gnoise,
                             const ItoMatrix& F, const GaussianState& state0,
                             const InputSignal& u, double dt = 0.0,
                             const OutputSpec& outputs = {});

// Minimum over the time grid of
//   <V(x(0))> + lambda t - <V(x(t))> - int_0^t <r> ds.
// Uses the exactly-carried integral when the trajectory was propagated with
// the same supply rate; otherwise falls back to trapezoidal integration.
double verify_dissipation_empirically(const Trajectory& traj, const Mat& X,
                                      const SupplyRate& supply, double lambda);

// Pointwise check of
//   int <z^T z> + eps int <x^T x> <= (g^2 - eps^2) int beta_w^T beta_w + mu1 + mu2 t.
bool verify_hinf_objective(const Trajectory& traj, double g, double eps, double mu1, double mu2);

}  // namespace qsynth
