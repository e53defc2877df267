#pragma once

#include <optional>
#include <string>

#include "qsynth/dissipativity.hpp"
#include "qsynth/realizability.hpp"
#include "qsynth/riccati.hpp"

namespace qsynth {

// Location of an uncertainty channel inside an augmented plant / closed loop:
// the Delta input occupies n_in disturbance columns starting at w_offset and
// the Delta output n_out performance rows starting at z_offset. The stored
// C-rows carry a factor g; the channel itself is C1tilde = rows / g.
struct UncertaintyChannel {
  int w_offset = 0;
  int n_in = 0;
  int z_offset = 0;
  int n_out = 0;
  double g = 1.0;
  double mu = 0.0;
};

// Partitioned H-infinity plant
//   dx = A x dt + B0 dv + B1 dw + B2 du
//   dz = C1 x dt + D12 du
//   dy = C2 x dt + D20 dv + D21 dw
struct Plant {
  Mat A, B0, B1, B2, C1, D12, C2, D20, D21;
  ItoMatrix Fv, Fw;
  CommutationMatrix thetaP;
  std::optional<UncertaintyChannel> uncertainty;

  int n() const { return static_cast<int>(A.rows()); }
  int n_v() const { return static_cast<int>(B0.cols()); }
  int n_w() const { return static_cast<int>(B1.cols()); }
  int n_u() const { return static_cast<int>(B2.cols()); }
  int n_z() const { return static_cast<int>(C1.rows()); }
  int n_y() const { return static_cast<int>(C2.rows()); }

  Mat E1() const { return D12.transpose() * D12; }
  Mat E2() const { return D21 * D21.transpose(); }

  void validate() const;
};

struct ControllerTriple {
  Mat A_K, B_K, C_K;
};

// Controller with its noise interface fixed:
//   dxi = A_K xi dt + B_K1 dv_K + B_K dy
//   du  = C_K xi dt + B_K0 dv_K
struct FullController {
  Mat A_K, B_K, C_K;
  Mat B_K0, B_K1;  // zero-column matrices when the controller carries no noise
  CommutationMatrix theta_K;
  ItoMatrix F_vK;
  std::optional<OscillatorParams> oscillator;

  int n_K() const { return static_cast<int>(A_K.rows()); }
  int n_u() const { return static_cast<int>(C_K.rows()); }
  int n_y() const { return static_cast<int>(B_K.cols()); }
  int n_vK() const { return static_cast<int>(B_K1.cols()); }

  static FullController shell(const ControllerTriple& triple, int n_plant_y);

  // The controller viewed as a linear QSDE with combined input (v_K, y).
  LinearQsde as_qsde(const ItoMatrix& F_y) const;
};

// Closed loop in the coordinates eta = [x; xi]:
//   d eta = Atil eta dt + Btil dw + Gtil d(v, v_K)
//   dz    = Ctil eta dt + Htil d(v, v_K)
struct ClosedLoop {
  Mat Atil, Btil, Gtil, Ctil, Htil;
  ItoMatrix F_combined;  // Ito matrix of (w, v, v_K)
  int n_plant = 0;
  int n_ctrl = 0;
  std::optional<UncertaintyChannel> uncertainty;
};

struct A1Report {
  bool e1_positive = false;
  bool e2_positive = false;
  bool pencil_12_full_rank = false;  // [[A - jwI, B2], [C1, D12]] column rank
  bool pencil_21_full_rank = false;  // [[A - jwI, B1], [C2, D21]] row rank
  bool all() const { return e1_positive && e2_positive && pencil_12_full_rank && pencil_21_full_rank; }
};

struct A2Report {
  bool x_stabilizing = false;
  bool y_stabilizing = false;
  double rho_xy = 0.0;
  bool rho_ok = false;
  bool all() const { return x_stabilizing && y_stabilizing && rho_ok; }
};

enum class SynthesisStatus {
  kSuccess,
  kAssumptionA1Violated,
  kGTooSmall,            // a Riccati hit the imaginary axis or the g-level certificate failed
  kRiccatiFailure,
  kNegativeSolution,
  kNotStabilizing,
  kSpectralRadiusGEOne,
};

std::string to_string(SynthesisStatus s);

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::kSuccess;
  std::string diagnostic;
  double g = 0.0;
  A1Report a1;
  std::optional<CareSolution> X, Y;
  A2Report a2;
  std::optional<ControllerTriple> triple;
  std::optional<Mat> sbr_X;  // stabilizing solution certifying the closed loop
  std::optional<DissipationCertificate> certificate;  // strict witness
  bool ok() const { return status == SynthesisStatus::kSuccess; }
};

A1Report check_assumption_a1(const Plant& plant);

CareSolution solve_riccati_X(const Plant& plant, double g);
CareSolution solve_riccati_Y(const Plant& plant, double g);

A2Report check_assumption_a2(const Plant& plant, double g, const Mat& X, const Mat& Y);

ControllerTriple controller_triple(const Plant& plant, double g, const Mat& X, const Mat& Y);

ClosedLoop close_loop(const Plant& plant, const FullController& ctrl);

// Full pipeline: A1, the two Riccati equations, A2, controller formulas and
// the strict bounded real certificate of the (w -> z) closed loop.
SynthesisResult synthesize(const Plant& plant, double g);

struct ObjectiveBound {
  double epsilon = 0.0;
  double mu2 = 0.0;
};

// Achievable epsilon (from the strict LMI margin, capped at 1) and mu2
// (= lambda0) for the trajectory-level performance inequality.
ObjectiveBound verify_hinf_objective_bound(const SynthesisResult& result);

// Smallest attenuation (3 significant figures) at which synthesize succeeds.
double feasibility_sweep(const Plant& plant, double g_start = 1.0);

}  // namespace qsynth
