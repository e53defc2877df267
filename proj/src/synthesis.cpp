#include "qsynth/synthesis.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qsynth {

void Plant::validate() const {
  const int nn = n();
  if (A.cols() != nn) throw InvalidArgument("Plant: A must be square");
  if (B0.rows() != nn || B1.rows() != nn || B2.rows() != nn) {
    throw InvalidArgument("Plant: input matrix row mismatch");
  }
  if (C1.cols() != nn || C2.cols() != nn) throw InvalidArgument("Plant: output matrix column mismatch");
  if (D12.rows() != n_z() || D12.cols() != n_u()) throw InvalidArgument("Plant: D12 shape mismatch");
  if (D20.rows() != n_y() || D20.cols() != n_v()) throw InvalidArgument("Plant: D20 shape mismatch");
  if (D21.rows() != n_y() || D21.cols() != n_w()) throw InvalidArgument("Plant: D21 shape mismatch");
  if (Fv.n_w != n_v() || Fw.n_w != n_w()) throw InvalidArgument("Plant: Ito matrix dimension mismatch");
  if (thetaP.n != nn) throw InvalidArgument("Plant: commutation matrix dimension mismatch");
}

FullController FullController::shell(const ControllerTriple& triple, int n_plant_y) {
  FullController c;
  c.A_K = triple.A_K;
  c.B_K = triple.B_K;
  c.C_K = triple.C_K;
  if (c.B_K.cols() != n_plant_y) throw InvalidArgument("FullController: B_K column mismatch");
  c.B_K0 = Mat::Zero(c.C_K.rows(), 0);
  c.B_K1 = Mat::Zero(c.A_K.rows(), 0);
  c.theta_K = c.n_K() % 2 == 0 ? CommutationMatrix::canonical(c.n_K())
                               : CommutationMatrix::degenerate(c.n_K(), c.n_K());
  c.F_vK = ItoMatrix{0, Mat::Zero(0, 0), Mat::Zero(0, 0)};
  return c;
}

LinearQsde FullController::as_qsde(const ItoMatrix& F_y) const {
  if (F_y.n_w != n_y()) throw InvalidArgument("FullController::as_qsde: F_y dimension mismatch");
  LinearQsde sys;
  sys.A = A_K;
  sys.B.resize(n_K(), n_vK() + n_y());
  sys.B << B_K1, B_K;
  sys.C = C_K;
  sys.D = Mat::Zero(n_u(), n_vK() + n_y());
  sys.D.leftCols(B_K0.cols()) = B_K0;
  sys.theta = theta_K;
  sys.ito = ito_concat(F_vK, F_y);
  sys.output_channel_offset = 0;
  sys.validate();
  return sys;
}

A1Report check_assumption_a1(const Plant& plant) {
  plant.validate();
  A1Report rep;
  rep.e1_positive =
      classify_definiteness(plant.E1().cast<Complex>()) == Definiteness::kPositiveDefinite;
  rep.e2_positive =
      classify_definiteness(plant.E2().cast<Complex>()) == Definiteness::kPositiveDefinite;
  rep.pencil_12_full_rank =
      pencil_full_rank_on_axis(plant.A, plant.B2, plant.C1, plant.D12, PencilRank::kColumn);
  rep.pencil_21_full_rank =
      pencil_full_rank_on_axis(plant.A, plant.B1, plant.C2, plant.D21, PencilRank::kRow);
  return rep;
}

namespace {

CareProblem riccati_problem_X(const Plant& plant, double g) {
  const Mat E1inv = plant.E1().inverse();
  CareProblem p;
  p.A = plant.A - plant.B2 * E1inv * plant.D12.transpose() * plant.C1;
  p.Mq = plant.B1 * plant.B1.transpose() - g * g * plant.B2 * E1inv * plant.B2.transpose();
  const Mat W = Mat::Identity(plant.n_z(), plant.n_z()) - plant.D12 * E1inv * plant.D12.transpose();
  p.Q = plant.C1.transpose() * W * plant.C1 / (g * g);
  p.Mq = 0.5 * (p.Mq + p.Mq.transpose()).eval();
  p.Q = 0.5 * (p.Q + p.Q.transpose()).eval();
  return p;
}

CareProblem riccati_problem_Y(const Plant& plant, double g) {
  const Mat E2inv = plant.E2().inverse();
  const Mat Ay = plant.A - plant.B1 * plant.D21.transpose() * E2inv * plant.C2;
  CareProblem p;
  p.A = Ay.transpose();  // filter-type equation Ay Y + Y Ay^T + Y Mq Y + Q = 0
  p.Mq = plant.C1.transpose() * plant.C1 / (g * g) - plant.C2.transpose() * E2inv * plant.C2;
  const Mat W = Mat::Identity(plant.n_w(), plant.n_w()) -
                plant.D21.transpose() * E2inv * plant.D21;
  p.Q = plant.B1 * W * plant.B1.transpose();
  p.Mq = 0.5 * (p.Mq + p.Mq.transpose()).eval();
  p.Q = 0.5 * (p.Q + p.Q.transpose()).eval();
  return p;
}

bool psd_within(const Mat& X, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
}

}  // namespace

CareSolution solve_riccati_X(const Plant& plant, double g) {
  if (g <= 0) throw InvalidArgument("solve_riccati_X: g must be positive");
  return solve_care(riccati_problem_X(plant, g));
}

CareSolution solve_riccati_Y(const Plant& plant, double g) {
  if (g <= 0) throw InvalidArgument("solve_riccati_Y: g must be positive");
  return solve_care(riccati_problem_Y(plant, g));
}

A2Report check_assumption_a2(const Plant& plant, double g, const Mat& X, const Mat& Y) {
  const CareProblem px = riccati_problem_X(plant, g);
  const CareProblem py = riccati_problem_Y(plant, g);
  A2Report rep;
  rep.x_stabilizing = is_hurwitz(px.A + px.Mq * X, 1e-9);
  rep.y_stabilizing = is_hurwitz((py.A + py.Mq * Y).transpose(), 1e-9);
  rep.rho_xy = spectral_radius(X * Y);
  rep.rho_ok = rep.rho_xy < 1.0;
  return rep;
}

ControllerTriple controller_triple(const Plant& plant, double g, const Mat& X, const Mat& Y) {
  const int n = plant.n();
  const Mat E1inv = plant.E1().inverse();
  const Mat E2inv = plant.E2().inverse();
  const Mat IYX = Mat::Identity(n, n) - Y * X;
  Eigen::FullPivLU<Mat> lu(IYX);
  if (!lu.isInvertible()) throw NumericalError("controller_triple: I - YX is singular");
  ControllerTriple t;
  t.C_K = -E1inv * (g * g * plant.B2.transpose() * X + plant.D12.transpose() * plant.C1);
  t.B_K = lu.solve(Y * plant.C2.transpose() + plant.B1 * plant.D21.transpose()) * E2inv;
  t.A_K = plant.A + plant.B2 * t.C_K - t.B_K * plant.C2 +
          (plant.B1 - t.B_K * plant.D21) * plant.B1.transpose() * X;
  return t;
}

ClosedLoop close_loop(const Plant& plant, const FullController& ctrl) {
  plant.validate();
  if (ctrl.n_y() != plant.n_y() || ctrl.n_u() != plant.n_u()) {
    throw InvalidArgument("close_loop: controller dimensions do not match the plant");
  }
  const int n = plant.n();
  const int nk = ctrl.n_K();
  const int nvk = ctrl.n_vK();

  ClosedLoop cl;
  cl.n_plant = n;
  cl.n_ctrl = nk;
  cl.Atil.resize(n + nk, n + nk);
  cl.Atil << plant.A, plant.B2 * ctrl.C_K, ctrl.B_K * plant.C2, ctrl.A_K;
  cl.Btil.resize(n + nk, plant.n_w());
  cl.Btil << plant.B1, ctrl.B_K * plant.D21;
  cl.Gtil.resize(n + nk, plant.n_v() + nvk);
  cl.Gtil << plant.B0, plant.B2 * ctrl.B_K0, ctrl.B_K * plant.D20, ctrl.B_K1;
  cl.Ctil.resize(plant.n_z(), n + nk);
  cl.Ctil << plant.C1, plant.D12 * ctrl.C_K;
  cl.Htil.resize(plant.n_z(), plant.n_v() + nvk);
  cl.Htil << Mat::Zero(plant.n_z(), plant.n_v()), plant.D12 * ctrl.B_K0;
  cl.F_combined = ito_concat(plant.Fw, ito_concat(plant.Fv, ctrl.F_vK));
  cl.uncertainty = plant.uncertainty;
  return cl;
}

std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::kSuccess: return "success";
    case SynthesisStatus::kAssumptionA1Violated: return "assumption-a1-violated";
    case SynthesisStatus::kGTooSmall: return "g-too-small";
    case SynthesisStatus::kRiccatiFailure: return "riccati-failure";
    case SynthesisStatus::kNegativeSolution: return "negative-riccati-solution";
    case SynthesisStatus::kNotStabilizing: return "not-stabilizing";
    case SynthesisStatus::kSpectralRadiusGEOne: return "spectral-radius-ge-one";
  }
  return "unknown";
}

namespace {

// Strict dissipation witness: re-solve the bounded-real Riccati with the
// constant term shifted by eps I. Any solution gives a strictly negative LMI.
std::optional<DissipationCertificate> strict_witness(const Mat& A, const Mat& B, const Mat& C,
                                                     double g, const Mat& G, const ItoMatrix& F) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  const Mat R = g * g * Mat::Identity(m, m);
  const Mat Rinv = R.inverse();
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    CareProblem p;
    p.A = A;
    p.Mq = B * Rinv * B.transpose();
    p.Q = C.transpose() * C + eps * Mat::Identity(n, n);
    p.Mq = 0.5 * (p.Mq + p.Mq.transpose()).eval();
    try {
      const CareSolution sol = solve_care(p);
      if (!sol.stabilizing) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(sol.X, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <= 0) continue;
      DissipationCertificate cert;
      cert.X = sol.X;
      cert.strict = true;
      cert.lambda0 = compute_lambda0(sol.X, B, G, F);
      // margin achieved by the witness on the bounded-real LMI
      Mat lmi(n + m, n + m);
      lmi.topLeftCorner(n, n) = A.transpose() * sol.X + sol.X * A + C.transpose() * C;
      lmi.topRightCorner(n, m) = sol.X * B;
      lmi.bottomLeftCorner(m, n) = lmi.topRightCorner(n, m).transpose();
      lmi.bottomRightCorner(m, m) = -R;
      Eigen::SelfAdjointEigenSolver<Mat> esl(0.5 * (lmi + lmi.transpose()), Eigen::EigenvaluesOnly);
      cert.epsilon = -esl.eigenvalues().maxCoeff();
      if (cert.epsilon <= 0) continue;
      return cert;
    } catch (const CareFailure&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace

SynthesisResult synthesize(const Plant& plant, double g) {
  if (g <= 0) throw InvalidArgument("synthesize: g must be positive");
  SynthesisResult res;
  res.g = g;
  res.a1 = check_assumption_a1(plant);
  if (!res.a1.all()) {
    res.status = SynthesisStatus::kAssumptionA1Violated;
    res.diagnostic = "assumption A1 failed";
    return res;
  }
  try {
    res.X = solve_riccati_X(plant, g);
    res.Y = solve_riccati_Y(plant, g);
  } catch (const CareFailure& e) {
    res.status = e.kind == CareFailure::Kind::kImaginaryAxisEigenvalue
                     ? SynthesisStatus::kGTooSmall
                     : SynthesisStatus::kRiccatiFailure;
    res.diagnostic = e.what();
    return res;
  }
  const double xtol = kStructuralTol;
  if (!psd_within(res.X->X, xtol) || !psd_within(res.Y->X, xtol)) {
    res.status = SynthesisStatus::kNegativeSolution;
    res.diagnostic = "a Riccati solution has a negative eigenvalue";
    return res;
  }
  res.a2 = check_assumption_a2(plant, g, res.X->X, res.Y->X);
  if (!res.a2.x_stabilizing || !res.a2.y_stabilizing) {
    res.status = SynthesisStatus::kNotStabilizing;
    res.diagnostic = "a Riccati solution is not stabilizing";
    return res;
  }
  if (!res.a2.rho_ok) {
    res.status = SynthesisStatus::kSpectralRadiusGEOne;
    res.diagnostic = "spectral radius of XY is >= 1";
    return res;
  }
  res.triple = controller_triple(plant, g, res.X->X, res.Y->X);

  const ClosedLoop cl = close_loop(plant, FullController::shell(*res.triple, plant.n_y()));
  const SbrResult sbr = strict_bounded_real_check(cl.Atil, cl.Btil, cl.Ctil,
                                                  Mat::Zero(cl.Ctil.rows(), cl.Btil.cols()), g);
  if (!sbr.holds) {
    res.status = sbr.reason == SbrFailure::kUnstableA ? SynthesisStatus::kNotStabilizing
                                                      : SynthesisStatus::kGTooSmall;
    res.diagnostic = "closed loop is not strictly bounded real at the requested attenuation";
    return res;
  }
  res.sbr_X = sbr.X;
  res.certificate = strict_witness(cl.Atil, cl.Btil, cl.Ctil, g, cl.Gtil, cl.F_combined);
  if (!res.certificate) {
    // The norm certificate stands on its own; report the non-strict witness.
    DissipationCertificate cert;
    cert.X = *sbr.X;
    cert.strict = false;
    cert.epsilon = 0.0;
    cert.lambda0 = compute_lambda0(*sbr.X, cl.Btil, cl.Gtil, cl.F_combined);
    res.certificate = cert;
  }
  return res;
}

ObjectiveBound verify_hinf_objective_bound(const SynthesisResult& result) {
  if (!result.ok() || !result.certificate) {
    throw InvalidArgument("verify_hinf_objective_bound: synthesis did not succeed");
  }
  ObjectiveBound b;
  b.epsilon = std::min(result.certificate->epsilon, 1.0);
  b.mu2 = result.certificate->lambda0;
  return b;
}

double feasibility_sweep(const Plant& plant, double g_start) {
  double hi = g_start;
  int guard = 0;
  while (!synthesize(plant, hi).ok()) {
    hi *= 2.0;
    if (++guard > 40) throw NumericalError("feasibility_sweep: no feasible g found");
  }
  double lo = hi;
  guard = 0;
  while (synthesize(plant, lo / 2.0).ok()) {
    lo /= 2.0;
    if (++guard > 60) return 0.0;  // norm is numerically zero
  }
  lo /= 2.0;  // infeasible
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (synthesize(plant, mid).ok()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace qsynth
