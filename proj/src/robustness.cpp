#include "qsynth/robustness.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qsynth/dissipativity.hpp"

namespace qsynth {

UncertainPlant overbound_uncertainty(const Plant& plant, double mu, const Mat& S, double g) {
  plant.validate();
  if (mu <= 0) throw InvalidArgument("overbound_uncertainty: mu must be positive");
  if (g <= 0) throw InvalidArgument("overbound_uncertainty: g must be positive");
  const int n = plant.n();
  if (S.rows() != n || S.cols() != n) throw InvalidArgument("overbound_uncertainty: S must be n x n");
  Eigen::FullPivLU<Mat> lu(S);
  if (!lu.isInvertible()) throw InvalidArgument("overbound_uncertainty: S is singular");

  UncertainPlant up;
  up.nominal = plant;
  up.S = S;
  up.mu = mu;
  up.g = g;
  up.Btil1 = 0.5 * mu * S;
  up.Ctil1 = lu.inverse();

  Plant aug = plant;
  aug.B1.resize(n, plant.n_w() + n);
  aug.B1 << plant.B1, up.Btil1;
  aug.C1.resize(plant.n_z() + n, n);
  aug.C1 << plant.C1, g * up.Ctil1;
  aug.D12.resize(plant.n_z() + n, plant.n_u());
  aug.D12 << plant.D12, Mat::Zero(n, plant.n_u());
  aug.D21.resize(plant.n_y(), plant.n_w() + n);
  aug.D21 << plant.D21, Mat::Zero(plant.n_y(), n);
  aug.Fw = ito_concat(plant.Fw, n % 2 == 0 ? canonical_ito(n) : classical_ito(n));

  UncertaintyChannel ch;
  ch.w_offset = plant.n_w();
  ch.n_in = n;
  ch.z_offset = plant.n_z();
  ch.n_out = n;
  ch.g = g;
  ch.mu = mu;
  aug.uncertainty = ch;
  aug.validate();
  up.augmented = aug;
  return up;
}

namespace {

struct Channel {
  Mat B;  // (n+nk) x n_in
  Mat C;  // n_out x (n+nk), the g factor divided out
};

Channel uncertainty_channel(const ClosedLoop& cl, double g) {
  if (!cl.uncertainty) {
    throw InvalidArgument("robustness: closed loop has no uncertainty channel");
  }
  const UncertaintyChannel& ch = *cl.uncertainty;
  Channel out;
  out.B = cl.Btil.middleCols(ch.w_offset, ch.n_in);
  out.C = cl.Ctil.middleRows(ch.z_offset, ch.n_out) / g;
  return out;
}

}  // namespace

Mat perturbed_drift(const ClosedLoop& cl, const Mat& Delta, bool* within_bound) {
  const Channel ch = uncertainty_channel(cl, cl.uncertainty ? cl.uncertainty->g : 1.0);
  if (Delta.rows() != ch.B.cols() || Delta.cols() != ch.C.rows()) {
    throw InvalidArgument("perturbed_drift: Delta dimension mismatch");
  }
  if (within_bound != nullptr) {
    const double g = cl.uncertainty->g;
    Eigen::SelfAdjointEigenSolver<Mat> es(Delta.transpose() * Delta, Eigen::EigenvaluesOnly);
    *within_bound = es.eigenvalues().maxCoeff() <= (1.0 / (g * g)) * (1.0 + kStructuralTol);
  }
  return cl.Atil + ch.B * Delta * ch.C;
}

RobustnessReport robust_stability_check(const ClosedLoop& cl, double g, int grid) {
  const Channel ch = uncertainty_channel(cl, g);
  RobustnessReport rep;
  const Mat D0 = Mat::Zero(ch.C.rows(), ch.B.cols());
  rep.certified = strict_bounded_real_check(cl.Atil, ch.B, ch.C, D0, 1.0).holds;
  rep.channel_norm = is_hurwitz(cl.Atil) ? hinf_norm(cl.Atil, ch.B, ch.C, D0, 1e-8)
                                         : std::numeric_limits<double>::infinity();

  const int nd = static_cast<int>(ch.B.cols());
  std::vector<Mat> deltas;
  if (grid > 1) {
    for (int k = 0; k < grid; ++k) {
      const double delta = -cl.uncertainty->mu + 2.0 * cl.uncertainty->mu * k / (grid - 1);
      const Mat D = -(delta / cl.uncertainty->mu) * Mat::Identity(nd, ch.C.rows());
      deltas.push_back(D);
      const Mat Abar = cl.Atil + ch.B * D * ch.C;
      double rightmost = -std::numeric_limits<double>::infinity();
      for (const Complex& ev : eigenvalues(Abar)) rightmost = std::max(rightmost, ev.real());
      rep.structured_margins.emplace_back(delta, rightmost);
    }
  }
  std::mt19937 rng(20250809);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Mat D(nd, ch.C.rows());
    for (int i = 0; i < D.rows(); ++i) {
      for (int j = 0; j < D.cols(); ++j) D(i, j) = gauss(rng);
    }
    const double s = norm2(D);
    if (s > 0) D /= s;  // contraction, on the boundary of the admissible set
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    D *= unif(rng);
    deltas.push_back(D);
  }

  rep.worst_margin = -std::numeric_limits<double>::infinity();
  for (const Mat& D : deltas) {
    const Mat Abar = cl.Atil + ch.B * D * ch.C;
    double rightmost = -std::numeric_limits<double>::infinity();
    for (const Complex& ev : eigenvalues(Abar)) rightmost = std::max(rightmost, ev.real());
    rep.worst_margin = std::max(rep.worst_margin, rightmost);
  }
  rep.samples = static_cast<int>(deltas.size());
  return rep;
}

}  // namespace qsynth
