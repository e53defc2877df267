#include "qsynth/momentsim.hpp"

#include <algorithm>
#include <cmath>

#include "qsynth/matops.hpp"

namespace qsynth {

Vec InputSignal::value(double t) const {
  if (values.empty()) return Vec();
  int idx = 0;
  for (size_t k = 0; k < switch_times.size(); ++k) {
    if (t >= switch_times[k] - 1e-12) idx = static_cast<int>(k);
  }
  return values[idx];
}

InputSignal InputSignal::zero(int dim, double horizon) {
  return constant(Vec::Zero(dim), horizon);
}

InputSignal InputSignal::constant(const Vec& v, double horizon) {
  InputSignal s;
  s.switch_times = {0.0};
  s.values = {v};
  s.horizon = horizon;
  return s;
}

InputSignal InputSignal::steps(std::vector<double> times, std::vector<Vec> vals, double horizon) {
  if (times.empty() || times.size() != vals.size() || times.front() != 0.0) {
    throw InvalidArgument("InputSignal::steps: need matching segments starting at t = 0");
  }
  for (size_t k = 1; k < times.size(); ++k) {
    if (times[k] <= times[k - 1]) throw InvalidArgument("InputSignal::steps: times must ascend");
  }
  InputSignal s;
  s.switch_times = std::move(times);
  s.values = std::move(vals);
  s.horizon = horizon;
  return s;
}

namespace {

struct Integrands {
  bool has_z = false, has_X = false, has_r = false;
  Mat CzTCz, Cz, Dz, X;
  SupplyRate supply;
};

struct Derivs {
  Vec dmu;
  Mat dSigma;
  double dzz = 0, dxx = 0, dbb = 0, dr = 0;
};

}  // namespace

Trajectory propagate_moments(const Mat& Atil, const Mat& Bbeta, const Mat& Gnoise,
                             const ItoMatrix& F, const GaussianState& state0,
                             const InputSignal& u, double dt, const OutputSpec& outputs) {
  const int n = static_cast<int>(Atil.rows());
  if (Atil.cols() != n) throw InvalidArgument("propagate_moments: A must be square");
  if (Bbeta.rows() != n || (Gnoise.size() > 0 && Gnoise.rows() != n)) {
    throw InvalidArgument("propagate_moments: input matrix row mismatch");
  }
  const int nw = static_cast<int>(Bbeta.cols());
  const int nv = static_cast<int>(Gnoise.cols());
  if (F.n_w != nw + nv) throw InvalidArgument("propagate_moments: Ito matrix dimension mismatch");
  if (state0.mean.size() != n || state0.cov.rows() != n) {
    throw InvalidArgument("propagate_moments: initial state dimension mismatch");
  }
  if (u.horizon <= 0 || u.values.empty() || u.values.front().size() != nw) {
    throw InvalidArgument("propagate_moments: bad input signal");
  }

  Trajectory traj;
  const double anorm = norm2(Atil);
  if (dt <= 0) dt = std::min(0.01, 0.1 / std::max(anorm, 1e-6));
  traj.step_warning = anorm * dt > 0.1;
  traj.signal = u;
  traj.supply_used = outputs.supply;

  Integrands ig;
  if (outputs.Cz.size() > 0) {
    ig.has_z = true;
    ig.Cz = outputs.Cz;
    ig.Dz = outputs.Dz.size() > 0 ? outputs.Dz : Mat::Zero(outputs.Cz.rows(), nw);
    ig.CzTCz = outputs.Cz.transpose() * outputs.Cz;
  }
  if (outputs.X.size() > 0) {
    ig.has_X = true;
    ig.X = outputs.X;
  }
  if (outputs.supply) {
    ig.has_r = true;
    ig.supply = *outputs.supply;
  }

  Mat BG(n, nw + nv);
  if (nw > 0) BG.leftCols(nw) = Bbeta;
  if (nv > 0) BG.rightCols(nv) = Gnoise;
  const Mat Dnoise = BG * F.S * BG.transpose();

  const auto derivs = [&](const Vec& mu, const Mat& Sigma, const Vec& beta) {
    Derivs d;
    d.dmu = Atil * mu + Bbeta * beta;
    d.dSigma = Atil * Sigma + Sigma * Atil.transpose() + Dnoise;
    d.dxx = Sigma.trace() + mu.squaredNorm();
    d.dbb = beta.squaredNorm();
    if (ig.has_z) {
      const Vec bz = ig.Cz * mu + ig.Dz * beta;
      d.dzz = (ig.CzTCz * Sigma).trace() + bz.squaredNorm();
    }
    if (ig.has_r) {
      d.dr = (ig.supply.R11 * Sigma).trace() + mu.dot(ig.supply.R11 * mu) +
             2.0 * mu.dot(ig.supply.R12 * beta) + beta.dot(ig.supply.R22 * beta);
    }
    return d;
  };

  Vec mu = state0.mean;
  Mat Sigma = state0.cov;
  double zz = 0, xx = 0, bb = 0, rr = 0;
  double t = 0;

  const auto record = [&]() {
    traj.times.push_back(t);
    traj.means.push_back(mu);
    traj.covs.push_back(Sigma);
    traj.int_zz.push_back(zz);
    traj.int_xx.push_back(xx);
    traj.int_bwbw.push_back(bb);
    traj.int_r.push_back(rr);
    traj.V.push_back(ig.has_X ? (ig.X * Sigma).trace() + mu.dot(ig.X * mu) : 0.0);
  };
  record();

  // Integrate segment by segment so beta_w is constant within every step.
  std::vector<double> boundaries = u.switch_times;
  boundaries.push_back(u.horizon);
  for (size_t seg = 0; seg + 1 < boundaries.size(); ++seg) {
    const double t0 = boundaries[seg];
    const double t1 = std::min(boundaries[seg + 1], u.horizon);
    if (t1 <= t0) continue;
    const Vec beta = u.values[seg];
    const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) {
      const Derivs k1 = derivs(mu, Sigma, beta);
      const Derivs k2 = derivs(mu + 0.5 * h * k1.dmu, Sigma + 0.5 * h * k1.dSigma, beta);
      const Derivs k3 = derivs(mu + 0.5 * h * k2.dmu, Sigma + 0.5 * h * k2.dSigma, beta);
      const Derivs k4 = derivs(mu + h * k3.dmu, Sigma + h * k3.dSigma, beta);
      mu += (h / 6.0) * (k1.dmu + 2 * k2.dmu + 2 * k3.dmu + k4.dmu);
      Sigma += (h / 6.0) * (k1.dSigma + 2 * k2.dSigma + 2 * k3.dSigma + k4.dSigma);
      Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();
      zz += (h / 6.0) * (k1.dzz + 2 * k2.dzz + 2 * k3.dzz + k4.dzz);
      xx += (h / 6.0) * (k1.dxx + 2 * k2.dxx + 2 * k3.dxx + k4.dxx);
      bb += (h / 6.0) * (k1.dbb + 2 * k2.dbb + 2 * k3.dbb + k4.dbb);
      rr += (h / 6.0) * (k1.dr + 2 * k2.dr + 2 * k3.dr + k4.dr);
      t = t0 + (k + 1) * h;
      record();
    }
  }
  return traj;
}

namespace {

bool same_supply(const SupplyRate& a, const SupplyRate& b) {
  return a.R11.rows() == b.R11.rows() && a.R22.rows() == b.R22.rows() &&
         (a.R11 - b.R11).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.R11.cwiseAbs().maxCoeff()) &&
         (a.R12 - b.R12).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.R12.cwiseAbs().maxCoeff()) &&
         (a.R22 - b.R22).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + a.R22.cwiseAbs().maxCoeff());
}

}  // namespace

double verify_dissipation_empirically(const Trajectory& traj, const Mat& X,
                                      const SupplyRate& supply, double lambda) {
  if (traj.times.empty()) throw InvalidArgument("verify_dissipation_empirically: empty trajectory");
  const size_t m = traj.times.size();

  std::vector<double> vval(m), rint(m);
  for (size_t k = 0; k < m; ++k) {
    vval[k] = (X * traj.covs[k]).trace() + traj.means[k].dot(X * traj.means[k]);
  }
  if (traj.supply_used && same_supply(*traj.supply_used, supply)) {
    rint = traj.int_r;
  } else {
    // trapezoidal fallback on the stored grid
    const auto rate = [&](size_t k) {
      const Vec beta = traj.signal.value(traj.times[k]);
      const Vec& mu = traj.means[k];
      return (supply.R11 * traj.covs[k]).trace() + mu.dot(supply.R11 * mu) +
             2.0 * mu.dot(supply.R12 * beta) + beta.dot(supply.R22 * beta);
    };
    rint[0] = 0.0;
    double prev = rate(0);
    for (size_t k = 1; k < m; ++k) {
      const double cur = rate(k);
      rint[k] = rint[k - 1] + 0.5 * (traj.times[k] - traj.times[k - 1]) * (prev + cur);
      prev = cur;
    }
  }

  double min_slack = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < m; ++k) {
    const double slack = vval[0] + lambda * traj.times[k] - vval[k] - rint[k];
    min_slack = std::min(min_slack, slack);
  }
  return min_slack;
}

bool verify_hinf_objective(const Trajectory& traj, double g, double eps, double mu1, double mu2) {
  if (traj.times.empty()) throw InvalidArgument("verify_hinf_objective: empty trajectory");
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const double lhs = traj.int_zz[k] + eps * traj.int_xx[k];
    const double rhs = (g * g - eps * eps) * traj.int_bwbw[k] + mu1 + mu2 * traj.times[k];
    if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) return false;
  }
  return true;
}

}  // namespace qsynth
