#include "qsynth/qsde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsynth/matops.hpp"

namespace qsynth {

CommutationMatrix CommutationMatrix::canonical(int n) {
  if (n <= 0 || n % 2 != 0) throw InvalidArgument("CommutationMatrix::canonical: n must be positive even");
  CommutationMatrix cm;
  cm.n = n;
  cm.kind = Kind::kCanonical;
  cm.nprime = 0;
  cm.theta = block_diag_j(n / 2);
  return cm;
}

CommutationMatrix CommutationMatrix::degenerate(int n, int nprime) {
  if (nprime <= 0 || nprime > n) throw InvalidArgument("CommutationMatrix::degenerate: need 0 < n' <= n");
  if ((n - nprime) % 2 != 0) throw InvalidArgument("CommutationMatrix::degenerate: n - n' must be even");
  CommutationMatrix cm;
  cm.n = n;
  cm.kind = Kind::kDegenerate;
  cm.nprime = nprime;
  cm.theta = Mat::Zero(n, n);
  cm.theta.bottomRightCorner(n - nprime, n - nprime) = block_diag_j((n - nprime) / 2);
  return cm;
}

CommutationMatrix CommutationMatrix::from_matrix(const Mat& theta, double tol) {
  const int n = static_cast<int>(theta.rows());
  if (theta.cols() != n) throw InvalidArgument("CommutationMatrix: theta must be square");
  if ((theta + theta.transpose()).cwiseAbs().maxCoeff() > tol * (1.0 + theta.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("CommutationMatrix: theta must be antisymmetric");
  }
  // Each variable pairs with at most one partner via a +-1 entry.
  std::vector<int> partner(n, -1);
  int zeros = 0;
  bool adjacent_blocks = true;
  for (int i = 0; i < n; ++i) {
    int p = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(theta(i, j)) > tol) {
        if (p != -1) throw InvalidArgument("CommutationMatrix: row couples more than one variable");
        if (std::abs(std::abs(theta(i, j)) - 1.0) > tol) {
          throw InvalidArgument("CommutationMatrix: coupling entries must be +-1");
        }
        p = j;
      }
    }
    partner[i] = p;
    if (p == -1) {
      ++zeros;
    } else if (!(p == i + 1 && theta(i, p) > 0) && !(p == i - 1 && theta(i, p) < 0)) {
      adjacent_blocks = false;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (partner[i] != -1 && partner[partner[i]] != i) {
      throw InvalidArgument("CommutationMatrix: inconsistent pairing");
    }
  }
  CommutationMatrix cm;
  cm.n = n;
  cm.theta = theta;
  cm.nprime = zeros;
  if (adjacent_blocks) {
    cm.kind = zeros == 0 ? Kind::kCanonical : Kind::kDegenerate;
  } else if (zeros == 0) {
    cm.kind = Kind::kPermutedCanonical;
  } else {
    // zero rows plus non-adjacent pairs: still usable as a degenerate matrix
    cm.kind = Kind::kDegenerate;
  }
  return cm;
}

bool ItoMatrix::is_canonical(double tol) const {
  if (n_w % 2 != 0) return false;
  return (S - Mat::Identity(n_w, n_w)).cwiseAbs().maxCoeff() <= tol &&
         (Tim - block_diag_j(n_w / 2)).cwiseAbs().maxCoeff() <= tol;
}

ItoMatrix canonical_ito(int n_w) {
  if (n_w <= 0 || n_w % 2 != 0) throw InvalidArgument("canonical_ito: n_w must be positive even");
  ItoMatrix f;
  f.n_w = n_w;
  f.S = Mat::Identity(n_w, n_w);
  f.Tim = block_diag_j(n_w / 2);
  return f;
}

ItoMatrix classical_ito(int n_w) {
  if (n_w <= 0) throw InvalidArgument("classical_ito: n_w must be positive");
  ItoMatrix f;
  f.n_w = n_w;
  f.S = Mat::Identity(n_w, n_w);
  f.Tim = Mat::Zero(n_w, n_w);
  return f;
}

ItoMatrix ito_decompose(const CMat& F, double tol) {
  if (!is_hermitian(F, tol)) throw InvalidArgument("ito_decompose: F must be Hermitian");
  const CMat Fh = hermitian_part(F);
  ItoMatrix f;
  f.n_w = static_cast<int>(F.rows());
  f.S = Fh.real();
  f.Tim = Fh.imag();
  f.S = (0.5 * (f.S + f.S.transpose())).eval();
  f.Tim = (0.5 * (f.Tim - f.Tim.transpose())).eval();
  return f;
}

ItoMatrix ito_concat(const ItoMatrix& a, const ItoMatrix& b) {
  ItoMatrix f;
  f.n_w = a.n_w + b.n_w;
  f.S = Mat::Zero(f.n_w, f.n_w);
  f.Tim = Mat::Zero(f.n_w, f.n_w);
  f.S.topLeftCorner(a.n_w, a.n_w) = a.S;
  f.S.bottomRightCorner(b.n_w, b.n_w) = b.S;
  f.Tim.topLeftCorner(a.n_w, a.n_w) = a.Tim;
  f.Tim.bottomRightCorner(b.n_w, b.n_w) = b.Tim;
  return f;
}

void LinearQsde::validate() const {
  const int nn = n();
  if (A.rows() != nn || A.cols() != nn) throw InvalidArgument("LinearQsde: A must be square");
  if (B.rows() != nn) throw InvalidArgument("LinearQsde: B row count mismatch");
  if (C.cols() != nn) throw InvalidArgument("LinearQsde: C column count mismatch");
  if (D.rows() != C.rows() || D.cols() != B.cols()) throw InvalidArgument("LinearQsde: D shape mismatch");
  if (theta.n != nn) throw InvalidArgument("LinearQsde: theta dimension mismatch");
  if (ito.n_w != n_w()) throw InvalidArgument("LinearQsde: Ito matrix dimension mismatch");
  if (output_channel_offset < 0 || output_channel_offset + n_y() > n_w()) {
    throw InvalidArgument("LinearQsde: output channel window out of range");
  }
}

CommutationCheck preserves_commutation(const LinearQsde& sys, double tol) {
  sys.validate();
  const Mat res = sys.A * sys.theta.theta + sys.theta.theta * sys.A.transpose() +
                  sys.B * sys.ito.Tim * sys.B.transpose();
  CommutationCheck out;
  out.residual = norm2(res);
  out.holds = out.residual <= tol * (1.0 + norm2(sys.A) + norm2(sys.B) * norm2(sys.B));
  return out;
}

double commutation_ode_oracle(const LinearQsde& sys, double horizon, int steps) {
  sys.validate();
  if (horizon <= 0) throw InvalidArgument("commutation_ode_oracle: horizon must be positive");
  if (steps <= 0) steps = std::max(1000, static_cast<int>(horizon * 100));
  if (steps < 10) throw InvalidArgument("commutation_ode_oracle: steps must be >= 10");
  const Mat target = 2.0 * sys.theta.theta;
  const Mat forcing = 2.0 * sys.B * sys.ito.Tim * sys.B.transpose();
  const auto rhs = [&](const Mat& Cm) -> Mat {
    return sys.A * Cm + Cm * sys.A.transpose() + forcing;
  };
  Mat Cm = target;
  const double dt = horizon / steps;
  double max_dev = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Mat k1 = rhs(Cm);
    const Mat k2 = rhs(Cm + 0.5 * dt * k1);
    const Mat k3 = rhs(Cm + 0.5 * dt * k2);
    const Mat k4 = rhs(Cm + dt * k3);
    Cm += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    max_dev = std::max(max_dev, norm2((Cm - target).eval()));
  }
  return max_dev;
}

LinearQsde pad_to_convention(const LinearQsde& sys) {
  LinearQsde out = sys;
  int ny = out.n_y();
  if (ny % 2 != 0) {
    // one dummy output row
    out.C.conservativeResize(ny + 1, Eigen::NoChange);
    out.C.row(ny).setZero();
    out.D.conservativeResize(ny + 1, Eigen::NoChange);
    out.D.row(ny).setZero();
    ny += 1;
  }
  int nw = out.n_w();
  if (nw % 2 != 0) {
    // lone dummy quadrature to restore even width
    out.B.conservativeResize(Eigen::NoChange, nw + 1);
    out.B.col(nw).setZero();
    out.D.conservativeResize(Eigen::NoChange, nw + 1);
    out.D.col(nw).setZero();
    out.ito = ito_concat(out.ito, classical_ito(1));
    nw += 1;
  }
  while (nw < ny) {
    out.B.conservativeResize(Eigen::NoChange, nw + 2);
    out.B.col(nw).setZero();
    out.B.col(nw + 1).setZero();
    out.D.conservativeResize(Eigen::NoChange, nw + 2);
    out.D.col(nw).setZero();
    out.D.col(nw + 1).setZero();
    out.ito = ito_concat(out.ito, canonical_ito(2));
    nw += 2;
  }
  out.validate();
  return out;
}

}  // namespace qsynth
