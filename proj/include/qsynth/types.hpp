#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qsynth {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Default tolerances. Structural checks (symmetry, Hermiticity, pattern
// matching) use kStructuralTol; equation residuals are compared against
// kResidualTol scaled by the problem size; rank decisions use kRankTol.
inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kResidualTol = 1e-8;
inline constexpr double kRankTol = 1e-10;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input shapes or values that violate a documented precondition.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// A numerical kernel could not produce a trustworthy answer.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(what) {}
};

}  // namespace qsynth
