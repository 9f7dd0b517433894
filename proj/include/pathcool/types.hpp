#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace pathcool {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kAngstromToBohr = 1.8897261254578281;

// Error taxonomy.  Everything derives from Error so callers can catch broadly;
// the concrete types exist where callers (and tests) distinguish failure modes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInputError : Error {
  using Error::Error;
};
struct UnsupportedElementError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct SingularGeometryError : Error {
  using Error::Error;
};
struct UnsupportedSpinError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct GaugeError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct DimensionError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct IndexOrderError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct ContractError : Error {
  using Error::Error;
};
struct GapClosureError : Error {
  using Error::Error;
};
struct AliasGuardError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};
struct IntegratorError : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};

/// Dense operator on the determinant (or energy) basis.
struct OperatorMatrix {
  CMatrix m;
  bool hermitian = false;

  Eigen::Index dim() const { return m.rows(); }

  /// Max deviation from Hermiticity.
  double hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

  void assert_hermitian(double tol = 1e-12) const {
    if (!hermitian) throw ContractError("OperatorMatrix: hermitian flag not set");
    double d = hermiticity_defect();
    if (d > tol)
      throw ContractError("OperatorMatrix: hermiticity defect " + std::to_string(d));
  }
};

/// Spectral norm.  Hermitian input reduces to the largest |eigenvalue|.
double spectral_norm(const CMatrix& m);

}  // namespace pathcool
