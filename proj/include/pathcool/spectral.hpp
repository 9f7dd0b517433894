#pragma once

#include <limits>

#include "pathcool/types.hpp"

namespace pathcool::spectral {

struct EigenSystem {
  Vector energies;   // ascending
  CMatrix vectors;   // unitary, eigencolumns

  Eigen::Index dim() const { return energies.size(); }
};

struct GapInfo {
  double delta = 0.0;       // E_1 - E_0
  double delta_res = 0.0;   // resolved gap; +inf sentinel when the band is the full spectrum
  double eps_res = 0.0;
  int band_size = 1;        // states with E_j <= E_0 + eps_res
};

/// Dense Hermitian eigendecomposition with deterministic phase fixing: the
/// largest-magnitude component of each eigencolumn is made real positive.
EigenSystem eigendecompose(const OperatorMatrix& H);

GapInfo gaps(const EigenSystem& eig, double eps_res);

/// |<E0_a|E0_b>|^2, phase invariant.
double ground_overlap(const EigenSystem& a, const EigenSystem& b);

/// Spectral-norm distance of the eps_res low-energy band projectors.
double projector_distance(const EigenSystem& a, const EigenSystem& b, double eps_res);

struct IprResult {
  double ipr = 0.0;
  double n_eff = 0.0;
};

/// Inverse participation ratio of a normalized state in its reference basis.
IprResult compute_ipr(const CVector& state);

constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

}  // namespace pathcool::spectral
