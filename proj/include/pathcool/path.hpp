#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pathcool/chem.hpp"
#include "pathcool/fock.hpp"
#include "pathcool/spectral.hpp"
#include "pathcool/types.hpp"

namespace pathcool::path {

/// Rectangular H4 family: atoms at (+-X/2, +-Y/2, 0) with X = a/sqrt(lambda),
/// Y = a*sqrt(lambda) and aspect ratio lambda(s) = lambda_min^(1-s) * lambda_max^s.
struct H4Rectangle {
  double a_angstrom = 1.2;
  double lambda_min = 0.6;
  double lambda_max = 1.6;
};

struct FcidumpSequence {
  std::vector<std::string> files;
};

struct ReactionPathSpec {
  std::variant<H4Rectangle, FcidumpSequence> kind = H4Rectangle{};
  double s_start = 0.0;
  double s_end = 1.0;
  int n_electrons = 4;
  chem::ScfOptions scf;

  void validate() const;
  bool is_h4() const { return std::holds_alternative<H4Rectangle>(kind); }
};

chem::Geometry h4_geometry(double s, double a_angstrom, double lambda_min, double lambda_max);

/// Reaction coordinate of the exact square (lambda = 1).
double h4_square_coordinate(const H4Rectangle& rect);

/// One fully built geometry sample: electronic structure, Hamiltonian, and a
/// lazily filled eigensystem.
struct PathPoint {
  double s = 0.0;
  chem::Geometry geometry;
  chem::AOBasis basis;
  chem::IntegralSet ints;
  chem::ScfResult scf;
  chem::MOIntegrals mo;
  OperatorMatrix H;

  const spectral::EigenSystem& eig() const;
  int n_electrons = 0;

 private:
  mutable std::optional<spectral::EigenSystem> eig_;
  friend void invalidate_eig(PathPoint& p);
};

PathPoint build_point(const ReactionPathSpec& spec, double s);

struct PrincipalAngles {
  Vector sigma;        // cos(theta_i), clamped to [0, 1]
  double overlap_sq;   // prod cos^2(theta_i)
};

PrincipalAngles overlap_from_principal_angles(const Matrix& m_occ);

struct PairAlignment {
  int k = 0;                        // pair (k, k+1)
  Vector sigma;                     // occupied-block singular values
  double overlap_sq = 0.0;          // prod cos^2 theta (gauge invariant)
  double fci_overlap_unaligned = 0.0;  // |<E0_k|E0_{k+1}>|^2 in the shared det basis
  double fci_overlap_aligned = 0.0;
};

struct AlignmentReport {
  std::vector<PairAlignment> pairs;
};

/// Backward Procrustes sweep: rotates occupied and virtual blocks of every
/// point towards its successor, then rebuilds MO integrals and H in the
/// rotated gauge.  Points must carry converged SCF solutions.
AlignmentReport align_gauge(std::vector<PathPoint>& points);

struct DKProfile {
  std::vector<double> s;
  std::vector<double> g;        // ||dH/ds||_2 / Delta(s)
  std::vector<double> e0;       // ground energies along the profile
  std::vector<double> gap;
  double c_dk = 0.0;
  double l_h = 0.0;             // whole-matrix Lipschitz estimate
  double ds_fd = 0.0;
};

/// Davis-Kahan density at one coordinate via a gauge-aligned central
/// difference with a Richardson step-halving check.
double dk_density(const ReactionPathSpec& spec, double s, double ds = 1e-3);

/// Density from already-aligned neighbors.
double dk_density_from(const CMatrix& h_minus, const CMatrix& h_plus, double gap, double ds);

/// Dense aligned sweep of [s_start, s_end]; fills g, C_DK and L_H.
/// When `keep_points` is non-null the aligned points are handed back for reuse.
DKProfile build_profile(const ReactionPathSpec& spec, int n_samples,
                        std::vector<PathPoint>* keep_points = nullptr);

double compute_cdk(const std::vector<double>& s, const std::vector<double>& g);

int choose_nh(double c_dk, double eps_e, double safety_c = 1.0);

struct PathMesh {
  std::vector<PathPoint> points;
  DKProfile dk;
  AlignmentReport alignment;
};

/// Mesh with intervals of (approximately) equal DK mass, points drawn from the
/// profile sample grid.
PathMesh equal_mass_mesh(const ReactionPathSpec& spec, const DKProfile& profile, int n_points);

/// Mesh uniform in s.
PathMesh uniform_mesh(const ReactionPathSpec& spec, int n_points);

}  // namespace pathcool::path
