#pragma once

#include <array>
#include <string>
#include <vector>

#include "pathcool/types.hpp"

namespace pathcool::chem {

struct Atom {
  std::string element;
  int charge = 1;                  // nuclear charge
  std::array<double, 3> pos{};     // bohr
};

struct Geometry {
  std::vector<Atom> atoms;

  std::size_t size() const { return atoms.size(); }
  void validate() const;
  Geometry translated(const std::array<double, 3>& shift) const;
};

/// Contracted s-type Gaussian shell: (exponent, coefficient) pairs on one center.
struct Shell {
  int center = 0;                  // atom index in the parent geometry
  std::array<double, 3> pos{};     // resolved center, bohr
  std::vector<std::pair<double, double>> primitives;  // exponent (1/bohr^2), coefficient
};

struct AOBasis {
  std::vector<Shell> shells;
  std::size_t size() const { return shells.size(); }
};

struct IntegralSet {
  Matrix S;       // overlap
  Matrix Tkin;    // kinetic (hartree)
  Matrix Vnuc;    // nuclear attraction (hartree)
  std::vector<double> eri;  // (mu nu | la si), chemist convention, dense n^4
  double e_nuc = 0.0;
  int n_ao = 0;

  double& eri_at(int i, int j, int k, int l) {
    return eri[((static_cast<std::size_t>(i) * n_ao + j) * n_ao + k) * n_ao + l];
  }
  double eri_at(int i, int j, int k, int l) const {
    return eri[((static_cast<std::size_t>(i) * n_ao + j) * n_ao + k) * n_ao + l];
  }
};

struct ScfOptions {
  int max_iter = 200;
  double density_tol = 1e-9;
  double energy_tol = 1e-10;
  int diis_size = 8;
  double level_shift = 0.2;        // hartree, applied when gap < shift_gap_threshold
  double shift_gap_threshold = 0.05;
};

struct ScfResult {
  Matrix C;        // MO coefficients, n_AO x n_MO
  Vector eps;      // orbital energies, ascending
  double e_hf = 0.0;
  bool converged = false;
  int n_occ = 0;   // occupied spatial orbitals
  int iterations = 0;
};

struct MOIntegrals {
  Matrix h;                 // one-body h_pq
  std::vector<double> g;    // (pq|rs) chemist convention
  double e_core = 0.0;
  int n_orb = 0;

  double& g_at(int p, int q, int r, int s) {
    return g[((static_cast<std::size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s];
  }
  double g_at(int p, int q, int r, int s) const {
    return g[((static_cast<std::size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s];
  }
};

/// One s-shell per hydrogen with the bundled STO-3G primitives, renormalized
/// to unit AO self-overlap.  Throws UnsupportedElementError for anything else.
AOBasis build_sto3g_basis(const Geometry& geometry);

/// Analytic s-orbital integrals (overlap, kinetic, nuclear attraction, ERIs)
/// plus the nuclear repulsion scalar.
IntegralSet compute_integrals(const AOBasis& basis, const Geometry& geometry);

/// Cross-geometry AO overlap: rows index `bra` AOs, columns `ket` AOs.
Matrix cross_overlap(const AOBasis& bra, const AOBasis& ket);

/// Roothaan SCF with DIIS and conditional level shifting.
ScfResult run_rhf(const IntegralSet& ints, int n_electrons, const ScfOptions& opt = {});

/// AO -> MO transform; e_core picks up the nuclear repulsion.
MOIntegrals transform_to_mo(const IntegralSet& ints, const Matrix& C);

/// Boys function F0 (erf closed form with a small-argument series branch).
double boys_f0(double x);

struct FcidumpData {
  MOIntegrals mo;
  int n_electrons = 0;
  int ms2 = 0;
};

FcidumpData read_fcidump(const std::string& path);
void write_fcidump(const std::string& path, const MOIntegrals& mo, int n_electrons, int ms2 = 0);

/// XYZ file: element, x y z in angstrom; converted to bohr.
Geometry read_xyz(const std::string& path);

}  // namespace pathcool::chem
