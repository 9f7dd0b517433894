#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "pathcool/chem.hpp"
#include "pathcool/types.hpp"

namespace pathcool::fock {

/// All determinants of n_electrons in n_spin_orbitals as occupation bitmasks,
/// strictly increasing.  Spin orbitals are orbital-major, alpha before beta:
/// spin orbital 2p encodes (orbital p, alpha), 2p+1 encodes (orbital p, beta).
/// Bit i of a mask is the occupation of spin orbital i.
struct DeterminantSpace {
  int n_spin_orbitals = 0;
  int n_electrons = 0;
  std::vector<std::uint64_t> dets;

  std::size_t dim() const { return dets.size(); }

  /// Index of a determinant bitmask, O(log D).  Throws if absent.
  std::size_t index_of(std::uint64_t det) const;
};

DeterminantSpace enumerate_determinants(int n_spin_orbitals, int n_electrons);

/// Slater-Condon assembly of the second-quantized Hamiltonian in the
/// determinant basis; the diagonal carries mo.e_core.
OperatorMatrix build_hamiltonian(const chem::MOIntegrals& mo, const DeterminantSpace& space);

enum class BilinearFlavor { X, Y };

/// Number-conserving one-body jump operators on spin orbitals i < j:
///   X: c_i^dag c_j + c_j^dag c_i
///   Y: i (c_i^dag c_j - c_j^dag c_i)
OperatorMatrix build_bilinear(int i, int j, BilinearFlavor flavor, const DeterminantSpace& space);

/// Diagonal of the total-number operator (trivially n_electrons) and total Sz
/// in units of 1/2; used by symmetry checks.
Vector sz_diagonal(const DeterminantSpace& space);

/// Jordan-Wigner sign of applying c_i (or c_i^dag) to `det`: parity of the
/// occupied orbitals below index i.
inline int jw_sign(std::uint64_t det, int i) {
  std::uint64_t below = det & ((std::uint64_t{1} << i) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

}  // namespace pathcool::fock
