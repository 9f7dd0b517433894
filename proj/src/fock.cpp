#include "pathcool/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace pathcool::fock {

namespace {

// next bitmask with the same popcount (Gosper)
std::uint64_t next_combination(std::uint64_t v) {
  std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

struct SpinInts {
  const chem::MOIntegrals& mo;

  double h(int i, int j) const {
    if ((i ^ j) & 1) return 0.0;
    return mo.h(i >> 1, j >> 1);
  }
  // chemist (ij|kl) on spin orbitals
  double g(int i, int j, int k, int l) const {
    if (((i ^ j) & 1) || ((k ^ l) & 1)) return 0.0;
    return mo.g_at(i >> 1, j >> 1, k >> 1, l >> 1);
  }
};

}  // namespace

std::size_t DeterminantSpace::index_of(std::uint64_t det) const {
  auto it = std::lower_bound(dets.begin(), dets.end(), det);
  if (it == dets.end() || *it != det) throw InvalidInputError("determinant not in space");
  return static_cast<std::size_t>(it - dets.begin());
}

DeterminantSpace enumerate_determinants(int n_spin_orbitals, int n_electrons) {
  if (n_spin_orbitals < 0 || n_spin_orbitals > 62)
    throw InvalidInputError("enumerate_determinants: n_spin_orbitals must be in [0,62]");
  if (n_electrons < 0 || n_electrons > n_spin_orbitals)
    throw InvalidInputError("enumerate_determinants: need 0 <= n_electrons <= n_spin_orbitals");

  DeterminantSpace space;
  space.n_spin_orbitals = n_spin_orbitals;
  space.n_electrons = n_electrons;
  const std::uint64_t count = binomial(n_spin_orbitals, n_electrons);
  space.dets.reserve(count);
  if (n_electrons == 0) {
    space.dets.push_back(0);
    return space;
  }
  std::uint64_t v = (std::uint64_t{1} << n_electrons) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n_spin_orbitals;
  while (v < limit) {
    space.dets.push_back(v);
    if (space.dets.size() == count) break;
    v = next_combination(v);
  }
  return space;
}

OperatorMatrix build_hamiltonian(const chem::MOIntegrals& mo, const DeterminantSpace& space) {
  if (space.n_spin_orbitals != 2 * mo.n_orb)
    throw DimensionError("build_hamiltonian: space has " +
                         std::to_string(space.n_spin_orbitals) + " spin orbitals, integrals give " +
                         std::to_string(2 * mo.n_orb));
  const SpinInts ints{mo};
  const auto D = static_cast<Eigen::Index>(space.dim());
  OperatorMatrix H;
  H.hermitian = true;
  H.m = CMatrix::Zero(D, D);

  std::vector<int> occ;
  occ.reserve(space.n_electrons);

  for (Eigen::Index col = 0; col < D; ++col) {
    const std::uint64_t ket = space.dets[col];
    occ.clear();
    for (int b = 0; b < space.n_spin_orbitals; ++b)
      if ((ket >> b) & 1) occ.push_back(b);

    // diagonal
    double diag = mo.e_core;
    for (int i : occ) diag += ints.h(i, i);
    for (int i : occ)
      for (int j : occ) diag += 0.5 * (ints.g(i, i, j, j) - ints.g(i, j, j, i));
    H.m(col, col) = diag;

    // single excitations m -> p (row determinant differs in exactly {m,p})
    for (int m : occ)
      for (int p = 0; p < space.n_spin_orbitals; ++p) {
        if ((ket >> p) & 1) continue;
        const std::uint64_t bra = (ket ^ (std::uint64_t{1} << m)) | (std::uint64_t{1} << p);
        const std::uint64_t without_m = ket ^ (std::uint64_t{1} << m);
        const int sign = jw_sign(ket, m) * jw_sign(without_m, p);
        double val = ints.h(p, m);
        for (int t : occ) {
          if (t == m) continue;
          val += ints.g(p, m, t, t) - ints.g(p, t, t, m);
        }
        if (val != 0.0) H.m(space.index_of(bra), col) += sign * val;
      }

    // double excitations {m,n} -> {p,q}, m<n, p<q
    for (std::size_t a = 0; a < occ.size(); ++a)
      for (std::size_t b = a + 1; b < occ.size(); ++b) {
        const int m = occ[a], n = occ[b];
        for (int p = 0; p < space.n_spin_orbitals; ++p) {
          if ((ket >> p) & 1) continue;
          for (int q = p + 1; q < space.n_spin_orbitals; ++q) {
            if ((ket >> q) & 1) continue;
            // amplitude of a+_p a+_q a_n a_m applied left to right
            std::uint64_t s = ket;
            int sign = jw_sign(s, m);
            s ^= std::uint64_t{1} << m;
            sign *= jw_sign(s, n);
            s ^= std::uint64_t{1} << n;
            sign *= jw_sign(s, q);
            s |= std::uint64_t{1} << q;
            sign *= jw_sign(s, p);
            s |= std::uint64_t{1} << p;
            const double val = ints.g(p, m, q, n) - ints.g(p, n, q, m);
            if (val != 0.0) H.m(space.index_of(s), col) += sign * val;
          }
        }
      }
  }
  return H;
}

OperatorMatrix build_bilinear(int i, int j, BilinearFlavor flavor, const DeterminantSpace& space) {
  if (i >= j)
    throw IndexOrderError("build_bilinear: need i < j, got (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  if (j >= space.n_spin_orbitals)
    throw DimensionError("build_bilinear: index " + std::to_string(j) + " out of range");

  const auto D = static_cast<Eigen::Index>(space.dim());
  CMatrix hop = CMatrix::Zero(D, D);  // c_i^dag c_j
  for (Eigen::Index col = 0; col < D; ++col) {
    const std::uint64_t ket = space.dets[col];
    if (!((ket >> j) & 1) || ((ket >> i) & 1)) continue;
    std::uint64_t s = ket;
    int sign = jw_sign(s, j);
    s ^= std::uint64_t{1} << j;
    sign *= jw_sign(s, i);
    s |= std::uint64_t{1} << i;
    hop(space.index_of(s), col) = sign;
  }

  OperatorMatrix A;
  A.hermitian = true;
  if (flavor == BilinearFlavor::X)
    A.m = hop + hop.adjoint();
  else
    A.m = Complex(0, 1) * (hop - hop.adjoint());
  return A;
}

Vector sz_diagonal(const DeterminantSpace& space) {
  Vector sz(space.dim());
  for (std::size_t idx = 0; idx < space.dim(); ++idx) {
    int v = 0;
    const std::uint64_t det = space.dets[idx];
    for (int b = 0; b < space.n_spin_orbitals; ++b)
      if ((det >> b) & 1) v += (b % 2 == 0) ? 1 : -1;
    sz(idx) = 0.5 * v;
  }
  return sz;
}

}  // namespace pathcool::fock
