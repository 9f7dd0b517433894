#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pathcool/chem.hpp"
#include "pathcool/fock.hpp"
#include "pathcool/rng.hpp"
#include "pathcool/spectral.hpp"

using namespace pathcool;
using namespace pathcool::fock;

namespace {

// Fock-space oracle: ladder matrices on the full 2^n space, restricted to the
// particle-number sector, with the same bit/sign conventions as the library.
struct FockOracle {
  int n_so;
  std::vector<CMatrix> annihilate;  // per spin orbital

  explicit FockOracle(int n) : n_so(n) {
    const int dim = 1 << n;
    annihilate.resize(n, CMatrix::Zero(dim, dim));
    for (int p = 0; p < n; ++p)
      for (int ket = 0; ket < dim; ++ket)
        if ((ket >> p) & 1)
          annihilate[p](ket ^ (1 << p), ket) = jw_sign(static_cast<std::uint64_t>(ket), p);
  }

  CMatrix create(int p) const { return annihilate[p].adjoint(); }

  CMatrix hamiltonian(const chem::MOIntegrals& mo) const {
    const int dim = 1 << n_so;
    CMatrix H = mo.e_core * CMatrix::Identity(dim, dim);
    auto same_spin = [](int a, int b) { return ((a ^ b) & 1) == 0; };
    for (int p = 0; p < n_so; ++p)
      for (int q = 0; q < n_so; ++q) {
        if (!same_spin(p, q)) continue;
        const double h = mo.h(p >> 1, q >> 1);
        if (h != 0.0) H += h * create(p) * annihilate[q];
      }
    for (int p = 0; p < n_so; ++p)
      for (int q = 0; q < n_so; ++q)
        for (int r = 0; r < n_so; ++r)
          for (int s = 0; s < n_so; ++s) {
            if (!same_spin(p, q) || !same_spin(r, s)) continue;
            const double g = mo.g_at(p >> 1, q >> 1, r >> 1, s >> 1);
            if (g != 0.0) H += 0.5 * g * create(p) * create(r) * annihilate[s] * annihilate[q];
          }
    return H;
  }

  CMatrix restrict_to(const DeterminantSpace& space, const CMatrix& op) const {
    CMatrix out(space.dim(), space.dim());
    for (std::size_t i = 0; i < space.dim(); ++i)
      for (std::size_t j = 0; j < space.dim(); ++j)
        out(i, j) = op(static_cast<int>(space.dets[i]), static_cast<int>(space.dets[j]));
    return out;
  }
};

chem::MOIntegrals random_mo(int n_orb, Rng& rng) {
  chem::MOIntegrals mo;
  mo.n_orb = n_orb;
  mo.e_core = rng.normal();
  mo.h = Matrix::Zero(n_orb, n_orb);
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q <= p; ++q) mo.h(p, q) = mo.h(q, p) = rng.normal();
  mo.g.assign(static_cast<std::size_t>(n_orb) * n_orb * n_orb * n_orb, 0.0);
  for (int p = 0; p < n_orb; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= (r == p ? q : r); ++s) {
          const double v = rng.normal();
          for (auto [a, b, c, d] : {std::array<int, 4>{p, q, r, s}, {q, p, r, s}, {p, q, s, r},
                                    {q, p, s, r}, {r, s, p, q}, {s, r, p, q}, {r, s, q, p},
                                    {s, r, q, p}})
            mo.g_at(a, b, c, d) = v;
        }
  return mo;
}

chem::MOIntegrals h2_mo() {
  chem::Geometry g;
  g.atoms = {{"H", 1, {0, 0, 0}}, {"H", 1, {0, 0, 0.735 * kAngstromToBohr}}};
  auto ints = chem::compute_integrals(chem::build_sto3g_basis(g), g);
  return chem::transform_to_mo(ints, chem::run_rhf(ints, 2).C);
}

}  // namespace

TEST_CASE("determinant enumeration") {
  CHECK(enumerate_determinants(8, 4).dim() == 70);

  auto two = enumerate_determinants(2, 1);
  CHECK(two.dim() == 2);
  CHECK(two.dets == std::vector<std::uint64_t>{0b01, 0b10});

  auto four = enumerate_determinants(4, 2);
  CHECK(four.dim() == 6);
  CHECK(four.dets.front() == 0b0011);
  CHECK(std::is_sorted(four.dets.begin(), four.dets.end()));

  CHECK_THROWS_AS(enumerate_determinants(4, 5), InvalidInputError);
  CHECK(enumerate_determinants(4, 0).dim() == 1);

  for (std::size_t i = 0; i < four.dim(); ++i) CHECK(four.index_of(four.dets[i]) == i);
  CHECK_THROWS_AS(four.index_of(0b0111), InvalidInputError);
}

TEST_CASE("empty-sector hamiltonian is the core energy") {
  chem::MOIntegrals mo;
  mo.n_orb = 2;
  mo.e_core = -3.25;
  mo.h = Matrix::Zero(2, 2);
  mo.g.assign(16, 0.0);
  auto space = enumerate_determinants(4, 0);
  auto H = build_hamiltonian(mo, space);
  CHECK(H.dim() == 1);
  CHECK(H.m(0, 0).real() == doctest::Approx(-3.25));
}

TEST_CASE("two-orbital occupation-count model") {
  // only h_00 = 1: diagonal counts electrons in spatial orbital 0
  chem::MOIntegrals mo;
  mo.n_orb = 2;
  mo.e_core = 0.5;
  mo.h = Matrix::Zero(2, 2);
  mo.h(0, 0) = 1.0;
  mo.g.assign(16, 0.0);
  auto space = enumerate_determinants(4, 2);
  auto H = build_hamiltonian(mo, space);
  CHECK((H.m - H.m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto det = space.dets[i];
    const int occ0 = static_cast<int>((det & 1) + ((det >> 1) & 1));
    CHECK(H.m(i, i).real() == doctest::Approx(occ0 + 0.5));
  }
}

TEST_CASE("H2 fci ground energy matches the offline reference") {
  std::ifstream in(std::filesystem::path(PATHCOOL_FIXTURE_DIR) / "h2_sto3g.json");
  REQUIRE(in.good());
  const auto fx = nlohmann::json::parse(in)["h2_0.735angstrom"];

  auto mo = h2_mo();
  auto space = enumerate_determinants(4, 2);
  auto eig = spectral::eigendecompose(build_hamiltonian(mo, space));
  CHECK(eig.energies(0) == doctest::Approx(-1.1373).epsilon(2e-4));
  CHECK(eig.energies(0) == doctest::Approx(fx["e_fci"].get<double>()).epsilon(1e-9));
}

TEST_CASE("dimension mismatch is a shape error") {
  auto mo = h2_mo();
  CHECK_THROWS_AS(build_hamiltonian(mo, enumerate_determinants(6, 2)), DimensionError);
}

TEST_CASE("hand-written hubbard-like fcidump assembles the expected block") {
  // two orbitals, on-site repulsion U on orbital 0, hopping t between 0 and 1
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "pathcool_hubbard.fcidump";
  std::ofstream(tmp.string()) << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"
                              << "2.0 1 1 1 1\n"   // U
                              << "-0.7 1 2 0 0\n"  // t
                              << "0.25 0 0 0 0\n";
  auto data = chem::read_fcidump(tmp.string());
  fs::remove(tmp);
  auto space = enumerate_determinants(4, 2);
  auto H = build_hamiltonian(data.mo, space);

  // dets in order: 0011, 0101, 0110, 1001, 1010, 1100
  // (bit 0 = orb0 alpha, bit 1 = orb0 beta, bit 2 = orb1 alpha, bit 3 = orb1 beta)
  Vector diag_expect(6);
  diag_expect << 2.0 + 0.25, 0.25, 0.25, 0.25, 0.25, 0.25;
  for (int i = 0; i < 6; ++i) CHECK(H.m(i, i).real() == doctest::Approx(diag_expect(i)));

  // alpha hop 0011 <-> 0110 carries t; the spin-forbidden 0011 <-> 1010... is
  // actually the beta hop which also carries t; a same-det pair with both
  // spins moved carries nothing at one-body level
  CHECK(std::abs(H.m(space.index_of(0b0110), space.index_of(0b0011))) ==
        doctest::Approx(0.7));
  CHECK(std::abs(H.m(space.index_of(0b1100), space.index_of(0b0011))) <= 1e-14);
}

TEST_CASE("bilinear matrices on the one-particle space") {
  auto space = enumerate_determinants(2, 1);

  auto x = build_bilinear(0, 1, BilinearFlavor::X, space);
  CHECK(x.m(0, 1).real() == doctest::Approx(1.0));
  CHECK(x.m(1, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(x.m(0, 0)) + std::abs(x.m(1, 1)) <= 1e-14);

  auto y = build_bilinear(0, 1, BilinearFlavor::Y, space);
  // i(c_0^dag c_1 - c_1^dag c_0) exactly as written
  CHECK(y.m(0, 1) == Complex(0, 1));
  CHECK(y.m(1, 0) == Complex(0, -1));

  CHECK_THROWS_AS(build_bilinear(1, 1, BilinearFlavor::X, space), IndexOrderError);
  CHECK_THROWS_AS(build_bilinear(2, 1, BilinearFlavor::X, space), IndexOrderError);
}

TEST_CASE("bilinears are hermitian and act only between {i,j} flips") {
  auto space = enumerate_determinants(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (auto flavor : {BilinearFlavor::X, BilinearFlavor::Y}) {
        auto A = build_bilinear(i, j, flavor, space);
        CHECK((A.m - A.m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
        for (std::size_t a = 0; a < space.dim(); ++a)
          for (std::size_t b = 0; b < space.dim(); ++b) {
            if (std::abs(A.m(a, b)) < 1e-14) continue;
            const std::uint64_t diff = space.dets[a] ^ space.dets[b];
            CHECK(diff == ((std::uint64_t{1} << i) | (std::uint64_t{1} << j)));
          }
      }
}

TEST_CASE("slater-condon assembly matches the fock-space oracle") {
  Rng rng(42);
  for (auto [n_so, n_e] : {std::pair{4, 2}, {6, 2}, {6, 3}, {6, 4}}) {
    auto mo = random_mo(n_so / 2, rng);
    auto space = enumerate_determinants(n_so, n_e);
    auto H = build_hamiltonian(mo, space);

    FockOracle oracle(n_so);
    CMatrix H_ref = oracle.restrict_to(space, oracle.hamiltonian(mo));
    CHECK((H.m - H_ref).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("bilinears match the fock-space oracle") {
  auto space = enumerate_determinants(6, 3);
  FockOracle oracle(6);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      CMatrix e_ij = oracle.create(i) * oracle.annihilate[j];
      CMatrix x_ref = oracle.restrict_to(space, (e_ij + e_ij.adjoint()).eval());
      CMatrix y_ref =
          oracle.restrict_to(space, (Complex(0, 1) * (e_ij - e_ij.adjoint())).eval());
      CHECK((build_bilinear(i, j, BilinearFlavor::X, space).m - x_ref).cwiseAbs().maxCoeff() <=
            1e-12);
      CHECK((build_bilinear(i, j, BilinearFlavor::Y, space).m - y_ref).cwiseAbs().maxCoeff() <=
            1e-12);
    }
}

TEST_CASE("hamiltonian commutes with sz (block structure)") {
  Rng rng(3);
  auto mo = random_mo(3, rng);
  auto space = enumerate_determinants(6, 3);
  auto H = build_hamiltonian(mo, space);
  auto sz = sz_diagonal(space);
  for (std::size_t a = 0; a < space.dim(); ++a)
    for (std::size_t b = 0; b < space.dim(); ++b)
      if (std::abs(sz(a) - sz(b)) > 1e-12) CHECK(std::abs(H.m(a, b)) <= 1e-12);
}
