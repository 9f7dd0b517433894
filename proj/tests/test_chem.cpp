#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pathcool/chem.hpp"
#include "pathcool/fock.hpp"
#include "pathcool/rng.hpp"
#include "pathcool/spectral.hpp"

using namespace pathcool;
using namespace pathcool::chem;

namespace {

Geometry h_atoms(std::initializer_list<std::array<double, 3>> positions) {
  Geometry g;
  for (const auto& p : positions) g.atoms.push_back({"H", 1, p});
  return g;
}

Geometry h2(double r_bohr) { return h_atoms({{0, 0, 0}, {0, 0, r_bohr}}); }

nlohmann::json load_fixture() {
  std::ifstream in(std::filesystem::path(PATHCOOL_FIXTURE_DIR) / "h2_sto3g.json");
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("sto3g basis construction") {
  auto b2 = build_sto3g_basis(h2(1.4));
  CHECK(b2.size() == 2);
  CHECK(b2.shells[0].primitives.size() == 3);

  auto b4 = build_sto3g_basis(h_atoms({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}, {2, 2, 0}}));
  CHECK(b4.size() == 4);

  Geometry with_o = h2(1.4);
  with_o.atoms.push_back({"O", 8, {5, 0, 0}});
  CHECK_THROWS_WITH_AS(build_sto3g_basis(with_o), doctest::Contains("O"),
                       UnsupportedElementError);
}

TEST_CASE("single H atom overlap is unity") {
  auto geom = h_atoms({{0, 0, 0}});
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  CHECK(ints.S(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("H2 nuclear repulsion") {
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  CHECK(ints.e_nuc == doctest::Approx(1.0 / 1.4).epsilon(1e-12));
}

TEST_CASE("coincident atoms are rejected") {
  auto geom = h_atoms({{0, 0, 0}, {0, 0, 0}});
  CHECK_THROWS_AS(compute_integrals(build_sto3g_basis(geom), geom), SingularGeometryError);
}

TEST_CASE("H2/STO-3G integrals match the reference fixture") {
  auto fx = load_fixture()["h2_1.4bohr"];
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);

  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(ints.S(i, j) == doctest::Approx(fx["S"][i][j].get<double>()).epsilon(1e-8));
      CHECK(ints.Tkin(i, j) == doctest::Approx(fx["T"][i][j].get<double>()).epsilon(1e-8));
      CHECK(ints.Vnuc(i, j) == doctest::Approx(fx["V"][i][j].get<double>()).epsilon(1e-8));
    }
  const auto eri = fx["eri"].get<std::vector<double>>();
  for (std::size_t n = 0; n < eri.size(); ++n)
    CHECK(ints.eri[n] == doctest::Approx(eri[n]).epsilon(1e-8));
}

TEST_CASE("eri eightfold permutational symmetry") {
  auto geom = h_atoms({{0, 0, 0}, {1.2, 0.3, 0}, {0.1, 1.9, 0.4}});
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  const int n = ints.n_ao;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = ints.eri_at(i, j, k, l);
          CHECK(std::abs(v - ints.eri_at(j, i, k, l)) <= 1e-12);
          CHECK(std::abs(v - ints.eri_at(i, j, l, k)) <= 1e-12);
          CHECK(std::abs(v - ints.eri_at(k, l, i, j)) <= 1e-12);
        }
}

TEST_CASE("translation invariance of integrals") {
  auto geom = h_atoms({{0, 0, 0}, {1.1, 0.7, -0.2}, {-0.4, 2.0, 1.0}});
  auto shifted = geom.translated({13.7, -2.1, 5.5});
  auto a = compute_integrals(build_sto3g_basis(geom), geom);
  auto b = compute_integrals(build_sto3g_basis(shifted), shifted);
  CHECK((a.S - b.S).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.Tkin - b.Tkin).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.Vnuc - b.Vnuc).cwiseAbs().maxCoeff() <= 1e-10);
  for (std::size_t n = 0; n < a.eri.size(); ++n) CHECK(std::abs(a.eri[n] - b.eri[n]) <= 1e-10);
}

TEST_CASE("rhf on H2 reproduces the reference energy") {
  auto fx = load_fixture()["h2_1.4bohr"];
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  auto scf = run_rhf(ints, 2);
  CHECK(scf.converged);
  CHECK(scf.e_hf == doctest::Approx(-1.1167).epsilon(1e-3));
  CHECK(scf.e_hf == doctest::Approx(fx["e_hf"].get<double>()).epsilon(1e-8));
  // orthonormality of the MO frame
  Matrix ortho = scf.C.transpose() * ints.S * scf.C;
  CHECK((ortho - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(scf.eps(0) < scf.eps(1));
}

TEST_CASE("rhf rotational invariance") {
  auto geom = h_atoms({{0, 0, 0}, {1.0, 0.8, 0}, {0, 1.9, 0.3}, {1.7, 1.4, 1.0}});
  // rigid rotation about z by 0.7 rad plus one about x by 0.3 rad
  const double cz = std::cos(0.7), sz = std::sin(0.7);
  const double cx = std::cos(0.3), sx = std::sin(0.3);
  Geometry rot = geom;
  for (auto& a : rot.atoms) {
    auto [x, y, z] = a.pos;
    double x1 = cz * x - sz * y, y1 = sz * x + cz * y, z1 = z;
    a.pos = {x1, cx * y1 - sx * z1, sx * y1 + cx * z1};
  }
  auto ea = run_rhf(compute_integrals(build_sto3g_basis(geom), geom), 4).e_hf;
  auto eb = run_rhf(compute_integrals(build_sto3g_basis(rot), rot), 4).e_hf;
  CHECK(ea == doctest::Approx(eb).epsilon(1e-8));
}

TEST_CASE("rhf converges on the square H4 with level shifting") {
  const double side = 1.2 * kAngstromToBohr;
  auto geom = h_atoms({{side / 2, side / 2, 0},
                       {side / 2, -side / 2, 0},
                       {-side / 2, side / 2, 0},
                       {-side / 2, -side / 2, 0}});
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  auto scf = run_rhf(ints, 4);
  CHECK(scf.converged);
  CHECK(scf.e_hf < 0.0);
}

TEST_CASE("rhf edge cases") {
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  CHECK_THROWS_AS(run_rhf(ints, 1), UnsupportedSpinError);
  auto empty = run_rhf(ints, 0);
  CHECK(empty.e_hf == doctest::Approx(ints.e_nuc).epsilon(1e-14));
  CHECK(empty.n_occ == 0);
}

TEST_CASE("mo transform") {
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);

  SUBCASE("identity basis passthrough") {
    IntegralSet model = ints;
    model.S = Matrix::Identity(2, 2);
    auto mo = transform_to_mo(model, Matrix::Identity(2, 2));
    CHECK((mo.h - (model.Tkin + model.Vnuc)).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("lowdin orbitals give symmetric h") {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ints.S);
    Matrix x = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
               es.eigenvectors().transpose();
    auto mo = transform_to_mo(ints, x);
    CHECK((mo.h - mo.h.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::isfinite(mo.h.trace()));
  }

  SUBCASE("non-orthonormal C is rejected") {
    Matrix bad = Matrix::Identity(2, 2) * 2.0;
    CHECK_THROWS_WITH_AS(transform_to_mo(ints, bad), doctest::Contains("deviation"), GaugeError);
  }

  SUBCASE("H2 MO integrals match the fixture") {
    auto fx = load_fixture()["h2_1.4bohr"];
    auto scf = run_rhf(ints, 2);
    auto mo = transform_to_mo(ints, scf.C);
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        CHECK(std::abs(mo.h(p, q)) ==
              doctest::Approx(std::abs(fx["h_mo"][p][q].get<double>())).epsilon(1e-8));
    const auto gm = fx["g_mo"].get<std::vector<double>>();
    std::size_t n = 0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s, ++n)
            CHECK(std::abs(mo.g_at(p, q, r, s)) == doctest::Approx(gm[n]).epsilon(1e-8));
  }
}

TEST_CASE("fcidump round trip") {
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  auto mo = transform_to_mo(ints, run_rhf(ints, 2).C);

  const auto tmp = std::filesystem::temp_directory_path() / "pathcool_h2.fcidump";
  write_fcidump(tmp.string(), mo, 2);
  auto back = read_fcidump(tmp.string());

  CHECK(back.n_electrons == 2);
  CHECK(back.mo.n_orb == 2);
  CHECK(back.mo.e_core == doctest::Approx(mo.e_core).epsilon(1e-15));
  CHECK((back.mo.h - mo.h).cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t n = 0; n < mo.g.size(); ++n)
    CHECK(std::abs(back.mo.g[n] - mo.g[n]) <= 1e-12);
  std::filesystem::remove(tmp);
}

TEST_CASE("fcidump core record and parse errors") {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "pathcool_parse.fcidump";

  SUBCASE("bare core record") {
    std::ofstream(tmp.string()) << "&FCI NORB=1,NELEC=0,MS2=0,\n&END\n0.5 0 0 0 0\n";
    auto data = read_fcidump(tmp.string());
    CHECK(data.mo.e_core == doctest::Approx(0.5));
  }
  SUBCASE("missing header") {
    std::ofstream(tmp.string()) << "NORB=2\n&END\n";
    CHECK_THROWS_AS(read_fcidump(tmp.string()), ParseError);
  }
  SUBCASE("index out of range") {
    std::ofstream(tmp.string()) << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0 3 1 0 0\n";
    CHECK_THROWS_WITH_AS(read_fcidump(tmp.string()), doctest::Contains("line 3"), ParseError);
  }
  SUBCASE("non-numeric value") {
    std::ofstream(tmp.string()) << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\nxyz 1 1 0 0\n";
    CHECK_THROWS_WITH_AS(read_fcidump(tmp.string()), doctest::Contains("non-numeric"), ParseError);
  }
  fs::remove(tmp);
}

TEST_CASE("xyz reader converts angstrom to bohr") {
  namespace fs = std::filesystem;
  const auto tmp = fs::temp_directory_path() / "pathcool_geom.xyz";
  std::ofstream(tmp.string()) << "2\nhydrogen pair\nH 0 0 0\nH 0 0 0.735\n";
  auto geom = read_xyz(tmp.string());
  CHECK(geom.atoms.size() == 2);
  CHECK(geom.atoms[1].pos[2] == doctest::Approx(0.735 * kAngstromToBohr).epsilon(1e-14));
  fs::remove(tmp);
}

TEST_CASE("variational bound: rhf energy above fci ground energy") {
  auto geom = h2(1.4);
  auto ints = compute_integrals(build_sto3g_basis(geom), geom);
  auto scf = run_rhf(ints, 2);
  auto mo = transform_to_mo(ints, scf.C);
  auto space = fock::enumerate_determinants(4, 2);
  auto H = fock::build_hamiltonian(mo, space);
  auto eig = spectral::eigendecompose(H);
  CHECK(scf.e_hf >= eig.energies(0) - 1e-12);
}
