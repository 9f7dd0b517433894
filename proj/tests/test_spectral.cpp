#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pathcool/rng.hpp"
#include "pathcool/spectral.hpp"

using namespace pathcool;
using namespace pathcool::spectral;

namespace {

OperatorMatrix hermitian_from(std::initializer_list<std::initializer_list<Complex>> rows) {
  OperatorMatrix op;
  const auto n = static_cast<Eigen::Index>(rows.size());
  op.m.resize(n, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) op.m(i, j++) = v;
    ++i;
  }
  op.hermitian = true;
  return op;
}

OperatorMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  OperatorMatrix op;
  op.m = (m + m.adjoint()) / 2.0;
  op.hermitian = true;
  return op;
}

}  // namespace

TEST_CASE("eigendecompose sorts energies") {
  auto eig = eigendecompose(hermitian_from({{3, 0, 0}, {0, 1, 0}, {0, 0, 2}}));
  CHECK(eig.energies(0) == doctest::Approx(1));
  CHECK(eig.energies(1) == doctest::Approx(2));
  CHECK(eig.energies(2) == doctest::Approx(3));
}

TEST_CASE("pauli-x spectrum") {
  auto eig = eigendecompose(hermitian_from({{0, 1}, {1, 0}}));
  CHECK(eig.energies(0) == doctest::Approx(-1));
  CHECK(eig.energies(1) == doctest::Approx(+1));
}

TEST_CASE("eigendecompose contract checks") {
  OperatorMatrix bad;
  bad.m = CMatrix::Zero(2, 2);
  bad.m(0, 1) = 1.0;  // not hermitian
  bad.hermitian = false;
  CHECK_THROWS_AS(eigendecompose(bad), ContractError);
  bad.hermitian = true;
  CHECK_THROWS_AS(eigendecompose(bad), ContractError);
}

TEST_CASE("residual and unitarity invariants on random matrices") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto H = random_hermitian(12, rng);
    auto eig = eigendecompose(H);
    const double hnorm = spectral_norm(H.m);
    CHECK((H.m * eig.vectors - eig.vectors * eig.energies.asDiagonal().toDenseMatrix())
              .cwiseAbs()
              .maxCoeff() <= 1e-9 * std::max(hnorm, 1.0));
    CHECK((eig.vectors.adjoint() * eig.vectors - CMatrix::Identity(12, 12))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    CHECK(std::is_sorted(eig.energies.begin(), eig.energies.end()));
  }
}

TEST_CASE("phase fixing is deterministic") {
  Rng rng(5);
  auto H = random_hermitian(8, rng);
  auto a = eigendecompose(H);
  auto b = eigendecompose(H);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index c = 0; c < 8; ++c) {
    Eigen::Index imax = 0;
    a.vectors.col(c).cwiseAbs().maxCoeff(&imax);
    CHECK(a.vectors(imax, c).imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.vectors(imax, c).real() > 0.0);
  }
}

TEST_CASE("gap info") {
  auto eig = eigendecompose(hermitian_from({{0, 0, 0}, {0, 1, 0}, {0, 0, 1.5}}));

  SUBCASE("zero resolution reduces to the plain gap") {
    auto g = gaps(eig, 0.0);
    CHECK(g.delta == doctest::Approx(1.0));
    CHECK(g.delta_res == doctest::Approx(1.0));
    CHECK(g.band_size == 1);
  }
  SUBCASE("resolved band") {
    auto g = gaps(eig, 1.2);
    CHECK(g.band_size == 2);  // k = 1
    CHECK(g.delta_res == doctest::Approx(0.3));
  }
  SUBCASE("band swallowing the full spectrum") {
    auto g = gaps(eig, 2.0);
    CHECK(std::isinf(g.delta_res));
  }
  SUBCASE("degenerate spectrum") {
    auto flat = eigendecompose(hermitian_from({{1, 0}, {0, 1}}));
    CHECK(gaps(flat, 0.0).delta == doctest::Approx(0.0));
  }
}

TEST_CASE("overlap and projector distance") {
  Rng rng(23);
  auto a = eigendecompose(random_hermitian(6, rng));

  SUBCASE("identical systems") {
    CHECK(ground_overlap(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(projector_distance(a, a, 0.0) <= 1e-12);
  }
  SUBCASE("orthogonal ground states") {
    auto d0 = eigendecompose(hermitian_from({{0, 0}, {0, 1}}));
    auto d1 = eigendecompose(hermitian_from({{1, 0}, {0, 0}}));
    CHECK(ground_overlap(d0, d1) == doctest::Approx(0.0));
    CHECK(projector_distance(d0, d1, 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("symmetry and phase invariance") {
    auto b = eigendecompose(random_hermitian(6, rng));
    CHECK(ground_overlap(a, b) == ground_overlap(b, a));
    EigenSystem b_phased = b;
    b_phased.vectors.col(0) *= std::exp(Complex(0, 0.913));
    CHECK(ground_overlap(a, b_phased) == doctest::Approx(ground_overlap(a, b)).epsilon(1e-13));
    CHECK(projector_distance(a, b_phased, 0.0) ==
          doctest::Approx(projector_distance(a, b, 0.0)).epsilon(1e-10));
  }
  SUBCASE("dimension mismatch") {
    auto small = eigendecompose(hermitian_from({{0, 0}, {0, 1}}));
    CHECK_THROWS_AS(ground_overlap(a, small), DimensionError);
  }
}

TEST_CASE("rank-1 identity: distance^2 = 1 - overlap") {
  Rng rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    auto a = eigendecompose(random_hermitian(5, rng));
    auto b = eigendecompose(random_hermitian(5, rng));
    const double dist = projector_distance(a, b, 0.0);
    CHECK(dist * dist == doctest::Approx(1.0 - ground_overlap(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("ipr") {
  CVector basis_state = CVector::Zero(8);
  basis_state(3) = 1.0;
  auto r = compute_ipr(basis_state);
  CHECK(r.ipr == doctest::Approx(1.0));
  CHECK(r.n_eff == doctest::Approx(1.0));

  CVector uniform = CVector::Constant(16, Complex(0.25, 0));
  auto u = compute_ipr(uniform);
  CHECK(u.ipr == doctest::Approx(1.0 / 16));
  CHECK(u.n_eff == doctest::Approx(16.0));

  CVector unnormalized = CVector::Constant(4, Complex(1, 0));
  CHECK_THROWS_AS(compute_ipr(unnormalized), InvalidInputError);
}
