#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pathcool/markov.hpp"
#include "pathcool/rng.hpp"

using namespace pathcool;
using namespace pathcool::markov;

namespace {

spectral::EigenSystem diagonal_system(const Vector& energies) {
  spectral::EigenSystem eig;
  eig.energies = energies;
  eig.vectors = CMatrix::Identity(energies.size(), energies.size());
  return eig;
}

/// Lazy downhill chain: unit-spaced energies, P(j -> j-1) = p, P(j -> j) = 1-p.
MarkovKernel lazy_chain(int n, double p) {
  MarkovKernel k;
  k.p = Matrix::Zero(n, n);
  k.gamma = Matrix::Zero(n, n);
  k.p(0, 0) = 1.0;
  for (int j = 1; j < n; ++j) {
    k.p(j, j - 1) = p;
    k.p(j, j) = 1.0 - p;
  }
  k.absorbing = true;
  return k;
}

Vector unit_energies(int n) { return Vector::LinSpaced(n, 0.0, n - 1.0); }

lindblad::FilteredJump jump_of(const CMatrix& k) { return {k, k.col(0).norm(), {}}; }

}  // namespace

TEST_CASE("kernel from a single lowering jump") {
  auto eig = diagonal_system(unit_energies(2));
  CMatrix k = CMatrix::Zero(2, 2);
  k(0, 1) = 1.0;  // |E0><E1|
  auto kernel = kernel_from_jumps({jump_of(k)}, eig);
  kernel.validate();
  CHECK(kernel.p(1, 0) == doctest::Approx(1.0));
  CHECK(kernel.p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("dead rows become self-loops and ground is forced absorbing") {
  auto eig = diagonal_system(unit_energies(3));
  CMatrix k = CMatrix::Zero(3, 3);
  k(0, 1) = 0.7;
  k(0, 0) = 0.5;  // would give the ground row weight
  auto kernel = kernel_from_jumps({jump_of(k)}, eig);
  kernel.validate();
  CHECK(kernel.p(2, 2) == doctest::Approx(1.0));  // untouched state stays put
  CHECK(kernel.p(0, 0) == doctest::Approx(1.0));  // absorbing despite Gamma_00 > 0
}

TEST_CASE("ideal-filtered jumps give a strictly downhill kernel") {
  Rng rng(3);
  auto eig = diagonal_system(Vector::LinSpaced(6, 0.0, 1.0));
  std::vector<lindblad::FilteredJump> jumps;
  for (int trial = 0; trial < 3; ++trial) {
    CMatrix a = test::random_matrix(6, rng);
    OperatorMatrix A;
    A.m = (a + a.adjoint()) / 2.0;
    A.hermitian = true;
    jumps.push_back(lindblad::build_filtered_jump(A, eig, lindblad::IdealStep{}));
  }
  auto kernel = kernel_from_jumps(jumps, eig);
  kernel.validate();
  for (Eigen::Index j = 0; j < 6; ++j) {
    double uphill = 0.0;
    for (Eigen::Index k = j + 1; k < 6; ++k) uphill += kernel.p(j, k);
    CHECK(uphill <= 1e-12);
  }
}

TEST_CASE("layer partition") {
  Vector e(4);
  e << 0.0, 0.0, 1.2, 2.0;
  auto part = layer_partition(e, 0.5);
  CHECK(part.layers[0] == 0);
  CHECK(part.layers[1] == 0);
  CHECK(part.layers[2] == 3);  // ceil(2.4)
  CHECK(part.layers[3] == 4);  // ceil(4.0) stays 4 under the slack
  CHECK_THROWS_AS(layer_partition(e, 0.0), InvalidInputError);
}

TEST_CASE("warm start radius") {
  Vector e = unit_energies(5);
  auto part = layer_partition(e, 1.0);
  Vector ground = Vector::Zero(5);
  ground(0) = 1.0;
  CHECK(warm_start_radius(ground, part, 0.01) == 0);
  CHECK(warm_start_radius(ground, part, 0.99) == 0);

  Vector spread(5);
  spread << 0.5, 0.3, 0.1, 0.05, 0.05;
  CHECK(warm_start_radius(spread, part, 0.2) == 1);   // Pr(L>1) = 0.2 <= 0.2
  CHECK(warm_start_radius(spread, part, 0.05) == 3);  // Pr(L>3) = 0.05
}

TEST_CASE("uniform drift report") {
  SUBCASE("two-state chain") {
    auto kernel = lazy_chain(2, 0.3);
    auto rep = check_uniform_drift(kernel, unit_energies(2), 0.5);
    CHECK(rep.p_min_achieved == doctest::Approx(0.3));
    CHECK(rep.violators.empty());
  }
  SUBCASE("identity kernel has zero drift everywhere") {
    MarkovKernel k;
    k.p = Matrix::Identity(4, 4);
    k.gamma = Matrix::Zero(4, 4);
    auto rep = check_uniform_drift(k, unit_energies(4), 0.5, 0.01);
    CHECK(rep.p_min_achieved == doctest::Approx(0.0));
    CHECK(rep.violators.size() == 3);
  }
  SUBCASE("microcanonical window restriction") {
    auto kernel = lazy_chain(4, 0.5);
    Vector mu = Vector::Zero(4);
    mu(1) = 1.0;  // only state 1 populated
    auto rep = check_uniform_drift(kernel, unit_energies(4), 0.5, 0.0, mu);
    CHECK(rep.window == std::vector<int>{1});
  }
}

TEST_CASE("hitting simulation on deterministic chains") {
  auto kernel = lazy_chain(2, 1.0);  // P(1 -> 0) = 1
  Vector mu = Vector::Zero(2);
  mu(1) = 1.0;
  auto stats = simulate_hitting(kernel, mu, 200, 42);
  for (auto s : stats.samples) CHECK(s == 1);
  CHECK(stats.capped == 0);
}

TEST_CASE("tail bound arithmetic") {
  HittingStats stats;
  stats.samples = {1, 2, 3};
  auto rep = verify_tail_bound(stats, 10, 0.5, 0.0, 0.01);
  CHECK(rep.t_star == 114);  // ceil(40 + 16 ln 100)
  CHECK(rep.pass);
}

TEST_CASE("linear cooling budget") {
  CHECK(linear_cooling_budget(2.5, 4, 1.0, 0.5, 0.01) == 114);  // ceil(c_E N_o / dE) = 10
  // epsilon -> 1 removes the log term
  CHECK(linear_cooling_budget(2.5, 4, 1.0, 0.5, 1.0) == 40);
  // doubling N_o doubles the first term exactly
  CHECK(linear_cooling_budget(2.5, 8, 1.0, 0.5, 1.0) == 80);
}

TEST_CASE("empirical tails meet the lemma bound on constructed chains") {
  for (double p : {0.1, 0.3, 0.9}) {
    for (int l_mu : {5, 20}) {
      auto kernel = lazy_chain(l_mu + 1, p);
      Vector mu = Vector::Zero(l_mu + 1);
      mu(l_mu) = 1.0;  // start exactly L_mu layers up, eta = 0
      auto stats = simulate_hitting(kernel, mu, 20000, 7);
      auto rep = verify_tail_bound(stats, l_mu, p, 0.0, 0.01);
      CHECK(rep.pass);
      CHECK(rep.empirical <= rep.bound);
    }
  }
}

TEST_CASE("chains with uphill moves still obey the bound at their certified drift") {
  // P(j->j-1) = 0.4, P(j->j+1) = 0.2, P(j->j) = 0.4 on 12 states
  const int n = 12;
  MarkovKernel k;
  k.p = Matrix::Zero(n, n);
  k.p(0, 0) = 1.0;
  for (int j = 1; j < n; ++j) {
    k.p(j, j - 1) = 0.4;
    if (j + 1 < n) {
      k.p(j, j + 1) = 0.2;
      k.p(j, j) = 0.4;
    } else {
      k.p(j, j) = 0.6;
    }
  }
  k.absorbing = true;
  auto drift = check_uniform_drift(k, unit_energies(n), 1.0);
  CHECK(drift.p_min_achieved == doctest::Approx(0.4));

  Vector mu = Vector::Zero(n);
  mu(6) = 1.0;
  auto stats = simulate_hitting(k, mu, 20000, 11);
  auto rep = verify_tail_bound(stats, 6, drift.p_min_achieved, 0.0, 0.01);
  CHECK(rep.pass);
}

TEST_CASE("monte carlo distribution matches the kernel-power oracle") {
  auto kernel = lazy_chain(8, 0.35);
  Vector mu = Vector::Zero(8);
  mu(5) = 0.6;
  mu(7) = 0.4;
  auto stats = simulate_hitting(kernel, mu, 100000, 2024);
  auto cdf = absorption_cdf(kernel, mu, 400);
  CHECK(kolmogorov_smirnov(stats, cdf) < 0.02);
}

TEST_CASE("deterministic seeding") {
  auto kernel = lazy_chain(5, 0.4);
  Vector mu = Vector::Constant(5, 0.2);
  auto a = simulate_hitting(kernel, mu, 500, 99);
  auto b = simulate_hitting(kernel, mu, 500, 99);
  CHECK(a.samples == b.samples);
  auto c = simulate_hitting(kernel, mu, 500, 100);
  CHECK(a.samples != c.samples);
}

TEST_CASE("threshold graph and longest downhill path") {
  SUBCASE("two-state chain") {
    auto g = threshold_graph(lazy_chain(2, 1.0), 0.5);
    CHECK(g.edges.size() == 1);
    CHECK(g.longest_path == 1);
    CHECK(g.unreachable.empty());
  }
  SUBCASE("identity kernel strands every excited node") {
    MarkovKernel k;
    k.p = Matrix::Identity(4, 4);
    k.gamma = Matrix::Zero(4, 4);
    auto g = threshold_graph(k, 0.01);
    CHECK(g.edges.empty());
    CHECK(g.unreachable.size() == 3);
    CHECK(g.longest_path == 0);
  }
  SUBCASE("chain of length 4") {
    auto g = threshold_graph(lazy_chain(5, 0.9), 0.5);
    CHECK(g.longest_path == 4);
    CHECK(longest_downhill_path(lazy_chain(5, 0.9), 0.5) == 4);
  }
  SUBCASE("threshold validation") {
    CHECK_THROWS_AS(threshold_graph(lazy_chain(3, 0.5), 1.1), InvalidInputError);
  }
}

TEST_CASE("export never mutates the kernel and emits well-formed documents") {
  auto kernel = lazy_chain(4, 0.6);
  const Matrix before = kernel.p;
  auto g = threshold_graph(kernel, 0.5);
  auto part = layer_partition(unit_energies(4), 1.0);
  const auto dot = export_dot(g, unit_energies(4));
  const auto json = export_json(g, unit_energies(4), part);
  CHECK((kernel.p - before).cwiseAbs().maxCoeff() == 0.0);
  kernel.validate();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("n1 -> n0") != std::string::npos);
  CHECK(json.find("\"edges\"") != std::string::npos);
  CHECK(json.find("\"layer\"") != std::string::npos);
}

TEST_CASE("random certified kernels never violate the verified tail bound") {
  Rng rng(31337);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + static_cast<int>(rng.uniform() * 6);
    MarkovKernel k;
    k.p = Matrix::Zero(n, n);
    k.p(0, 0) = 1.0;
    for (int j = 1; j < n; ++j) {
      // random row with guaranteed downhill mass
      double down = 0.05 + 0.9 * rng.uniform();
      const int target = static_cast<int>(rng.uniform() * j);
      k.p(j, target) = down;
      double rest = 1.0 - down;
      const int up = j + static_cast<int>(rng.uniform() * (n - j));
      k.p(j, std::min(up, n - 1)) += rest * 0.5;
      k.p(j, j) += rest * 0.5;
    }
    k.absorbing = true;
    k.validate();

    auto drift = check_uniform_drift(k, unit_energies(n), 1.0);
    REQUIRE(drift.p_min_achieved > 0.0);

    Vector mu = Vector::Zero(n);
    mu(n - 1) = 1.0;
    auto stats = simulate_hitting(k, mu, 5000, 1000 + trial);
    auto rep = verify_tail_bound(stats, n - 1, drift.p_min_achieved, 0.0, 0.05);
    CHECK(rep.pass);
  }
}
