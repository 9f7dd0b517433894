#include "pathcool/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pathcool/rng.hpp"

namespace pathcool::lindblad {

namespace {

constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

template <typename F>
double gl_integrate(F&& f, double a, double b, int panels) {
  double acc = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int q = 0; q < 8; ++q) acc += kGlWeight[q] * f(mid + 0.5 * h * kGlNode[q]);
  }
  return acc * 0.5 * h;
}

// Gevrey-alpha transition: 0 at x<=0, 1 at x>=1, C^inf in between.
double gevrey_transition(double x, double alpha) {
  auto psi = [alpha](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-std::pow(t, -1.0 / (alpha - 1.0)));
  };
  const double a = psi(x), b = psi(1.0 - x);
  if (a == 0.0) return 0.0;
  if (b == 0.0) return 1.0;
  return a / (a + b);
}

}  // namespace

void validate(const FilterSpec& spec) {
  if (const auto* sw = std::get_if<SquareWave>(&spec)) {
    if (sw->n_omega < 1) throw InvalidInputError("filter: n_omega must be >= 1");
    if (sw->omega <= 0.0) throw InvalidInputError("filter: Omega must be > 0");
  } else if (const auto* gv = std::get_if<Gevrey>(&spec)) {
    if (gv->alpha <= 1.0) throw InvalidInputError("filter: Gevrey alpha must be > 1");
    if (gv->t_support <= 0.0) throw InvalidInputError("filter: Gevrey t_support must be > 0");
    if (gv->m_s < 3) throw InvalidInputError("filter: Gevrey m_s must be >= 3");
  }
}

std::vector<Complex> filter_fourier_coeffs(int n_omega, double omega) {
  if (n_omega < 1 || omega <= 0.0) throw InvalidInputError("filter_fourier_coeffs: bad inputs");
  std::vector<Complex> coeffs(2 * n_omega + 1, Complex(0, 0));
  // c_k = (1/Omega) int_{-Omega/2}^{0} exp(-i (2 pi / Omega) k w) dw
  for (int k = 0; k <= n_omega; ++k) {
    const double freq = 2.0 * kPi * k / omega;
    const int panels = std::max(16, k);
    double re = gl_integrate([&](double w) { return std::cos(freq * w); }, -omega / 2.0, 0.0,
                             panels) /
                omega;
    double im = gl_integrate([&](double w) { return -std::sin(freq * w); }, -omega / 2.0, 0.0,
                             panels) /
                omega;
    coeffs[n_omega + k] = Complex(re, im);
    coeffs[n_omega - k] = Complex(re, -im);
  }
  return coeffs;
}

FilterEngine::FilterEngine(FilterSpec spec) : spec_(std::move(spec)) {
  lindblad::validate(spec_);
  if (const auto* sw = std::get_if<SquareWave>(&spec_)) {
    coeffs_ = filter_fourier_coeffs(sw->n_omega, sw->omega);
  } else if (const auto* gv = std::get_if<Gevrey>(&spec_)) {
    // quadrature nodes for f_hat(w) = 1/2 - (1/pi) int_0^T chi(t) sin(w t)/t dt
    const int panels = (gv->m_s + 7) / 8;
    const double h = gv->t_support / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * h;
      for (int q = 0; q < 8; ++q) {
        const double t = mid + 0.5 * h * kGlNode[q];
        const double chi = gevrey_transition(1.0 - t / gv->t_support, gv->alpha);
        nodes_.emplace_back(t, kGlWeight[q] * 0.5 * h * chi);
      }
    }
  }
}

double FilterEngine::max_frequency() const {
  if (const auto* sw = std::get_if<SquareWave>(&spec_)) return sw->omega / 2.0;
  return std::numeric_limits<double>::infinity();
}

Complex FilterEngine::response(double w) const {
  if (std::holds_alternative<IdealStep>(spec_)) {
    return (w < 0.0) ? Complex(1, 0) : Complex(0, 0);
  }
  if (const auto* sw = std::get_if<SquareWave>(&spec_)) {
    if (std::abs(w) >= sw->omega / 2.0)
      throw AliasGuardError("filter_response: |omega| = " + std::to_string(std::abs(w)) +
                            " outside the principal interval (-Omega/2, Omega/2)");
    Complex acc(0, 0);
    const double base = 2.0 * kPi * w / sw->omega;
    for (int k = -sw->n_omega; k <= sw->n_omega; ++k) {
      const Complex c = coeffs_[sw->n_omega + k];
      if (c == Complex(0, 0)) continue;
      acc += c * Complex(std::cos(base * k), std::sin(base * k));
    }
    return acc;
  }
  // Gevrey: real smoothed step
  double acc = 0.0;
  for (const auto& [t, wt] : nodes_) acc += wt * std::sin(w * t) / t;
  return Complex(0.5 - acc / kPi, 0.0);
}

Complex filter_response(const FilterSpec& spec, double w) { return FilterEngine(spec).response(w); }

double dirichlet_horizon(int n_omega, double omega) {
  return (n_omega + 0.5) * 2.0 * kPi / omega;
}

double dirichlet_envelope(double delta, double horizon) { return 1.0 / (delta * horizon); }

TimeSupport time_support(const FilterSpec& spec, double delta, double eps_leak, double dt,
                         double gevrey_c) {
  if (delta <= 0.0 || eps_leak <= 0.0 || eps_leak >= 1.0 || dt <= 0.0)
    throw InvalidInputError("time_support: need delta > 0, 0 < eps_leak < 1, dt > 0");
  TimeSupport out;
  if (std::holds_alternative<IdealStep>(spec)) {
    out.t = 0.0;  // no truncation; the sharp step has zero leakage by construction
  } else if (std::holds_alternative<SquareWave>(spec)) {
    out.t = 2.0 / (kPi * delta * eps_leak);
  } else {
    const auto& gv = std::get<Gevrey>(spec);
    out.t = gevrey_c / delta * std::pow(std::log(1.0 / eps_leak), gv.alpha);
  }
  out.samples = out.t / dt;
  return out;
}

namespace {

void check_alias_guard(const FilterEngine& engine, const spectral::EigenSystem& eig) {
  const double spread = eig.energies(eig.dim() - 1) - eig.energies(0);
  if (spread >= engine.max_frequency()) {
    const double hnorm = eig.energies.cwiseAbs().maxCoeff();
    throw AliasGuardError(
        "filtered jump: Bohr frequency spread " + std::to_string(spread) +
        " reaches Omega/2; choose Omega >= 4*||H|| (here >= " + std::to_string(4.0 * hnorm) + ")");
  }
}

CMatrix response_matrix(const FilterEngine& engine, const Vector& energies) {
  const auto d = energies.size();
  CMatrix f(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) f(j, k) = engine.response(energies(j) - energies(k));
  return f;
}

FilteredJump filtered_jump_from(const CMatrix& f, const OperatorMatrix& A,
                                const spectral::EigenSystem& eig) {
  A.assert_hermitian();
  if (A.dim() != eig.dim()) throw DimensionError("build_filtered_jump: dimension mismatch");
  FilteredJump jump;
  jump.K = f.cwiseProduct(eig.vectors.adjoint() * A.m * eig.vectors);
  jump.leakage = jump.K.col(0).norm();
  return jump;
}

}  // namespace

FilteredJump build_filtered_jump(const OperatorMatrix& A, const spectral::EigenSystem& eig,
                                 const FilterSpec& spec) {
  FilterEngine engine(spec);
  check_alias_guard(engine, eig);
  return filtered_jump_from(response_matrix(engine, eig.energies), A, eig);
}

void LindbladGenerator::finalize() {
  if (jumps.empty()) throw InvalidInputError("LindbladGenerator: empty jump set");
  const auto d = jumps.front().K.rows();
  const auto n = static_cast<Eigen::Index>(jumps.size());
  dissipator_m = CMatrix::Zero(d, d);
  rate_bound = 0.0;
  k_stack.resize(n * d, d);
  k_row.resize(d, n * d);
  for (Eigen::Index a = 0; a < n; ++a) {
    const CMatrix& k = jumps[a].K;
    if (k.rows() != d) throw DimensionError("LindbladGenerator: mixed jump dimensions");
    CMatrix kk = k.adjoint() * k;
    dissipator_m += kk;
    const double kn = spectral_norm(k);
    rate_bound += 2.0 * kn * kn + spectral_norm(kk);
    k_stack.middleRows(a * d, d) = k;
    k_row.middleCols(a * d, d) = k;
  }
}

std::vector<std::pair<JumpSource, OperatorMatrix>> bilinear_jump_set(
    const fock::DeterminantSpace& space, const JumpConfig& config) {
  std::vector<std::pair<JumpSource, OperatorMatrix>> out;
  if (config.scale <= 0.0) throw InvalidInputError("jump set: scale must be > 0");
  for (int i = 0; i < space.n_spin_orbitals; ++i)
    for (int j = i + 1; j < space.n_spin_orbitals; ++j) {
      if (config.pairs == JumpConfig::Pairs::SameSpin && ((i ^ j) & 1)) continue;
      for (auto flavor : {fock::BilinearFlavor::X, fock::BilinearFlavor::Y}) {
        if (flavor == fock::BilinearFlavor::X && !config.flavor_x) continue;
        if (flavor == fock::BilinearFlavor::Y && !config.flavor_y) continue;
        auto A = fock::build_bilinear(i, j, flavor, space);
        A.m *= config.scale;
        out.push_back({JumpSource{i, j, flavor}, std::move(A)});
      }
    }
  if (out.empty()) throw InvalidInputError("jump set: configuration selects no jumps");
  return out;
}

LindbladGenerator build_generator(
    const std::vector<std::pair<JumpSource, OperatorMatrix>>& bare,
    const spectral::EigenSystem& eig, const FilterSpec& spec) {
  FilterEngine engine(spec);
  check_alias_guard(engine, eig);
  const CMatrix f = response_matrix(engine, eig.energies);

  LindbladGenerator gen;
  gen.eig = eig;
  gen.jumps.reserve(bare.size());
  for (const auto& [src, A] : bare) {
    auto j = filtered_jump_from(f, A, eig);
    j.source = src;
    gen.jumps.push_back(std::move(j));
  }
  gen.finalize();
  return gen;
}

void DensityState::validate(double herm_tol, double trace_tol, double psd_tol) const {
  if (rho.rows() != rho.cols()) throw ContractError("DensityState: non-square rho");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw ContractError("DensityState: rho not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > trace_tol || std::abs(rho.trace().imag()) > trace_tol)
    throw ContractError("DensityState: trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> es((rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw ContractError("DensityState: negative eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()));
}

DensityState ground_state_density(Eigen::Index dim, int basis_point) {
  DensityState s;
  s.rho = CMatrix::Zero(dim, dim);
  s.rho(0, 0) = 1.0;
  s.basis_point = basis_point;
  return s;
}

namespace {

struct RhsWorkspace {
  CMatrix tall;  // (n d) x d
  CMatrix wide;  // d x (n d)
};

void lindblad_rhs(const LindbladGenerator& gen, const CMatrix& rho, CMatrix& out,
                  RhsWorkspace& ws) {
  const auto d = rho.rows();
  const auto n = static_cast<Eigen::Index>(gen.jumps.size());
  out.noalias() = -0.5 * (gen.dissipator_m * rho);
  out.noalias() -= 0.5 * (rho * gen.dissipator_m);
  if (n >= 4) {
    // sum_a K_a rho K_a^dag as two large products with a block transpose
    if (ws.tall.rows() != n * d) {
      ws.tall.resize(n * d, d);
      ws.wide.resize(d, n * d);
    }
    ws.tall.noalias() = gen.k_stack * rho;
    for (Eigen::Index a = 0; a < n; ++a)
      ws.wide.middleCols(a * d, d) = ws.tall.middleRows(a * d, d);
    out.noalias() += ws.wide * gen.k_row.adjoint();
  } else {
    if (ws.tall.rows() != d) ws.tall.resize(d, d);
    for (const auto& j : gen.jumps) {
      ws.tall.noalias() = j.K * rho;
      out.noalias() += ws.tall * j.K.adjoint();
    }
  }
}

// Dormand-Prince 5(4) with absolute max-norm error control.
CMatrix integrate_master_equation(const LindbladGenerator& gen, CMatrix rho, double tau,
                                  IntegratorHint* hint, double tol = 1e-11) {
  if (tau == 0.0) return rho;
  double t = 0.0;
  double h = std::min(tau, 0.1 / std::max(gen.rate_bound, 1e-6));
  if (hint && hint->h > 0.0) h = std::min(hint->h, tau);
  const int max_steps = 2'000'000;

  RhsWorkspace ws;
  const auto d = rho.rows();
  CMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
  CMatrix stage(d, d), y5(d, d), err_m(d, d);

  lindblad_rhs(gen, rho, k1, ws);
  for (int step = 0; step < max_steps && t < tau; ++step) {
    const bool clipped = h > tau - t;
    const double hc = std::min(h, tau - t);
    stage = rho + hc * (1.0 / 5.0) * k1;
    lindblad_rhs(gen, stage, k2, ws);
    stage = rho + hc * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2);
    lindblad_rhs(gen, stage, k3, ws);
    stage = rho + hc * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3);
    lindblad_rhs(gen, stage, k4, ws);
    stage = rho + hc * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                        (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4);
    lindblad_rhs(gen, stage, k5, ws);
    stage = rho + hc * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 +
                        (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 -
                        (5103.0 / 18656.0) * k5);
    lindblad_rhs(gen, stage, k6, ws);
    y5 = rho + hc * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                     (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    lindblad_rhs(gen, y5, k7, ws);
    err_m = hc * ((71.0 / 57600.0) * k1 - (71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 -
                  (17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 - (1.0 / 40.0) * k7);
    const double err = err_m.cwiseAbs().maxCoeff();

    if (err <= tol) {
      t += hc;
      rho.swap(y5);
      k1.swap(k7);  // FSAL; on rejection rho and k1 are both still valid
    }
    const double scale = (err > 0.0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    // a step clipped to the interval end must not shrink the controller state
    if (err <= tol && clipped)
      h = std::max(h, hc * std::clamp(scale, 0.2, 5.0));
    else
      h = hc * std::clamp(scale, 0.2, 5.0);
    if (!(h > 0.0) || !std::isfinite(err))
      throw IntegratorError("exact step: integrator stalled (non-finite error estimate)");
  }
  if (t < tau) throw IntegratorError("exact step: step budget exhausted before reaching tau");
  if (hint) hint->h = h;
  return rho;
}

DensityState restore_invariants(CMatrix rho, int basis_point, const char* who) {
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  const double drift = std::abs(rho.trace().real() - 1.0);
  if (drift >= 1e-9)
    throw IntegratorError(std::string(who) + ": trace drift " + std::to_string(drift));
  rho /= rho.trace().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-6)
    throw IntegratorError(std::string(who) + ": positivity violated, min eigenvalue " +
                          std::to_string(min_eig));
  DensityState out;
  out.rho = std::move(rho);
  out.basis_point = basis_point;
  return out;
}

}  // namespace

DensityState apply_exact_step(const DensityState& state, const LindbladGenerator& gen, double tau,
                              IntegratorHint* hint) {
  if (tau < 0.0) throw InvalidInputError("apply_exact_step: tau must be >= 0");
  if (state.rho.rows() != gen.eig.dim())
    throw DimensionError("apply_exact_step: state/generator dimension mismatch");
  if (tau == 0.0) return state;
  CMatrix rho = integrate_master_equation(gen, state.rho, tau, hint);
  return restore_invariants(std::move(rho), state.basis_point, "apply_exact_step");
}

std::vector<KickSpec> kick_decomposition(const SquareWave& spec, double tau) {
  if (tau <= 0.0) throw InvalidInputError("kick_decomposition: tau must be > 0");
  auto coeffs = filter_fourier_coeffs(spec.n_omega, spec.omega);
  std::vector<KickSpec> kicks;
  kicks.reserve(coeffs.size());
  for (int k = -spec.n_omega; k <= spec.n_omega; ++k) {
    const Complex c = coeffs[spec.n_omega + k];
    KickSpec ks;
    ks.k = k;
    ks.c_k = c;
    ks.sigma_axis = (k == 0) ? 'X' : 'Y';
    ks.theta = std::sqrt(tau) * std::abs(c) / 2.0;
    ks.phi = (k == 0) ? 0.0 : std::arg(c);
    kicks.push_back(ks);
  }
  return kicks;
}

DensityState apply_strang_step(const DensityState& state, const OperatorMatrix& A,
                               const spectral::EigenSystem& eig, const SquareWave& spec,
                               double tau) {
  if (tau <= 0.0) throw InvalidInputError("apply_strang_step: tau must be > 0");
  if (state.rho.rows() != eig.dim() || A.dim() != eig.dim())
    throw DimensionError("apply_strang_step: dimension mismatch");
  A.assert_hermitian();

  const Eigen::Index d = eig.dim();
  const auto coeffs = filter_fourier_coeffs(spec.n_omega, spec.omega);
  const double period = 2.0 * kPi / spec.omega;

  const CMatrix a_eig = eig.vectors.adjoint() * A.m * eig.vectors;
  Eigen::SelfAdjointEigenSolver<CMatrix> es((a_eig + a_eig.adjoint()) / 2.0);
  const CMatrix q = es.eigenvectors();
  const Vector lam = es.eigenvalues();

  // first block column of W, folded from the rightmost factor inward
  CMatrix top = CMatrix::Identity(d, d);
  CMatrix bot = CMatrix::Zero(d, d);

  const double theta0 = std::sqrt(tau) / 2.0;
  // one per-mode factor exp(-i (sqrt(tau)/2) sigma_k (x) A(-kT)); the
  // Heisenberg shift enters as diagonal phase sandwiches around the bare kick
  auto apply_mode = [&](int k) {
    const Complex c = coeffs[spec.n_omega + k];
    const double mag = std::abs(c);
    if (mag < 1e-15) return;  // even modes of the half-period step vanish
    const Complex unit = c / mag;

    CVector phase(d);
    for (Eigen::Index j = 0; j < d; ++j)
      phase(j) = std::exp(Complex(0, eig.energies(j) * k * period));

    top = phase.conjugate().asDiagonal() * top;
    bot = phase.conjugate().asDiagonal() * bot;

    CVector cosv(d), sinv(d);
    for (Eigen::Index m = 0; m < d; ++m) {
      cosv(m) = std::cos(theta0 * mag * lam(m));
      sinv(m) = std::sin(theta0 * mag * lam(m));
    }
    const CMatrix qc = q * cosv.asDiagonal() * q.adjoint();
    const CMatrix qs = q * sinv.asDiagonal() * q.adjoint();
    const CMatrix u01 = (Complex(0, -1) * std::conj(unit)) * qs;
    const CMatrix u10 = (Complex(0, -1) * unit) * qs;
    CMatrix new_top = qc * top + u01 * bot;
    bot = (u10 * top + qc * bot).eval();
    top = std::move(new_top);

    top = phase.asDiagonal() * top;
    bot = phase.asDiagonal() * bot;
  };

  // palindromic product: modes -N..N then N..-N, read right-to-left here
  for (int k = -spec.n_omega; k <= spec.n_omega; ++k) apply_mode(k);
  for (int k = spec.n_omega; k >= -spec.n_omega; --k) apply_mode(k);

  CMatrix rho = top * state.rho * top.adjoint() + bot * state.rho * bot.adjoint();
  return restore_invariants(std::move(rho), state.basis_point, "apply_strang_step");
}

DensityState qdrift_step(const DensityState& state, const LindbladGenerator& gen,
                         const std::vector<double>& weights, double tau, std::uint64_t seed) {
  if (gen.jumps.empty()) throw InvalidInputError("qdrift_step: empty jump set");
  if (weights.size() != gen.jumps.size())
    throw DimensionError("qdrift_step: weight/jump count mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw InvalidInputError("qdrift_step: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw InvalidInputError("qdrift_step: weights must sum to 1");
  if (tau == 0.0) return state;

  Rng rng(seed);
  const std::size_t pick = rng.discrete(weights);

  LindbladGenerator single;
  single.eig = gen.eig;
  single.jumps.push_back(gen.jumps[pick]);
  single.finalize();
  return apply_exact_step(state, single, tau);
}

std::vector<TrajectoryPoint> evolve_along_path(const path::PathMesh& mesh,
                                               const EvolveOptions& opt) {
  if (mesh.points.empty()) throw InvalidInputError("evolve_along_path: empty mesh");
  if (opt.tau <= 0.0) throw InvalidInputError("evolve_along_path: tau must be > 0");
  if (opt.n_t < 1) throw InvalidInputError("evolve_along_path: n_t must be >= 1");
  if (opt.stepper == Stepper::Strang && !std::holds_alternative<SquareWave>(opt.filter))
    throw InvalidInputError("evolve_along_path: the strang stepper requires a square-wave filter");

  const auto space = fock::enumerate_determinants(2 * mesh.points.front().mo.n_orb,
                                                  mesh.points.front().n_electrons);
  const auto bare = bilinear_jump_set(space, opt.jumps);

  DensityState state;
  if (opt.initial) {
    state.rho = *opt.initial;
    state.basis_point = 0;
    state.validate();
  } else {
    state = ground_state_density(static_cast<Eigen::Index>(space.dim()), 0);
  }

  std::vector<TrajectoryPoint> traj;
  traj.reserve(mesh.points.size());

  for (std::size_t i = 0; i < mesh.points.size(); ++i) {
    const auto& pt = mesh.points[i];
    const auto& eig = pt.eig();

    if (i > 0) {
      // re-express in the local eigenbasis; the determinant space is shared
      const auto& prev = mesh.points[i - 1].eig();
      CMatrix rho_det = prev.vectors * state.rho * prev.vectors.adjoint();
      state.rho = eig.vectors.adjoint() * rho_det * eig.vectors;
      state.basis_point = static_cast<int>(i);
    }

    TrajectoryPoint rec;
    rec.index = static_cast<int>(i);
    rec.s = pt.s;
    rec.e0 = eig.energies(0);
    rec.min_eigenvalue = 0.0;

    LindbladGenerator gen;
    if (opt.stepper != Stepper::Strang) gen = build_generator(bare, eig, opt.filter);

    std::vector<double> weights(bare.size(), 1.0 / static_cast<double>(bare.size()));
    IntegratorHint hint;

    for (int t = 0; t < opt.n_t; ++t) {
      const double trace_before = state.rho.trace().real();
      switch (opt.stepper) {
        case Stepper::Exact:
          state = apply_exact_step(state, gen, opt.tau, &hint);
          break;
        case Stepper::Strang: {
          const auto& sw = std::get<SquareWave>(opt.filter);
          for (const auto& [src, A] : bare) state = apply_strang_step(state, A, eig, sw, opt.tau);
          break;
        }
        case Stepper::Qdrift: {
          const std::uint64_t step_seed =
              opt.seed * 0x9E3779B97F4A7C15ull + i * static_cast<std::size_t>(opt.n_t) + t + 1;
          state = qdrift_step(state, gen, weights, opt.tau, step_seed);
          break;
        }
      }
      rec.p0_per_step.push_back(state.ground_population());
      rec.max_trace_drift =
          std::max(rec.max_trace_drift, std::abs(state.rho.trace().real() - trace_before));
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> es(state.rho, Eigen::EigenvaluesOnly);
    rec.min_eigenvalue = es.eigenvalues().minCoeff();
    double energy = 0.0;
    for (Eigen::Index j = 0; j < eig.dim(); ++j)
      energy += eig.energies(j) * state.rho(j, j).real();
    rec.energy_error = std::abs(energy - rec.e0);
    rec.infidelity = 1.0 - state.ground_population();
    traj.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace pathcool::lindblad
