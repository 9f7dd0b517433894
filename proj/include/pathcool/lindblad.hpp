#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "pathcool/fock.hpp"
#include "pathcool/path.hpp"
#include "pathcool/spectral.hpp"
#include "pathcool/types.hpp"

namespace pathcool::lindblad {

/// Sharp one-sided step in frequency: passes omega < 0, kills omega >= 0.
struct IdealStep {};

/// Dirichlet-truncated periodization of the step: N_omega Fourier modes on a
/// frequency period Omega (hartree).
struct SquareWave {
  int n_omega = 1000;
  double omega = 4.0;
};

/// Smoothed step from a Gevrey-class window on the Hilbert kernel, truncated
/// to |t| <= t_support and discretized with m_s quadrature points.
struct Gevrey {
  double alpha = 2.0;
  double t_support = 50.0;  // 1/hartree
  int m_s = 200;
};

using FilterSpec = std::variant<IdealStep, SquareWave, Gevrey>;

void validate(const FilterSpec& spec);

/// Fourier coefficients c_k, k in [-n_omega, n_omega], of the periodized
/// one-sided step (indicator of the negative half-period), by panelled
/// Gauss-Legendre quadrature.  Index k + n_omega.
std::vector<Complex> filter_fourier_coeffs(int n_omega, double omega);

/// Precomputed filter evaluator.
class FilterEngine {
 public:
  explicit FilterEngine(FilterSpec spec);

  Complex response(double w) const;
  const FilterSpec& spec() const { return spec_; }

  /// Largest admissible |omega| (alias guard); infinity when unconstrained.
  double max_frequency() const;

 private:
  FilterSpec spec_;
  std::vector<Complex> coeffs_;            // square wave
  std::vector<std::pair<double, double>> nodes_;  // gevrey: (t_m, weight * window)
};

Complex filter_response(const FilterSpec& spec, double w);

/// Effective time horizon of the N_omega-mode Dirichlet filter.
double dirichlet_horizon(int n_omega, double omega);

/// Leakage envelope sup_{w >= delta} |f_hat| <= 1/(delta * T) for the
/// periodized square wave with horizon T.
double dirichlet_envelope(double delta, double horizon);

struct TimeSupport {
  double t = 0.0;
  double samples = 0.0;  // t / dt
};

/// Required filter time support for a target ground-state leakage.
TimeSupport time_support(const FilterSpec& spec, double delta, double eps_leak, double dt,
                         double gevrey_c = 1.0);

struct JumpSource {
  int i = -1;
  int j = -1;
  fock::BilinearFlavor flavor = fock::BilinearFlavor::X;
};

struct FilteredJump {
  CMatrix K;          // energy eigenbasis
  double leakage = 0.0;  // ||K |E0>||
  JumpSource source;
};

FilteredJump build_filtered_jump(const OperatorMatrix& A, const spectral::EigenSystem& eig,
                                 const FilterSpec& spec);

struct LindbladGenerator {
  std::vector<FilteredJump> jumps;
  spectral::EigenSystem eig;   // basis the jumps live in
  CMatrix dissipator_m;        // sum_a K_a^dag K_a
  double rate_bound = 0.0;     // sum_a (2 ||K_a||^2 + ||K_a^dag K_a||)

  // jump set stacked vertically [K_1; K_2; ...] and horizontally [K_1, K_2, ...]
  // so the dissipator contracts with two large products instead of per-jump pairs
  CMatrix k_stack;
  CMatrix k_row;

  void finalize();  // fills the caches above from jumps
};

struct JumpConfig {
  enum class Pairs { All, SameSpin };
  Pairs pairs = Pairs::All;
  bool flavor_x = true;
  bool flavor_y = true;
  double scale = 1.0;
};

/// Bare bilinear jump operators in the determinant basis.
std::vector<std::pair<JumpSource, OperatorMatrix>> bilinear_jump_set(
    const fock::DeterminantSpace& space, const JumpConfig& config);

LindbladGenerator build_generator(
    const std::vector<std::pair<JumpSource, OperatorMatrix>>& bare,
    const spectral::EigenSystem& eig, const FilterSpec& spec);

struct DensityState {
  CMatrix rho;
  int basis_point = -1;  // index of the mesh point whose energy eigenbasis this is

  void validate(double herm_tol = 1e-10, double trace_tol = 1e-10, double psd_tol = 1e-8) const;
  double ground_population() const { return rho(0, 0).real(); }
};

DensityState ground_state_density(Eigen::Index dim, int basis_point = -1);

/// Carries the last accepted step size between repeated exact steps at a
/// fixed geometry so the controller does not re-ramp every call.
struct IntegratorHint {
  double h = 0.0;
};

/// Integrates d rho/dt = sum_a K_a rho K_a^dag - 1/2 {K_a^dag K_a, rho} over
/// [0, tau] with an embedded Dormand-Prince pair, local error <= 1e-11.
DensityState apply_exact_step(const DensityState& state, const LindbladGenerator& gen, double tau,
                              IntegratorHint* hint = nullptr);

/// Ancilla kick decomposition of one square-wave mode.
struct KickSpec {
  int k = 0;
  Complex c_k;
  char sigma_axis = 'X';  // 'X' when k == 0, 'Y' otherwise
  double theta = 0.0;     // sqrt(tau) |c_k| / 2
  double phi = 0.0;       // ancilla phase, in {0, +-pi/2}
};

std::vector<KickSpec> kick_decomposition(const SquareWave& spec, double tau);

/// Second-order splitting channel: builds the ancilla (x) system unitary
/// W(sqrt(tau)) from per-mode kicks and e^{+-iHT} spacers, conjugates
/// |0><0| (x) rho and traces the ancilla.
DensityState apply_strang_step(const DensityState& state, const OperatorMatrix& A,
                               const spectral::EigenSystem& eig, const SquareWave& spec,
                               double tau);

/// Randomized one-jump step: samples a ~ weights, applies the exact step of
/// that single-jump generator.  Deterministic given seed.
DensityState qdrift_step(const DensityState& state, const LindbladGenerator& gen,
                         const std::vector<double>& weights, double tau, std::uint64_t seed);

enum class Stepper { Exact, Strang, Qdrift };

struct EvolveOptions {
  FilterSpec filter = IdealStep{};
  JumpConfig jumps;
  double tau = 0.01;
  int n_t = 50;
  Stepper stepper = Stepper::Exact;
  std::uint64_t seed = 1;
  std::optional<CMatrix> initial;  // density in the eigenbasis of the first point
};

struct TrajectoryPoint {
  int index = 0;
  double s = 0.0;
  double e0 = 0.0;
  double energy_error = 0.0;  // |tr(H rho) - E0|
  double infidelity = 0.0;    // 1 - <E0|rho|E0>
  std::vector<double> p0_per_step;  // ground population after each dissipative step
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
};

/// Warm-start transport: per mesh point, re-express rho in the local energy
/// eigenbasis, apply the stepper n_t times, record energy error and infidelity.
std::vector<TrajectoryPoint> evolve_along_path(const path::PathMesh& mesh,
                                               const EvolveOptions& opt);

}  // namespace pathcool::lindblad
