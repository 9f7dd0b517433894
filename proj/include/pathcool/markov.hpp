#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathcool/lindblad.hpp"
#include "pathcool/spectral.hpp"
#include "pathcool/types.hpp"

namespace pathcool::markov {

/// Row-stochastic eigenstate-transition kernel induced by a jump set.
/// Row j holds P_{j -> k}; the ground row is absorbing.
struct MarkovKernel {
  Matrix p;       // row-stochastic
  Matrix gamma;   // unnormalized weights Gamma_{j -> k} = sum_a |<k|K_a|j>|^2
  bool absorbing = true;

  Eigen::Index dim() const { return p.rows(); }
  void validate() const;
};

/// Dead rows (zero total weight) become self-loops; row 0 is forced absorbing.
MarkovKernel kernel_from_jumps(const std::vector<lindblad::FilteredJump>& jumps,
                               const spectral::EigenSystem& eig);

struct LayerPartition {
  double delta_e_layer = 0.0;
  std::vector<int> layers;  // L(j) = ceil((E_j - E_0)/delta), 1e-12 slack
};

LayerPartition layer_partition(const spectral::EigenSystem& eig, double delta_e_layer);
LayerPartition layer_partition(const Vector& energies, double delta_e_layer);

/// Smallest L with Pr_mu(L(J0) > L) <= eta.
int warm_start_radius(const Vector& mu, const LayerPartition& partition, double eta);

struct DriftReport {
  double p_min_achieved = 1.0;
  std::vector<int> violators;       // states below the requested threshold
  double requested_threshold = 0.0;
  double delta_e_layer = 0.0;
  std::vector<double> downhill_mass;  // per state j (0 for the ground row)
  std::vector<int> window;            // states examined
};

/// Downhill mass sum_{k: E_k <= E_j - delta} P_{j->k}, minimized over the
/// window (default: all excited states; otherwise states with mu > 1e-6).
DriftReport check_uniform_drift(const MarkovKernel& kernel, const Vector& energies,
                                double delta_e_layer, double requested_threshold = 0.0,
                                const std::optional<Vector>& window_mu = std::nullopt,
                                double window_population = 1e-6);

struct HittingStats {
  std::vector<std::uint64_t> samples;  // tau_0 draws
  std::uint64_t seed = 0;
  std::size_t capped = 0;              // trajectories cut at the step cap
  Vector initial_law;

  double empirical_tail(double t) const;  // Pr(tau_0 > t)
};

HittingStats simulate_hitting(const MarkovKernel& kernel, const Vector& mu,
                              std::size_t n_samples, std::uint64_t seed,
                              std::uint64_t step_cap = 1'000'000);

struct TailBoundReport {
  std::uint64_t t_star = 0;
  double bound = 0.0;           // eta + epsilon
  double empirical = 0.0;       // Pr(tau_0 > t*)
  double ci_low = 0.0;          // 95% Wilson interval
  double ci_high = 0.0;
  bool pass = false;            // empirical consistent with the bound
};

/// t* = ceil(2 L_mu / p_min + (8/p_min) ln(1/epsilon)); the report compares
/// the empirical tail against eta + epsilon.
TailBoundReport verify_tail_bound(const HittingStats& stats, int l_mu, double p_min, double eta,
                                  double epsilon);

/// ceil((2/p_min) ceil(c_E N_o / delta) + (8/p_min) ln(1/epsilon)).
std::uint64_t linear_cooling_budget(double c_e, int n_o, double delta_e_layer, double p_min,
                                    double epsilon);

/// Exact absorption-time CDF by repeated kernel application (small chains).
std::vector<double> absorption_cdf(const MarkovKernel& kernel, const Vector& mu, std::size_t t_max);

double kolmogorov_smirnov(const HittingStats& stats, const std::vector<double>& exact_cdf);

struct TransitionGraph {
  double threshold = 0.0;
  std::vector<std::array<double, 3>> edges;  // (from j, to k, probability)
  std::vector<int> unreachable;              // excited nodes with no downhill path to 0
  int longest_path = 0;                      // max over reachable nodes of hops to ground
};

TransitionGraph threshold_graph(const MarkovKernel& kernel, double threshold);

int longest_downhill_path(const MarkovKernel& kernel, double threshold);

std::string export_dot(const TransitionGraph& graph, const Vector& energies);
std::string export_json(const TransitionGraph& graph, const Vector& energies,
                        const LayerPartition& partition);

}  // namespace pathcool::markov
