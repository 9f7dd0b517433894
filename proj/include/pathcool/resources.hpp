#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathcool/types.hpp"

namespace pathcool::resources {

enum class Method { QPE, DAS, PR, DC, DISS };

Method method_from_string(const std::string& name);
std::string to_string(Method m);

struct ComplexityInputs {
  double h_norm = 1.0;     // ||H|| (hartree)
  double delta_min = 0.1;  // minimum gap (hartree)
  double eps_e = 1e-3;     // target energy error (hartree)
  int n_o = 4;             // orbital count
  double p0 = 1.0;         // QPE initial squared overlap
  double p_succ = 0.5;     // PR per-attempt success probability
  double c_dk = -1.0;      // optional C_DK override (< 0: use N_o/delta_min)
  double d_eff = -1.0;     // DC effective dimension (< 0: use N_o)
  double poly_exponent = 1.0;  // poly(N_o) exponent for QPE/DAS/PR/DC

  void validate() const;
};

/// Constant-free scaling comparator for the bracketed complexity expressions.
/// DISS carries its stated N_o^3; the other methods use poly_exponent.
double gate_complexity(Method method, const ComplexityInputs& in);

enum class LogBase { Natural, Two, Ten };

/// ceil(2 N_omega (pi ||H|| / 2 + log(1/eps))).
std::uint64_t n_uh_calls(int n_omega, double h_norm, double qsvt_eps,
                         LogBase base = LogBase::Natural);

struct CostModel {
  int n_omega = 1000;
  double qsvt_eps = 1e-3;
  std::uint64_t cost_uh = 0;  // Toffolis per block-encoding call
  int t_per_rz = 50;
  int n_h = 32;
  int n_t = 50;
  int rz_per_kick = 3;
};

struct TotalCost {
  unsigned long long toffoli = 0;  // N_H * N_T * N_UH * Cost(U_H)
  long double toffoli_ld = 0.0;    // same product without overflow concerns
  unsigned long long kick_t_gates = 0;  // reported separately
};

TotalCost total_cost(const CostModel& model, std::uint64_t n_uh);

std::uint64_t kick_t_cost(int n_omega, int t_per_rz, int rz_per_kick = 3);

struct SystemFixture {
  std::string name;
  int electrons = 0;
  int orbitals = 0;
  int qubits = 0;
  double toffoli_w = 0.0;
  double toffoli_qpe = 0.0;
};

/// The bundled benchmark table, exactly as shipped in data/.
std::vector<SystemFixture> table2_fixtures();

struct FixtureRatio {
  std::string name;
  double w_over_qpe = 0.0;
};

std::vector<FixtureRatio> fixture_ratios();

/// Arrhenius rate multiplier exp(err / (k_B T)), with k_B T pinned to
/// 0.6 kcal/mol at 298 K and linear in T.
double rate_ratio(double barrier_error_kcal, double temperature_k);

inline constexpr double kKcalPerMolPerMha = 1.0 / 1.6;  // 1 kcal/mol ~ 1.6 mHa

}  // namespace pathcool::resources
