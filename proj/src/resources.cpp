#include "pathcool/resources.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "pathcool/data_path.hpp"

namespace pathcool::resources {

Method method_from_string(const std::string& name) {
  if (name == "qpe" || name == "QPE") return Method::QPE;
  if (name == "das" || name == "DAS") return Method::DAS;
  if (name == "pr" || name == "PR") return Method::PR;
  if (name == "dc" || name == "DC") return Method::DC;
  if (name == "diss" || name == "DISS") return Method::DISS;
  throw InvalidInputError("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::QPE: return "QPE";
    case Method::DAS: return "DAS";
    case Method::PR: return "PR";
    case Method::DC: return "DC";
    case Method::DISS: return "DISS";
  }
  return "?";
}

void ComplexityInputs::validate() const {
  if (h_norm <= 0.0 || delta_min <= 0.0 || eps_e <= 0.0 || n_o <= 0)
    throw InvalidInputError("complexity inputs: h_norm, delta_min, eps_e, n_o must be positive");
  if (p0 <= 0.0 || p0 > 1.0) throw InvalidInputError("complexity inputs: p0 in (0,1]");
  if (p_succ <= 0.0 || p_succ > 1.0) throw InvalidInputError("complexity inputs: p_succ in (0,1]");
}

double gate_complexity(Method method, const ComplexityInputs& in) {
  in.validate();
  const double no = static_cast<double>(in.n_o);
  const double poly = std::pow(no, in.poly_exponent);
  const double d = in.delta_min;
  switch (method) {
    case Method::QPE:
      return in.h_norm / d / in.eps_e / in.p0 * poly;
    case Method::DAS:
      return std::pow(in.h_norm, 3) / std::pow(d, 5) / in.eps_e * poly;
    case Method::PR:
      if (in.p_succ >= 1.0)
        throw InvalidInputError("gate_complexity: PR diverges at p_succ = 1");
      return in.h_norm / std::pow(d, 3) / in.eps_e / (1.0 - in.p_succ) * poly;
    case Method::DC:
      return in.h_norm / std::pow(d, 3) / in.eps_e * poly;
    case Method::DISS:
      return in.h_norm / std::pow(d, 3) / in.eps_e * no * no * no;
  }
  throw InvalidInputError("gate_complexity: unknown method");
}

std::uint64_t n_uh_calls(int n_omega, double h_norm, double qsvt_eps, LogBase base) {
  if (n_omega < 1 || h_norm <= 0.0 || qsvt_eps <= 0.0 || qsvt_eps > 1.0)
    throw InvalidInputError("n_uh_calls: need n_omega >= 1, h_norm > 0, eps in (0,1]");
  double log_term = std::log(1.0 / qsvt_eps);
  if (base == LogBase::Two) log_term /= std::log(2.0);
  if (base == LogBase::Ten) log_term /= std::log(10.0);
  const double v = 2.0 * n_omega * (std::numbers::pi * h_norm / 2.0 + log_term);
  return static_cast<std::uint64_t>(std::ceil(v));
}

TotalCost total_cost(const CostModel& model, std::uint64_t n_uh) {
  if (model.n_h <= 0 || model.n_t <= 0 || model.cost_uh == 0)
    throw InvalidInputError("total_cost: n_h, n_t, cost_uh must be positive");
  TotalCost out;
  unsigned long long acc = static_cast<unsigned long long>(model.n_h);
  bool overflow = __builtin_mul_overflow(acc, static_cast<unsigned long long>(model.n_t), &acc);
  overflow |= __builtin_mul_overflow(acc, static_cast<unsigned long long>(n_uh), &acc);
  overflow |= __builtin_mul_overflow(acc, static_cast<unsigned long long>(model.cost_uh), &acc);
  out.toffoli_ld = static_cast<long double>(model.n_h) * model.n_t *
                   static_cast<long double>(n_uh) * static_cast<long double>(model.cost_uh);
  if (overflow) throw Error("total_cost: 64-bit overflow; use the long-double field");
  out.toffoli = acc;
  out.kick_t_gates = kick_t_cost(model.n_omega, model.t_per_rz, model.rz_per_kick);
  return out;
}

std::uint64_t kick_t_cost(int n_omega, int t_per_rz, int rz_per_kick) {
  if (n_omega < 1 || t_per_rz < 1 || rz_per_kick < 1)
    throw InvalidInputError("kick_t_cost: inputs must be positive");
  return static_cast<std::uint64_t>(2 * n_omega + 1) * rz_per_kick * t_per_rz;
}

std::vector<SystemFixture> table2_fixtures() {
  static const std::vector<SystemFixture> cached = [] {
    std::ifstream in(data_file("benchmark_systems.json"));
    if (!in) throw Error("cannot open bundled benchmark_systems.json");
    nlohmann::json doc = nlohmann::json::parse(in);
    std::vector<SystemFixture> out;
    for (const auto& row : doc.at("systems")) {
      SystemFixture f;
      f.name = row.at("name").get<std::string>();
      f.electrons = row.at("electrons").get<int>();
      f.orbitals = row.at("orbitals").get<int>();
      f.qubits = row.at("qubits").get<int>();
      f.toffoli_w = row.at("toffoli_w").get<double>();
      f.toffoli_qpe = row.at("toffoli_qpe").get<double>();
      out.push_back(std::move(f));
    }
    if (out.size() != 8) throw Error("benchmark_systems.json: expected 8 rows");
    return out;
  }();
  return cached;
}

std::vector<FixtureRatio> fixture_ratios() {
  std::vector<FixtureRatio> out;
  for (const auto& f : table2_fixtures()) out.push_back({f.name, f.toffoli_w / f.toffoli_qpe});
  return out;
}

double rate_ratio(double barrier_error_kcal, double temperature_k) {
  if (temperature_k <= 0.0) throw InvalidInputError("rate_ratio: temperature must be > 0");
  const double kbt = 0.6 * temperature_k / 298.0;  // kcal/mol
  return std::exp(barrier_error_kcal / kbt);
}

}  // namespace pathcool::resources
