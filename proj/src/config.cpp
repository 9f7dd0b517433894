#include "pathcool/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace pathcool::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& scope,
                    const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw InvalidInputError("config: unknown key '" + scope + "." + it.key() + "'");
}

double require_positive(const json& obj, const std::string& scope, const std::string& key,
                        double fallback) {
  if (!obj.contains(key)) return fallback;
  const double v = obj.at(key).get<double>();
  if (!(v > 0.0)) throw InvalidInputError("config: " + scope + "." + key + " must be > 0");
  return v;
}

}  // namespace

double resolve_s_end(const RunConfig& cfg) {
  if (!cfg.path_spec.is_h4() || !cfg.end_at_square) return cfg.path_spec.s_end;
  if (cfg.force_ts_half) return 0.5;
  return path::h4_square_coordinate(std::get<path::H4Rectangle>(cfg.path_spec.kind));
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInputError(std::string("config: JSON parse failure: ") + e.what());
  }
  reject_unknown(doc, "", {"path", "mesh", "filter", "jumps", "evolve", "markov", "output"});

  RunConfig cfg;

  if (doc.contains("path")) {
    const auto& p = doc["path"];
    reject_unknown(p, "path",
                   {"kind", "a_angstrom", "lambda_min", "lambda_max", "s_start", "s_end",
                    "end_at_square", "force_ts_half", "n_electrons", "fcidump_files"});
    const std::string kind = p.value("kind", "h4_rectangle");
    if (kind == "h4_rectangle") {
      path::H4Rectangle rect;
      rect.a_angstrom = require_positive(p, "path", "a_angstrom", rect.a_angstrom);
      rect.lambda_min = require_positive(p, "path", "lambda_min", rect.lambda_min);
      rect.lambda_max = require_positive(p, "path", "lambda_max", rect.lambda_max);
      if (rect.lambda_min >= rect.lambda_max)
        throw InvalidInputError("config: path.lambda_min must be < path.lambda_max");
      cfg.path_spec.kind = rect;
    } else if (kind == "fcidump_sequence") {
      path::FcidumpSequence seq;
      if (!p.contains("fcidump_files"))
        throw InvalidInputError("config: path.fcidump_files required for fcidump_sequence");
      for (const auto& f : p.at("fcidump_files")) seq.files.push_back(f.get<std::string>());
      cfg.path_spec.kind = seq;
      cfg.end_at_square = false;
    } else {
      throw InvalidInputError("config: path.kind must be h4_rectangle or fcidump_sequence");
    }
    cfg.path_spec.s_start = p.value("s_start", 0.0);
    if (p.contains("s_end")) {
      cfg.path_spec.s_end = p.at("s_end").get<double>();
      cfg.end_at_square = false;
    }
    cfg.end_at_square = p.value("end_at_square", cfg.end_at_square);
    cfg.force_ts_half = p.value("force_ts_half", false);
    cfg.path_spec.n_electrons = p.value("n_electrons", 4);
    if (cfg.path_spec.n_electrons < 0)
      throw InvalidInputError("config: path.n_electrons must be >= 0");
  }

  if (doc.contains("mesh")) {
    const auto& m = doc["mesh"];
    reject_unknown(m, "mesh", {"policy", "n_points", "eps_e", "profile_points", "safety_c"});
    const std::string policy = m.value("policy", "uniform");
    if (policy == "uniform")
      cfg.mesh_policy = MeshPolicy::Uniform;
    else if (policy == "equal_mass")
      cfg.mesh_policy = MeshPolicy::EqualMass;
    else
      throw InvalidInputError("config: mesh.policy must be uniform or equal_mass");
    if (m.contains("n_points")) {
      cfg.n_points = m.at("n_points").get<int>();
      if (cfg.n_points < 2) throw InvalidInputError("config: mesh.n_points must be >= 2");
    }
    cfg.eps_e = require_positive(m, "mesh", "eps_e", cfg.eps_e);
    if (m.contains("profile_points")) {
      cfg.profile_points = m.at("profile_points").get<int>();
      if (cfg.profile_points < 3)
        throw InvalidInputError("config: mesh.profile_points must be >= 3");
    }
    cfg.safety_c = require_positive(m, "mesh", "safety_c", cfg.safety_c);
  }

  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    reject_unknown(f, "filter", {"kind", "n_omega", "omega", "alpha", "t_support", "m_s"});
    const std::string kind = f.value("kind", "ideal");
    if (kind == "ideal") {
      cfg.filter = lindblad::IdealStep{};
    } else if (kind == "square_wave") {
      lindblad::SquareWave sw;
      if (f.contains("n_omega")) sw.n_omega = f.at("n_omega").get<int>();
      sw.omega = require_positive(f, "filter", "omega", sw.omega);
      if (sw.n_omega < 1) throw InvalidInputError("config: filter.n_omega must be >= 1");
      cfg.filter = sw;
    } else if (kind == "gevrey") {
      lindblad::Gevrey gv;
      gv.alpha = require_positive(f, "filter", "alpha", gv.alpha);
      if (gv.alpha <= 1.0) throw InvalidInputError("config: filter.alpha must be > 1");
      gv.t_support = require_positive(f, "filter", "t_support", gv.t_support);
      if (f.contains("m_s")) gv.m_s = f.at("m_s").get<int>();
      if (gv.m_s < 3) throw InvalidInputError("config: filter.m_s must be >= 3");
      cfg.filter = gv;
    } else {
      throw InvalidInputError("config: filter.kind must be ideal, square_wave or gevrey");
    }
  }

  if (doc.contains("jumps")) {
    const auto& j = doc["jumps"];
    reject_unknown(j, "jumps", {"pairs", "flavor_x", "flavor_y", "scale"});
    const std::string pairs = j.value("pairs", "all");
    if (pairs == "all")
      cfg.jumps.pairs = lindblad::JumpConfig::Pairs::All;
    else if (pairs == "same_spin")
      cfg.jumps.pairs = lindblad::JumpConfig::Pairs::SameSpin;
    else
      throw InvalidInputError("config: jumps.pairs must be all or same_spin");
    cfg.jumps.flavor_x = j.value("flavor_x", true);
    cfg.jumps.flavor_y = j.value("flavor_y", true);
    cfg.jumps.scale = require_positive(j, "jumps", "scale", cfg.jumps.scale);
  }

  if (doc.contains("evolve")) {
    const auto& e = doc["evolve"];
    reject_unknown(e, "evolve", {"tau", "n_t", "stepper", "seed", "initial"});
    cfg.tau = require_positive(e, "evolve", "tau", cfg.tau);
    if (e.contains("n_t")) {
      cfg.n_t_values.clear();
      if (e.at("n_t").is_array())
        for (const auto& v : e.at("n_t")) cfg.n_t_values.push_back(v.get<int>());
      else
        cfg.n_t_values.push_back(e.at("n_t").get<int>());
      for (int v : cfg.n_t_values)
        if (v < 1) throw InvalidInputError("config: evolve.n_t entries must be >= 1");
    }
    const std::string stepper = e.value("stepper", "exact");
    if (stepper == "exact")
      cfg.stepper = lindblad::Stepper::Exact;
    else if (stepper == "strang")
      cfg.stepper = lindblad::Stepper::Strang;
    else if (stepper == "qdrift")
      cfg.stepper = lindblad::Stepper::Qdrift;
    else
      throw InvalidInputError("config: evolve.stepper must be exact, strang or qdrift");
    if (e.contains("seed")) cfg.seed = e.at("seed").get<std::uint64_t>();
  }

  if (doc.contains("markov")) {
    const auto& m = doc["markov"];
    reject_unknown(m, "markov", {"delta_e_layer", "threshold", "n_samples", "epsilon", "eta",
                                 "point", "synthetic_chain"});
    if (m.contains("delta_e_layer")) {
      if (m.at("delta_e_layer").is_string()) {
        if (m.at("delta_e_layer").get<std::string>() != "gap")
          throw InvalidInputError("config: markov.delta_e_layer must be a number or \"gap\"");
        cfg.delta_e_layer = -1.0;
      } else {
        cfg.delta_e_layer = m.at("delta_e_layer").get<double>();
        if (!(cfg.delta_e_layer > 0.0))
          throw InvalidInputError("config: markov.delta_e_layer must be > 0");
      }
    }
    if (m.contains("threshold")) {
      cfg.graph_threshold = m.at("threshold").get<double>();
      if (cfg.graph_threshold <= 0.0 || cfg.graph_threshold >= 1.0)
        throw InvalidInputError("config: markov.threshold must lie in (0,1)");
    }
    if (m.contains("n_samples")) {
      const auto v = m.at("n_samples").get<long long>();
      if (v < 1) throw InvalidInputError("config: markov.n_samples must be >= 1");
      cfg.n_samples = static_cast<std::size_t>(v);
    }
    if (m.contains("epsilon")) {
      cfg.epsilon = m.at("epsilon").get<double>();
      if (cfg.epsilon <= 0.0 || cfg.epsilon >= 1.0)
        throw InvalidInputError("config: markov.epsilon must lie in (0,1)");
    }
    if (m.contains("eta")) {
      cfg.eta = m.at("eta").get<double>();
      if (cfg.eta <= 0.0 || cfg.eta >= 1.0)
        throw InvalidInputError("config: markov.eta must lie in (0,1)");
    }
    if (m.contains("point")) cfg.markov_point = m.at("point").get<int>();
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    reject_unknown(o, "output", {"dir"});
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
  }

  // cross-field checks
  if (cfg.stepper == lindblad::Stepper::Strang &&
      !std::holds_alternative<lindblad::SquareWave>(cfg.filter))
    throw InvalidInputError("config: evolve.stepper=strang requires filter.kind=square_wave");

  cfg.path_spec.s_end = resolve_s_end(cfg);
  cfg.path_spec.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string default_config_json() {
  return R"({
  "path": {
    "kind": "h4_rectangle",
    "a_angstrom": 1.2,
    "lambda_min": 0.6,
    "lambda_max": 1.6,
    "s_start": 0.0,
    "end_at_square": true,
    "force_ts_half": false,
    "n_electrons": 4
  },
  "mesh": {
    "policy": "uniform",
    "n_points": 32,
    "eps_e": 0.0016,
    "profile_points": 65,
    "safety_c": 1.0
  },
  "filter": {
    "kind": "ideal"
  },
  "jumps": {
    "pairs": "all",
    "flavor_x": true,
    "flavor_y": true,
    "scale": 1.0
  },
  "evolve": {
    "tau": 0.01,
    "n_t": [1, 5, 10, 50],
    "stepper": "exact",
    "seed": 1
  },
  "markov": {
    "delta_e_layer": "gap",
    "threshold": 0.01,
    "n_samples": 100000,
    "epsilon": 0.01,
    "eta": 0.05,
    "point": -1
  },
  "output": {
    "dir": "out"
  }
})";
}

}  // namespace pathcool::config
