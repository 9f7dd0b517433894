#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pathcool/lindblad.hpp"
#include "pathcool/path.hpp"

namespace pathcool::config {

enum class MeshPolicy { Uniform, EqualMass };

struct RunConfig {
  path::ReactionPathSpec path_spec;
  bool end_at_square = true;  // H4: override s_end with the exact-square coordinate
  bool force_ts_half = false; // use s* = 0.5 instead of the exact square

  MeshPolicy mesh_policy = MeshPolicy::Uniform;
  int n_points = 32;
  double eps_e = 1.6e-3;       // equal-mass sizing target
  int profile_points = 65;
  double safety_c = 1.0;

  lindblad::FilterSpec filter = lindblad::IdealStep{};
  lindblad::JumpConfig jumps;

  double tau = 0.01;
  std::vector<int> n_t_values = {50};
  lindblad::Stepper stepper = lindblad::Stepper::Exact;
  std::uint64_t seed = 1;

  double delta_e_layer = -1.0;   // < 0: use the local spectral gap
  double graph_threshold = 0.01;
  std::size_t n_samples = 100000;
  double epsilon = 0.01;
  double eta = 0.05;
  int markov_point = -1;         // mesh index for kernel analysis; -1 = last

  std::string out_dir = "out";
};

/// Parse + validate a JSON config; unknown keys and invalid values throw
/// InvalidInputError naming the field.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

std::string default_config_json();

/// Resolved s_end (exact square / forced 0.5 / explicit value).
double resolve_s_end(const RunConfig& cfg);

}  // namespace pathcool::config
