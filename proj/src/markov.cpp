#include "pathcool/markov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <sstream>

#include "pathcool/rng.hpp"

namespace pathcool::markov {

void MarkovKernel::validate() const {
  if (p.rows() != p.cols()) throw ContractError("MarkovKernel: non-square");
  for (Eigen::Index j = 0; j < p.rows(); ++j) {
    if (p.row(j).minCoeff() < 0.0) throw ContractError("MarkovKernel: negative entry");
    if (std::abs(p.row(j).sum() - 1.0) > 1e-12)
      throw ContractError("MarkovKernel: row " + std::to_string(j) + " sums to " +
                          std::to_string(p.row(j).sum()));
  }
  if (absorbing && (p(0, 0) != 1.0 || p.row(0).sum() != 1.0))
    throw ContractError("MarkovKernel: ground row not absorbing");
}

MarkovKernel kernel_from_jumps(const std::vector<lindblad::FilteredJump>& jumps,
                               const spectral::EigenSystem& eig) {
  if (jumps.empty()) throw InvalidInputError("kernel_from_jumps: empty jump set");
  const Eigen::Index d = eig.dim();
  MarkovKernel out;
  out.gamma = Matrix::Zero(d, d);
  for (const auto& jump : jumps) {
    if (jump.K.rows() != d) throw DimensionError("kernel_from_jumps: jump dimension mismatch");
    out.gamma += jump.K.cwiseAbs2();  // Gamma_{j->k} = sum_a |<k|K_a|j>|^2 = sum_a |K_(k,j)|^2
  }
  // gamma stored with (row j = source): transpose of the matrix-element layout
  out.gamma.transposeInPlace();

  out.p = Matrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double total = out.gamma.row(j).sum();
    if (total <= 0.0)
      out.p(j, j) = 1.0;  // a state the dissipator cannot move stays put
    else
      out.p.row(j) = out.gamma.row(j) / total;
  }
  out.p.row(0).setZero();
  out.p(0, 0) = 1.0;  // ground row forced absorbing
  out.absorbing = true;
  return out;
}

LayerPartition layer_partition(const Vector& energies, double delta_e_layer) {
  if (delta_e_layer <= 0.0) throw InvalidInputError("layer_partition: delta_e_layer must be > 0");
  LayerPartition part;
  part.delta_e_layer = delta_e_layer;
  part.layers.resize(energies.size());
  const double e0 = energies(0);
  for (Eigen::Index j = 0; j < energies.size(); ++j) {
    const double x = (energies(j) - e0) / delta_e_layer;
    part.layers[j] = std::max(0, static_cast<int>(std::ceil(x - 1e-12)));
  }
  return part;
}

LayerPartition layer_partition(const spectral::EigenSystem& eig, double delta_e_layer) {
  return layer_partition(eig.energies, delta_e_layer);
}

int warm_start_radius(const Vector& mu, const LayerPartition& partition, double eta) {
  if (static_cast<std::size_t>(mu.size()) != partition.layers.size())
    throw DimensionError("warm_start_radius: size mismatch");
  if (eta <= 0.0 || eta >= 1.0) throw InvalidInputError("warm_start_radius: eta in (0,1)");
  const int l_max = *std::max_element(partition.layers.begin(), partition.layers.end());
  for (int l = 0; l <= l_max; ++l) {
    double overflow = 0.0;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      if (partition.layers[j] > l) overflow += mu(j);
    if (overflow <= eta) return l;
  }
  return l_max;
}

DriftReport check_uniform_drift(const MarkovKernel& kernel, const Vector& energies,
                                double delta_e_layer, double requested_threshold,
                                const std::optional<Vector>& window_mu,
                                double window_population) {
  if (kernel.dim() != energies.size())
    throw DimensionError("check_uniform_drift: kernel/energy size mismatch");
  if (delta_e_layer <= 0.0)
    throw InvalidInputError("check_uniform_drift: delta_e_layer must be > 0");

  DriftReport report;
  report.delta_e_layer = delta_e_layer;
  report.requested_threshold = requested_threshold;
  report.downhill_mass.assign(kernel.dim(), 0.0);

  for (Eigen::Index j = 1; j < kernel.dim(); ++j) {
    if (window_mu && (*window_mu)(j) <= window_population) continue;
    report.window.push_back(static_cast<int>(j));
    double mass = 0.0;
    for (Eigen::Index k = 0; k < kernel.dim(); ++k)
      if (energies(k) <= energies(j) - delta_e_layer + 1e-12) mass += kernel.p(j, k);
    report.downhill_mass[j] = mass;
    report.p_min_achieved = std::min(report.p_min_achieved, mass);
    if (mass < requested_threshold) report.violators.push_back(static_cast<int>(j));
  }
  if (report.window.empty()) report.p_min_achieved = 0.0;
  return report;
}

double HittingStats::empirical_tail(double t) const {
  if (samples.empty()) return 0.0;
  std::size_t over = 0;
  for (auto s : samples)
    if (static_cast<double>(s) > t) ++over;
  return static_cast<double>(over) / static_cast<double>(samples.size());
}

HittingStats simulate_hitting(const MarkovKernel& kernel, const Vector& mu,
                              std::size_t n_samples, std::uint64_t seed,
                              std::uint64_t step_cap) {
  kernel.validate();
  if (!kernel.absorbing || kernel.p(0, 0) != 1.0)
    throw ContractError("simulate_hitting: kernel must absorb at state 0");
  if (n_samples < 1) throw InvalidInputError("simulate_hitting: need n_samples >= 1");
  if (mu.size() != kernel.dim() || std::abs(mu.sum() - 1.0) > 1e-9 || mu.minCoeff() < 0.0)
    throw InvalidInputError("simulate_hitting: mu must be a probability vector on the chain");

  const Eigen::Index d = kernel.dim();
  std::vector<double> mu_v(mu.data(), mu.data() + d);
  std::vector<std::vector<double>> rows(d);
  for (Eigen::Index j = 0; j < d; ++j) rows[j].assign(kernel.p.row(j).begin(), kernel.p.row(j).end());

  HittingStats stats;
  stats.seed = seed;
  stats.initial_law = mu;
  stats.samples.resize(n_samples);

  for (std::size_t n = 0; n < n_samples; ++n) {
    Rng rng = Rng::for_stream(seed, n);
    std::size_t state = rng.discrete(mu_v);
    std::uint64_t t = 0;
    while (state != 0 && t < step_cap) {
      state = rng.discrete(rows[state]);
      ++t;
    }
    if (state != 0) ++stats.capped;
    stats.samples[n] = t;
  }
  return stats;
}

TailBoundReport verify_tail_bound(const HittingStats& stats, int l_mu, double p_min, double eta,
                                  double epsilon) {
  if (p_min <= 0.0 || p_min > 1.0) throw InvalidInputError("verify_tail_bound: p_min in (0,1]");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw InvalidInputError("verify_tail_bound: epsilon in (0,1)");
  if (l_mu < 0) throw InvalidInputError("verify_tail_bound: l_mu must be >= 0");

  TailBoundReport rep;
  rep.t_star = static_cast<std::uint64_t>(
      std::ceil(2.0 * l_mu / p_min + 8.0 / p_min * std::log(1.0 / epsilon)));
  rep.bound = eta + epsilon;
  rep.empirical = stats.empirical_tail(static_cast<double>(rep.t_star));

  // Wilson 95% interval
  const double n = static_cast<double>(stats.samples.size());
  const double z = 1.959963984540054;
  const double phat = rep.empirical;
  const double denom = 1.0 + z * z / n;
  const double center = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  rep.ci_low = std::max(0.0, center - half);
  rep.ci_high = std::min(1.0, center + half);
  rep.pass = (phat <= rep.bound) || (rep.ci_low <= rep.bound);
  return rep;
}

std::uint64_t linear_cooling_budget(double c_e, int n_o, double delta_e_layer, double p_min,
                                    double epsilon) {
  if (c_e <= 0.0 || n_o <= 0 || delta_e_layer <= 0.0 || p_min <= 0.0 || epsilon <= 0.0 ||
      epsilon > 1.0)
    throw InvalidInputError("linear_cooling_budget: all inputs must be positive");
  const double layers = std::ceil(c_e * n_o / delta_e_layer);
  const double log_term = (epsilon >= 1.0) ? 0.0 : std::log(1.0 / epsilon);
  return static_cast<std::uint64_t>(std::ceil(2.0 / p_min * layers + 8.0 / p_min * log_term));
}

std::vector<double> absorption_cdf(const MarkovKernel& kernel, const Vector& mu,
                                   std::size_t t_max) {
  kernel.validate();
  Eigen::RowVectorXd dist = mu.transpose();
  std::vector<double> cdf;
  cdf.reserve(t_max + 1);
  cdf.push_back(dist(0));  // Pr(tau_0 <= 0)
  for (std::size_t t = 1; t <= t_max; ++t) {
    dist = dist * kernel.p;
    cdf.push_back(dist(0));
  }
  return cdf;
}

double kolmogorov_smirnov(const HittingStats& stats, const std::vector<double>& exact_cdf) {
  double ks = 0.0;
  const double n = static_cast<double>(stats.samples.size());
  std::vector<std::uint64_t> sorted = stats.samples;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t t = 0; t < exact_cdf.size(); ++t) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    const double emp = static_cast<double>(it - sorted.begin()) / n;
    ks = std::max(ks, std::abs(emp - exact_cdf[t]));
  }
  return ks;
}

TransitionGraph threshold_graph(const MarkovKernel& kernel, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0)
    throw InvalidInputError("threshold_graph: threshold in (0,1)");
  TransitionGraph g;
  g.threshold = threshold;
  const Eigen::Index d = kernel.dim();
  std::vector<std::vector<int>> incoming(d);  // incoming[k] = sources j with edge j->k
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < d; ++k) {
      if (j == k || kernel.p(j, k) < threshold) continue;
      g.edges.push_back({static_cast<double>(j), static_cast<double>(k), kernel.p(j, k)});
      incoming[k].push_back(static_cast<int>(j));
    }

  // BFS from ground along reversed edges gives hop counts to absorption
  std::vector<int> hops(d, -1);
  hops[0] = 0;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    const int k = queue.front();
    queue.pop_front();
    for (int j : incoming[k])
      if (hops[j] < 0) {
        hops[j] = hops[k] + 1;
        queue.push_back(j);
      }
  }
  for (Eigen::Index j = 1; j < d; ++j) {
    if (hops[j] < 0)
      g.unreachable.push_back(static_cast<int>(j));
    else
      g.longest_path = std::max(g.longest_path, hops[j]);
  }
  return g;
}

int longest_downhill_path(const MarkovKernel& kernel, double threshold) {
  return threshold_graph(kernel, threshold).longest_path;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string export_dot(const TransitionGraph& graph, const Vector& energies) {
  std::ostringstream out;
  out << "digraph cooling {\n  layout=circo;\n";
  const auto d = energies.size();
  for (Eigen::Index j = 0; j < d; ++j) {
    // circular layout hint in energy order
    const double angle = 2.0 * 3.14159265358979324 * static_cast<double>(j) / static_cast<double>(d);
    out << "  n" << j << " [label=\"E" << j << "\", energy=\"" << fmt(energies(j))
        << "\", pos=\"" << fmt(std::cos(angle)) << "," << fmt(std::sin(angle)) << "!\"];\n";
  }
  for (const auto& e : graph.edges)
    out << "  n" << static_cast<int>(e[0]) << " -> n" << static_cast<int>(e[1]) << " [weight=\""
        << fmt(e[2]) << "\"];\n";
  out << "}\n";
  return out.str();
}

std::string export_json(const TransitionGraph& graph, const Vector& energies,
                        const LayerPartition& partition) {
  std::ostringstream out;
  out << "{\n  \"threshold\": " << fmt(graph.threshold) << ",\n  \"longest_path\": "
      << graph.longest_path << ",\n  \"nodes\": [\n";
  for (Eigen::Index j = 0; j < energies.size(); ++j) {
    out << "    {\"index\": " << j << ", \"energy\": " << fmt(energies(j))
        << ", \"layer\": " << partition.layers[j] << "}";
    out << (j + 1 < energies.size() ? ",\n" : "\n");
  }
  out << "  ],\n  \"edges\": [\n";
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    out << "    {\"from\": " << static_cast<int>(graph.edges[e][0])
        << ", \"to\": " << static_cast<int>(graph.edges[e][1])
        << ", \"p\": " << fmt(graph.edges[e][2]) << "}";
    out << (e + 1 < graph.edges.size() ? ",\n" : "\n");
  }
  out << "  ],\n  \"unreachable\": [";
  for (std::size_t u = 0; u < graph.unreachable.size(); ++u)
    out << graph.unreachable[u] << (u + 1 < graph.unreachable.size() ? ", " : "");
  out << "]\n}\n";
  return out.str();
}

}  // namespace pathcool::markov
