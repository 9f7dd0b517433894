#include "pathcool/path.hpp"

#include <algorithm>
#include <cmath>

namespace pathcool::path {

void ReactionPathSpec::validate() const {
  if (s_start < 0.0 || s_end > 1.0 || s_start >= s_end)
    throw InvalidInputError("path spec: need 0 <= s_start < s_end <= 1");
  if (const auto* rect = std::get_if<H4Rectangle>(&kind)) {
    if (rect->a_angstrom <= 0.0) throw InvalidInputError("path spec: side length a must be > 0");
    if (rect->lambda_min <= 0.0 || rect->lambda_max <= 0.0)
      throw InvalidInputError("path spec: lambda_min and lambda_max must be > 0");
    if (rect->lambda_min >= rect->lambda_max)
      throw InvalidInputError("path spec: lambda_min must be < lambda_max");
  } else {
    if (std::get<FcidumpSequence>(kind).files.size() < 2)
      throw InvalidInputError("path spec: fcidump sequence needs at least two files");
  }
  if (n_electrons < 0) throw InvalidInputError("path spec: negative electron count");
}

chem::Geometry h4_geometry(double s, double a_angstrom, double lambda_min, double lambda_max) {
  if (s < 0.0 || s > 1.0) throw InvalidInputError("h4_geometry: s outside [0,1]");
  const double lambda = std::pow(lambda_min, 1.0 - s) * std::pow(lambda_max, s);
  const double x = a_angstrom / std::sqrt(lambda) * kAngstromToBohr;
  const double y = a_angstrom * std::sqrt(lambda) * kAngstromToBohr;
  chem::Geometry g;
  for (double sx : {+1.0, -1.0})
    for (double sy : {+1.0, -1.0})
      g.atoms.push_back({"H", 1, {sx * x / 2.0, sy * y / 2.0, 0.0}});
  return g;
}

double h4_square_coordinate(const H4Rectangle& rect) {
  return std::log(1.0 / rect.lambda_min) / std::log(rect.lambda_max / rect.lambda_min);
}

const spectral::EigenSystem& PathPoint::eig() const {
  if (!eig_) eig_ = spectral::eigendecompose(H);
  return *eig_;
}

void invalidate_eig(PathPoint& p) { p.eig_.reset(); }

namespace {

void rebuild_electronic(PathPoint& p) {
  p.mo = chem::transform_to_mo(p.ints, p.scf.C);
  auto space = fock::enumerate_determinants(2 * p.mo.n_orb, p.n_electrons);
  p.H = fock::build_hamiltonian(p.mo, space);
  invalidate_eig(p);
}

}  // namespace

PathPoint build_point(const ReactionPathSpec& spec, double s) {
  spec.validate();
  PathPoint p;
  p.s = s;
  p.n_electrons = spec.n_electrons;
  if (const auto* rect = std::get_if<H4Rectangle>(&spec.kind)) {
    p.geometry = h4_geometry(s, rect->a_angstrom, rect->lambda_min, rect->lambda_max);
    p.basis = chem::build_sto3g_basis(p.geometry);
    p.ints = chem::compute_integrals(p.basis, p.geometry);
    p.scf = chem::run_rhf(p.ints, spec.n_electrons, spec.scf);
    rebuild_electronic(p);
  } else {
    const auto& seq = std::get<FcidumpSequence>(spec.kind);
    const double t = (s - spec.s_start) / (spec.s_end - spec.s_start);
    const auto idx = static_cast<std::size_t>(
        std::clamp(std::lround(t * (static_cast<double>(seq.files.size()) - 1.0)),
                   long{0}, static_cast<long>(seq.files.size() - 1)));
    auto data = chem::read_fcidump(seq.files[idx]);
    p.mo = std::move(data.mo);
    p.n_electrons = data.n_electrons;
    auto space = fock::enumerate_determinants(2 * p.mo.n_orb, p.n_electrons);
    p.H = fock::build_hamiltonian(p.mo, space);
  }
  return p;
}

PrincipalAngles overlap_from_principal_angles(const Matrix& m_occ) {
  if (m_occ.rows() != m_occ.cols())
    throw DimensionError("overlap_from_principal_angles: M_occ must be square");
  Eigen::JacobiSVD<Matrix> svd(m_occ);
  PrincipalAngles out;
  out.sigma = svd.singularValues();
  out.overlap_sq = 1.0;
  for (Eigen::Index i = 0; i < out.sigma.size(); ++i) {
    double sv = out.sigma(i);
    if (sv > 1.0 + 1e-8)
      throw Error("overlap_from_principal_angles: singular value " + std::to_string(sv) +
                  " exceeds 1 (inputs are not subspace overlaps)");
    sv = std::clamp(sv, 0.0, 1.0);
    out.sigma(i) = sv;
    out.overlap_sq *= sv * sv;
  }
  return out;
}

namespace {

// Procrustes rotation: returns R such that C_k <- C_k R best aligns with the
// successor block (M R is Hermitian PSD, maximizing the aligned trace).
Matrix procrustes_rotation(const Matrix& m, int pair_index, const char* block) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-8)
    throw GaugeError(std::string("align_gauge: ") + block + " cross overlap rank-deficient at pair (" +
                     std::to_string(pair_index) + "," + std::to_string(pair_index + 1) + ")");
  return svd.matrixV() * svd.matrixU().transpose();
}

}  // namespace

AlignmentReport align_gauge(std::vector<PathPoint>& points) {
  if (points.size() < 2) throw InvalidInputError("align_gauge: need at least two points");
  for (const auto& p : points)
    if (p.scf.C.size() == 0 || !p.scf.converged)
      throw InvalidInputError("align_gauge: every point needs a converged SCF");

  AlignmentReport report;
  report.pairs.resize(points.size() - 1);

  // pre-alignment FCI ground overlaps in the shared determinant basis
  for (std::size_t k = 0; k + 1 < points.size(); ++k)
    report.pairs[k].fci_overlap_unaligned =
        spectral::ground_overlap(points[k].eig(), points[k + 1].eig());

  // occupied-subspace principal angles between the as-converged mean-field
  // solutions (gauge-invariant diagnostics, evaluated before any rotation)
  std::vector<Matrix> original_c;
  original_c.reserve(points.size());
  for (const auto& p : points) original_c.push_back(p.scf.C);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    auto& pair = report.pairs[k];
    pair.k = static_cast<int>(k);
    const int n_occ = points[k].scf.n_occ;
    if (n_occ > 0) {
      const Matrix s_cross = chem::cross_overlap(points[k + 1].basis, points[k].basis);
      const Matrix m_occ = original_c[k + 1].leftCols(n_occ).transpose() * s_cross *
                           original_c[k].leftCols(n_occ);
      if (Eigen::JacobiSVD<Matrix>(m_occ).singularValues().minCoeff() < 1e-8)
        throw GaugeError("align_gauge: occupied cross overlap rank-deficient at pair (" +
                         std::to_string(k) + "," + std::to_string(k + 1) + ")");
      auto pa = overlap_from_principal_angles(m_occ);
      pair.sigma = pa.sigma;
      pair.overlap_sq = pa.overlap_sq;
    } else {
      pair.overlap_sq = 1.0;
    }
  }

  // Backward gauge sweep on the whole orbital set.  Rotating all orbitals in
  // one Procrustes step (occupied and virtual may mix) keeps the
  // second-quantized Hamiltonian continuous even where the mean-field
  // occupied/virtual split is discontinuous (degenerate frontier orbitals at
  // the transition state); FCI spectra are invariant under the rotation.
  for (int k = static_cast<int>(points.size()) - 2; k >= 0; --k) {
    PathPoint& cur = points[k];
    const PathPoint& next = points[k + 1];
    const Matrix s_cross = chem::cross_overlap(next.basis, cur.basis);
    const Matrix m_full = next.scf.C.transpose() * s_cross * cur.scf.C;
    cur.scf.C = cur.scf.C * procrustes_rotation(m_full, k, "orbital-set");
    rebuild_electronic(cur);
  }

  for (std::size_t k = 0; k + 1 < points.size(); ++k)
    report.pairs[k].fci_overlap_aligned =
        spectral::ground_overlap(points[k].eig(), points[k + 1].eig());
  return report;
}

double dk_density_from(const CMatrix& h_minus, const CMatrix& h_plus, double gap, double ds) {
  if (gap <= 1e-10) throw GapClosureError("dk_density: spectral gap closed (Delta <= 1e-10)");
  return spectral_norm(h_plus - h_minus) / (2.0 * ds * gap);
}

namespace {

double dk_density_once(const ReactionPathSpec& spec, double s, double ds) {
  if (s - ds < 0.0 || s + ds > 1.0)
    throw InvalidInputError("dk_density: s +- ds leaves [0,1]");
  std::vector<PathPoint> triple;
  triple.push_back(build_point(spec, s - ds));
  triple.push_back(build_point(spec, s));
  triple.push_back(build_point(spec, s + ds));
  align_gauge(triple);
  const double gap = triple[1].eig().energies(1) - triple[1].eig().energies(0);
  return dk_density_from(triple[0].H.m, triple[2].H.m, gap, ds);
}

}  // namespace

double dk_density(const ReactionPathSpec& spec, double s, double ds) {
  double g_coarse = dk_density_once(spec, s, ds);
  for (int halvings = 0; halvings < 3; ++halvings) {
    ds /= 2.0;
    double g_fine = dk_density_once(spec, s, ds);
    if (std::abs(g_fine - g_coarse) <= 0.01 * std::max(std::abs(g_fine), 1e-300)) return g_fine;
    g_coarse = g_fine;
  }
  return g_coarse;
}

double compute_cdk(const std::vector<double>& s, const std::vector<double>& g) {
  if (s.size() != g.size() || s.size() < 3)
    throw InvalidInputError("compute_cdk: need >= 3 matched samples");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] <= s[i - 1]) throw InvalidInputError("compute_cdk: samples must be increasing");
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    acc += 0.5 * (g[i] + g[i - 1]) * (s[i] - s[i - 1]);
  return acc;
}

DKProfile build_profile(const ReactionPathSpec& spec, int n_samples,
                        std::vector<PathPoint>* keep_points) {
  spec.validate();
  if (n_samples < 3) throw InvalidInputError("build_profile: need >= 3 samples");

  std::vector<PathPoint> pts;
  pts.reserve(n_samples);
  const double h = (spec.s_end - spec.s_start) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i)
    pts.push_back(build_point(spec, spec.s_start + h * i));
  if (spec.is_h4()) align_gauge(pts);

  DKProfile prof;
  prof.ds_fd = h;
  prof.s.resize(n_samples);
  prof.g.resize(n_samples);
  prof.e0.resize(n_samples);
  prof.gap.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    prof.s[i] = pts[i].s;
    prof.e0[i] = pts[i].eig().energies(0);
    prof.gap[i] = pts[i].eig().energies(1) - pts[i].eig().energies(0);
  }
  for (int i = 0; i < n_samples; ++i) {
    const int lo = std::max(0, i - 1), hi = std::min(n_samples - 1, i + 1);
    prof.g[i] =
        dk_density_from(pts[lo].H.m, pts[hi].H.m, prof.gap[i], (prof.s[hi] - prof.s[lo]) / 2.0);
  }
  prof.c_dk = compute_cdk(prof.s, prof.g);

  // whole-matrix Lipschitz constant over all sample pairs
  double l_h = 0.0;
  for (int i = 0; i < n_samples; ++i)
    for (int j = i + 1; j < n_samples; ++j)
      l_h = std::max(l_h, spectral_norm(pts[j].H.m - pts[i].H.m) / (prof.s[j] - prof.s[i]));
  prof.l_h = l_h;

  if (keep_points) *keep_points = std::move(pts);
  return prof;
}

int choose_nh(double c_dk, double eps_e, double safety_c) {
  if (eps_e <= 0.0) throw InvalidInputError("choose_nh: eps_e must be > 0");
  if (c_dk < 0.0 || safety_c <= 0.0) throw InvalidInputError("choose_nh: bad inputs");
  return std::max(2, static_cast<int>(std::ceil(safety_c * c_dk * c_dk / eps_e)));
}

namespace {

PathMesh mesh_from_coordinates(const ReactionPathSpec& spec, const std::vector<double>& coords,
                               DKProfile profile) {
  PathMesh mesh;
  mesh.dk = std::move(profile);
  mesh.points.reserve(coords.size());
  for (double s : coords) mesh.points.push_back(build_point(spec, s));
  if (spec.is_h4()) mesh.alignment = align_gauge(mesh.points);
  return mesh;
}

}  // namespace

PathMesh equal_mass_mesh(const ReactionPathSpec& spec, const DKProfile& profile, int n_points) {
  if (n_points < 2) throw InvalidInputError("equal_mass_mesh: need >= 2 points");
  const auto n_samples = profile.s.size();
  if (static_cast<std::size_t>(n_points) > n_samples)
    throw ResolutionError("equal_mass_mesh: " + std::to_string(n_points) +
                          " mesh points exceed the " + std::to_string(n_samples) +
                          "-sample profile resolution; rebuild with a denser profile");

  // cumulative trapezoid mass
  std::vector<double> mass(n_samples, 0.0);
  for (std::size_t i = 1; i < n_samples; ++i)
    mass[i] = mass[i - 1] +
              0.5 * (profile.g[i] + profile.g[i - 1]) * (profile.s[i] - profile.s[i - 1]);
  const double total = mass.back();
  const int intervals = n_points - 1;

  std::vector<std::size_t> picks(n_points);
  picks.front() = 0;
  picks.back() = n_samples - 1;
  if (total < 1e-14) {
    for (int j = 1; j < intervals; ++j)
      picks[j] = static_cast<std::size_t>(std::lround(double(j) * (n_samples - 1) / intervals));
  } else {
    for (int j = 1; j < intervals; ++j) {
      const double target = total * j / intervals;
      auto it = std::lower_bound(mass.begin(), mass.end(), target);
      std::size_t idx = static_cast<std::size_t>(it - mass.begin());
      if (idx > 0 && (idx == n_samples || mass[idx] - target > target - mass[idx - 1])) --idx;
      picks[j] = idx;
    }
    for (int j = 1; j < n_points; ++j)
      picks[j] = std::max(picks[j], picks[j - 1] + 1); // keep strictly increasing
    if (picks.back() != n_samples - 1)
      throw ResolutionError("equal_mass_mesh: profile too coarse for the requested mesh");

    if (total > 1e-14) {
      const double cap = 1.1 * total / intervals;
      for (int j = 0; j < intervals; ++j)
        if (mass[picks[j + 1]] - mass[picks[j]] > cap)
          throw ResolutionError(
              "equal_mass_mesh: interval mass exceeds 110% of the equal-mass quota; rebuild with "
              "a denser profile");
    }
  }

  std::vector<double> coords;
  coords.reserve(n_points);
  for (auto idx : picks) coords.push_back(profile.s[idx]);
  return mesh_from_coordinates(spec, coords, profile);
}

PathMesh uniform_mesh(const ReactionPathSpec& spec, int n_points) {
  spec.validate();
  if (n_points < 2) throw InvalidInputError("uniform_mesh: need >= 2 points");
  std::vector<double> coords(n_points);
  for (int i = 0; i < n_points; ++i)
    coords[i] = spec.s_start + (spec.s_end - spec.s_start) * i / (n_points - 1);
  return mesh_from_coordinates(spec, coords, DKProfile{});
}

}  // namespace pathcool::path
