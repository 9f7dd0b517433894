#include "pathcool/chem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pathcool/data_path.hpp"

namespace pathcool::chem {

namespace {

constexpr double kPi = std::numbers::pi;

double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double d = 0.0;
  for (int k = 0; k < 3; ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return d;
}

std::array<double, 3> gaussian_product_center(double a, const std::array<double, 3>& A,
                                              double b, const std::array<double, 3>& B) {
  std::array<double, 3> P;
  for (int k = 0; k < 3; ++k) P[k] = (a * A[k] + b * B[k]) / (a + b);
  return P;
}

std::vector<std::pair<double, double>> load_sto3g_hydrogen() {
  static const std::vector<std::pair<double, double>> cached = [] {
    std::ifstream in(data_file("sto3g_h.dat"));
    if (!in) throw Error("cannot open bundled basis data file sto3g_h.dat");
    std::vector<std::pair<double, double>> prims;
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      double e, c;
      if (ss >> e >> c) prims.emplace_back(e, c);
    }
    if (prims.size() != 3) throw Error("sto3g_h.dat: expected 3 primitives");
    return prims;
  }();
  return cached;
}

}  // namespace

void Geometry::validate() const {
  if (atoms.empty()) throw InvalidInputError("geometry: at least one atom required");
  for (const auto& a : atoms) {
    if (a.charge < 1) throw InvalidInputError("geometry: nuclear charge must be >= 1");
    for (double x : a.pos)
      if (!std::isfinite(x)) throw InvalidInputError("geometry: non-finite coordinate");
  }
}

Geometry Geometry::translated(const std::array<double, 3>& shift) const {
  Geometry g = *this;
  for (auto& a : g.atoms)
    for (int k = 0; k < 3; ++k) a.pos[k] += shift[k];
  return g;
}

AOBasis build_sto3g_basis(const Geometry& geometry) {
  geometry.validate();
  AOBasis basis;
  auto prims = load_sto3g_hydrogen();
  // include primitive norms, then renormalize the contraction to unit self-overlap
  std::vector<std::pair<double, double>> normed;
  for (auto [a, c] : prims) normed.emplace_back(a, c * std::pow(2.0 * a / kPi, 0.75));
  double self = 0.0;
  for (auto [a, ca] : normed)
    for (auto [b, cb] : normed) self += ca * cb * std::pow(kPi / (a + b), 1.5);
  for (auto& [a, c] : normed) c /= std::sqrt(self);

  for (std::size_t i = 0; i < geometry.atoms.size(); ++i) {
    if (geometry.atoms[i].charge != 1)
      throw UnsupportedElementError("build_sto3g_basis: unsupported element '" +
                                    geometry.atoms[i].element +
                                    "' (only hydrogen is supported natively)");
    basis.shells.push_back(Shell{static_cast<int>(i), geometry.atoms[i].pos, normed});
  }
  return basis;
}

double boys_f0(double x) {
  if (x < 1e-4) {
    // series sum_k (-x)^k / (k! (2k+1)); eight terms keep the truncation far
    // below 1e-12 relative on this branch
    double term = 1.0, sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      sum += term / (2 * k + 1);
      term *= -x / (k + 1);
    }
    return sum;
  }
  return 0.5 * std::sqrt(kPi / x) * std::erf(std::sqrt(x));
}

namespace {

double prim_overlap(double a, double b, double rab2) {
  double p = a + b;
  return std::pow(kPi / p, 1.5) * std::exp(-a * b / p * rab2);
}

double prim_kinetic(double a, double b, double rab2) {
  double p = a + b;
  double mu = a * b / p;
  return mu * (3.0 - 2.0 * mu * rab2) * std::pow(kPi / p, 1.5) * std::exp(-mu * rab2);
}

}  // namespace

Matrix cross_overlap(const AOBasis& bra, const AOBasis& ket) {
  Matrix S(bra.size(), ket.size());
  for (std::size_t i = 0; i < bra.size(); ++i)
    for (std::size_t j = 0; j < ket.size(); ++j) {
      double rab2 = dist2(bra.shells[i].pos, ket.shells[j].pos);
      double s = 0.0;
      for (auto [a, ca] : bra.shells[i].primitives)
        for (auto [b, cb] : ket.shells[j].primitives) s += ca * cb * prim_overlap(a, b, rab2);
      S(i, j) = s;
    }
  return S;
}

IntegralSet compute_integrals(const AOBasis& basis, const Geometry& geometry) {
  geometry.validate();
  const int n = static_cast<int>(basis.size());
  for (const auto& sh : basis.shells)
    if (sh.center < 0 || sh.center >= static_cast<int>(geometry.size()))
      throw InvalidInputError("compute_integrals: shell center out of range");

  // nuclear repulsion first; coincident nuclei are a hard error
  double e_nuc = 0.0;
  for (std::size_t i = 0; i < geometry.size(); ++i)
    for (std::size_t j = i + 1; j < geometry.size(); ++j) {
      double r2 = dist2(geometry.atoms[i].pos, geometry.atoms[j].pos);
      if (r2 < 1e-20)
        throw SingularGeometryError("compute_integrals: atoms " + std::to_string(i) + " and " +
                                    std::to_string(j) + " coincide (nuclear repulsion diverges)");
      e_nuc += geometry.atoms[i].charge * geometry.atoms[j].charge / std::sqrt(r2);
    }

  IntegralSet out;
  out.n_ao = n;
  out.e_nuc = e_nuc;
  out.S.resize(n, n);
  out.Tkin.resize(n, n);
  out.Vnuc.resize(n, n);
  out.eri.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);

  auto center = [&](int shell_idx) { return basis.shells[shell_idx].pos; };

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rab2 = dist2(center(i), center(j));
      double s = 0.0, t = 0.0, v = 0.0;
      for (auto [a, ca] : basis.shells[i].primitives)
        for (auto [b, cb] : basis.shells[j].primitives) {
          double w = ca * cb;
          s += w * prim_overlap(a, b, rab2);
          t += w * prim_kinetic(a, b, rab2);
          double p = a + b;
          auto P = gaussian_product_center(a, center(i), b, center(j));
          double pre = w * 2.0 * kPi / p * std::exp(-a * b / p * rab2);
          for (const auto& atom : geometry.atoms) {
            double rpc2 = dist2(P, atom.pos);
            v -= pre * atom.charge * boys_f0(p * rpc2);
          }
        }
      out.S(i, j) = s;
      out.Tkin(i, j) = t;
      out.Vnuc(i, j) = v;
    }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rab2 = dist2(center(i), center(j));
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (l > k || (k * n + l) > (i * n + j)) continue;  // use 4-fold (ij|kl) build symmetry
          double rcd2 = dist2(center(k), center(l));
          double val = 0.0;
          for (auto [a, ca] : basis.shells[i].primitives)
            for (auto [b, cb] : basis.shells[j].primitives) {
              double p = a + b;
              auto P = gaussian_product_center(a, center(i), b, center(j));
              double kab = std::exp(-a * b / p * rab2);
              for (auto [c, cc] : basis.shells[k].primitives)
                for (auto [d, cd] : basis.shells[l].primitives) {
                  double q = c + d;
                  auto Q = gaussian_product_center(c, center(k), d, center(l));
                  double kcd = std::exp(-c * d / q * rcd2);
                  double rpq2 = dist2(P, Q);
                  double pre = 2.0 * std::pow(kPi, 2.5) / (p * q * std::sqrt(p + q));
                  val += ca * cb * cc * cd * pre * kab * kcd * boys_f0(p * q / (p + q) * rpq2);
                }
            }
          // scatter to the full 8-fold orbit; s orbitals are real
          out.eri_at(i, j, k, l) = val;
          out.eri_at(j, i, k, l) = val;
          out.eri_at(i, j, l, k) = val;
          out.eri_at(j, i, l, k) = val;
          out.eri_at(k, l, i, j) = val;
          out.eri_at(l, k, i, j) = val;
          out.eri_at(k, l, j, i) = val;
          out.eri_at(l, k, j, i) = val;
        }
    }
  return out;
}

namespace {

Matrix lowdin_x(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.eigenvalues().minCoeff() < 1e-10)
    throw SingularGeometryError("run_rhf: overlap matrix (near-)singular");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Matrix fock_build(const IntegralSet& ints, const Matrix& D) {
  const int n = ints.n_ao;
  Matrix F = ints.Tkin + ints.Vnuc;
  for (int m = 0; m < n; ++m)
    for (int nu = 0; nu < n; ++nu) {
      double j = 0.0, k = 0.0;
      for (int l = 0; l < n; ++l)
        for (int s = 0; s < n; ++s) {
          j += D(l, s) * ints.eri_at(m, nu, l, s);
          k += D(l, s) * ints.eri_at(m, l, nu, s);
        }
      F(m, nu) += j - 0.5 * k;
    }
  return F;
}

}  // namespace

ScfResult run_rhf(const IntegralSet& ints, int n_electrons, const ScfOptions& opt) {
  if (n_electrons % 2 != 0)
    throw UnsupportedSpinError("run_rhf: odd electron count " + std::to_string(n_electrons) +
                               " (restricted closed-shell only)");
  const int n = ints.n_ao;
  if (n_electrons > 2 * n)
    throw InvalidInputError("run_rhf: more electrons than 2 * n_AO");
  const int nocc = n_electrons / 2;

  const Matrix X = lowdin_x(ints.S);
  const Matrix hcore = ints.Tkin + ints.Vnuc;

  ScfResult res;
  res.n_occ = nocc;

  if (n_electrons == 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(X.transpose() * hcore * X);
    res.C = X * es.eigenvectors();
    res.eps = es.eigenvalues();
    res.e_hf = ints.e_nuc;
    res.converged = true;
    return res;
  }

  Matrix F = hcore;
  Matrix D = Matrix::Zero(n, n);
  Matrix C;
  Vector eps;
  double e_old = 0.0;

  std::deque<Matrix> diis_F, diis_err;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    Matrix F_eff = F;

    // DIIS extrapolation on the orthonormal-basis error FDS - SDF
    if (iter > 0) {
      Matrix err = X.transpose() * (F * D * ints.S - ints.S * D * F) * X;
      diis_F.push_back(F);
      diis_err.push_back(err);
      if (static_cast<int>(diis_F.size()) > opt.diis_size) {
        diis_F.pop_front();
        diis_err.pop_front();
      }
      const int m = static_cast<int>(diis_F.size());
      if (m >= 2) {
        Matrix B = Matrix::Zero(m + 1, m + 1);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            B(i, j) = (diis_err[i].array() * diis_err[j].array()).sum();
        for (int i = 0; i < m; ++i) B(i, m) = B(m, i) = -1.0;
        Vector rhs = Vector::Zero(m + 1);
        rhs(m) = -1.0;
        Vector c = B.fullPivLu().solve(rhs);
        if (c.allFinite()) {
          F_eff = Matrix::Zero(n, n);
          for (int i = 0; i < m; ++i) F_eff += c(i) * diis_F[i];
        }
      }
    }

    // level shift on the virtual block when the current gap is tight
    if (iter > 0 && nocc < n && opt.level_shift > 0.0) {
      Eigen::SelfAdjointEigenSolver<Matrix> probe(X.transpose() * F_eff * X);
      double gap = probe.eigenvalues()(nocc) - probe.eigenvalues()(nocc - 1);
      if (gap < opt.shift_gap_threshold) {
        Matrix Cp = X * probe.eigenvectors();
        Matrix Dv = Cp.rightCols(n - nocc) * Cp.rightCols(n - nocc).transpose();
        F_eff += opt.level_shift * ints.S * Dv * ints.S;
      }
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(X.transpose() * F_eff * X);
    C = X * es.eigenvectors();
    eps = es.eigenvalues();
    Matrix D_new = 2.0 * C.leftCols(nocc) * C.leftCols(nocc).transpose();

    F = fock_build(ints, D_new);
    double e = 0.5 * (D_new.array() * (hcore + F).array()).sum() + ints.e_nuc;

    double d_change = (D_new - D).cwiseAbs().maxCoeff();
    double e_change = std::abs(e - e_old);
    D = D_new;
    e_old = e;
    res.iterations = iter + 1;
    if (iter > 0 && d_change <= opt.density_tol && e_change <= opt.energy_tol) {
      res.converged = true;
      break;
    }
  }

  // final diagonalization of the unshifted Fock for reported orbitals/energies
  Eigen::SelfAdjointEigenSolver<Matrix> es(X.transpose() * F * X);
  res.C = X * es.eigenvectors();
  res.eps = es.eigenvalues();
  res.e_hf = e_old;
  return res;
}

MOIntegrals transform_to_mo(const IntegralSet& ints, const Matrix& C) {
  const int n = ints.n_ao;
  const int nmo = static_cast<int>(C.cols());
  Matrix ortho = C.transpose() * ints.S * C - Matrix::Identity(nmo, nmo);
  double dev = ortho.cwiseAbs().maxCoeff();
  if (dev > 1e-6)
    throw GaugeError("transform_to_mo: C not S-orthonormal, max deviation " + std::to_string(dev));

  MOIntegrals mo;
  mo.n_orb = nmo;
  mo.e_core = ints.e_nuc;
  mo.h = C.transpose() * (ints.Tkin + ints.Vnuc) * C;

  // quarter transforms, (mu nu|la si) -> (p q|r s)
  auto idx = [n](int a, int b, int c, int d) {
    return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
  };
  std::vector<double> t1(static_cast<std::size_t>(nmo) * n * n * n, 0.0);
  for (int p = 0; p < nmo; ++p)
    for (int nu = 0; nu < n; ++nu)
      for (int la = 0; la < n; ++la)
        for (int si = 0; si < n; ++si) {
          double acc = 0.0;
          for (int m = 0; m < n; ++m) acc += C(m, p) * ints.eri[idx(m, nu, la, si)];
          t1[((static_cast<std::size_t>(p) * n + nu) * n + la) * n + si] = acc;
        }
  std::vector<double> t2(static_cast<std::size_t>(nmo) * nmo * n * n, 0.0);
  for (int p = 0; p < nmo; ++p)
    for (int q = 0; q < nmo; ++q)
      for (int la = 0; la < n; ++la)
        for (int si = 0; si < n; ++si) {
          double acc = 0.0;
          for (int nu = 0; nu < n; ++nu)
            acc += C(nu, q) * t1[((static_cast<std::size_t>(p) * n + nu) * n + la) * n + si];
          t2[((static_cast<std::size_t>(p) * nmo + q) * n + la) * n + si] = acc;
        }
  std::vector<double> t3(static_cast<std::size_t>(nmo) * nmo * nmo * n, 0.0);
  for (int p = 0; p < nmo; ++p)
    for (int q = 0; q < nmo; ++q)
      for (int r = 0; r < nmo; ++r)
        for (int si = 0; si < n; ++si) {
          double acc = 0.0;
          for (int la = 0; la < n; ++la)
            acc += C(la, r) * t2[((static_cast<std::size_t>(p) * nmo + q) * n + la) * n + si];
          t3[((static_cast<std::size_t>(p) * nmo + q) * nmo + r) * n + si] = acc;
        }
  mo.g.assign(static_cast<std::size_t>(nmo) * nmo * nmo * nmo, 0.0);
  for (int p = 0; p < nmo; ++p)
    for (int q = 0; q < nmo; ++q)
      for (int r = 0; r < nmo; ++r)
        for (int s = 0; s < nmo; ++s) {
          double acc = 0.0;
          for (int si = 0; si < n; ++si)
            acc += C(si, s) * t3[((static_cast<std::size_t>(p) * nmo + q) * nmo + r) * n + si];
          mo.g_at(p, q, r, s) = acc;
        }
  return mo;
}

namespace {

double parse_double(const std::string& tok, int line_no) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("fcidump line " + std::to_string(line_no) + ": non-numeric value '" + tok +
                     "'");
  return v;
}

}  // namespace

FcidumpData read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("fcidump: cannot open '" + path + "'");
  std::string line;
  int line_no = 0;

  // header: &FCI ... NORB=, NELEC=, MS2= ... &END (possibly multi-line)
  std::string header;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    ++line_no;
    header += " " + line;
    if (line.find("&END") != std::string::npos || line.find("/") != std::string::npos)
      header_done = true;
  }
  if (!header_done) throw ParseError("fcidump line " + std::to_string(line_no) + ": missing &END");
  if (header.find("&FCI") == std::string::npos)
    throw ParseError("fcidump line 1: malformed header (missing &FCI)");

  auto get_int = [&](const std::string& key) {
    auto pos = header.find(key);
    if (pos == std::string::npos)
      throw ParseError("fcidump header: missing " + key);
    pos += key.size();
    while (pos < header.size() && (header[pos] == '=' || header[pos] == ' ')) ++pos;
    return std::atoi(header.c_str() + pos);
  };
  const int norb = get_int("NORB");
  const int nelec = get_int("NELEC");
  int ms2 = header.find("MS2") != std::string::npos ? get_int("MS2") : 0;
  if (norb <= 0) throw ParseError("fcidump header: NORB must be positive");

  FcidumpData out;
  out.n_electrons = nelec;
  out.ms2 = ms2;
  out.mo.n_orb = norb;
  out.mo.h = Matrix::Zero(norb, norb);
  out.mo.g.assign(static_cast<std::size_t>(norb) * norb * norb * norb, 0.0);

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string vtok;
    if (!(ss >> vtok)) continue;  // blank line
    double v = parse_double(vtok, line_no);
    long i, j, k, l;
    if (!(ss >> i >> j >> k >> l))
      throw ParseError("fcidump line " + std::to_string(line_no) + ": expected 4 indices");
    for (long idx : {i, j, k, l})
      if (idx < 0 || idx > norb)
        throw ParseError("fcidump line " + std::to_string(line_no) + ": index " +
                         std::to_string(idx) + " out of range [0," + std::to_string(norb) + "]");
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      out.mo.e_core = v;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0)
        throw ParseError("fcidump line " + std::to_string(line_no) + ": bad one-body record");
      out.mo.h(i - 1, j - 1) = v;
      out.mo.h(j - 1, i - 1) = v;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw ParseError("fcidump line " + std::to_string(line_no) + ": bad two-body record");
      int a = static_cast<int>(i) - 1, b = static_cast<int>(j) - 1;
      int c = static_cast<int>(k) - 1, d = static_cast<int>(l) - 1;
      // scatter across the 8-fold orbit of real chemist integrals
      for (auto [p, q, r, s] : {std::array<int, 4>{a, b, c, d}, {b, a, c, d}, {a, b, d, c},
                                {b, a, d, c}, {c, d, a, b}, {d, c, a, b}, {c, d, b, a},
                                {d, c, b, a}})
        out.mo.g_at(p, q, r, s) = v;
    }
  }
  return out;
}

void write_fcidump(const std::string& path, const MOIntegrals& mo, int n_electrons, int ms2) {
  std::ofstream out(path);
  if (!out) throw Error("fcidump: cannot write '" + path + "'");
  const int n = mo.n_orb;
  out << "&FCI NORB=" << n << ",NELEC=" << n_electrons << ",MS2=" << ms2 << ",\n";
  out << "  ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n  ISYM=1,\n&END\n";
  char buf[64];
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%24.16e %4d %4d %4d %4d\n", v, i, j, k, l);
    out << buf;
  };
  // unique two-body records under 8-fold symmetry
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= (k == i ? j : k); ++l) {
          double v = mo.g_at(i, j, k, l);
          if (v != 0.0) emit(v, i + 1, j + 1, k + 1, l + 1);
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (mo.h(i, j) != 0.0) emit(mo.h(i, j), i + 1, j + 1, 0, 0);
  emit(mo.e_core, 0, 0, 0, 0);
}

Geometry read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("xyz: cannot open '" + path + "'");
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("xyz line 1: missing atom count");
  ++line_no;
  int n = std::atoi(line.c_str());
  if (n <= 0) throw ParseError("xyz line 1: bad atom count");
  std::getline(in, line);  // comment
  ++line_no;
  Geometry g;
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw ParseError("xyz line " + std::to_string(line_no + 1) + ": unexpected end of file");
    ++line_no;
    std::istringstream ss(line);
    Atom a;
    double x, y, z;
    if (!(ss >> a.element >> x >> y >> z))
      throw ParseError("xyz line " + std::to_string(line_no) + ": expected 'El x y z'");
    if (a.element == "H" || a.element == "h")
      a.charge = 1;
    else
      throw UnsupportedElementError("xyz line " + std::to_string(line_no) +
                                    ": unsupported element '" + a.element + "'");
    a.pos = {x * kAngstromToBohr, y * kAngstromToBohr, z * kAngstromToBohr};
    g.atoms.push_back(a);
  }
  g.validate();
  return g;
}

}  // namespace pathcool::chem
