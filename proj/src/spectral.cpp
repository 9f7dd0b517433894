#include "pathcool/spectral.hpp"

#include <cmath>

namespace pathcool {

double spectral_norm(const CMatrix& m) {
  if (m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace pathcool

namespace pathcool::spectral {

EigenSystem eigendecompose(const OperatorMatrix& H) {
  H.assert_hermitian();
  Eigen::SelfAdjointEigenSolver<CMatrix> es((H.m + H.m.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw Error("eigendecompose: solver failed");

  EigenSystem out;
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();

  // fix phases: largest-magnitude component real positive (first index wins ties)
  for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
      double a = std::abs(out.vectors(r, c));
      if (a > best + 1e-14) {
        best = a;
        imax = r;
      }
    }
    Complex z = out.vectors(imax, c);
    if (std::abs(z) > 0) out.vectors.col(c) *= std::conj(z) / std::abs(z);
  }
  return out;
}

GapInfo gaps(const EigenSystem& eig, double eps_res) {
  if (eig.dim() < 2) throw InvalidInputError("gaps: need dim >= 2");
  GapInfo g;
  g.eps_res = eps_res;
  g.delta = eig.energies(1) - eig.energies(0);
  const double cutoff = eig.energies(0) + eps_res;
  int k = 0;
  while (k + 1 < eig.dim() && eig.energies(k + 1) <= cutoff) ++k;
  g.band_size = k + 1;
  if (k + 1 >= eig.dim())
    g.delta_res = kInfiniteGap;
  else
    g.delta_res = eig.energies(k + 1) - cutoff;
  return g;
}

double ground_overlap(const EigenSystem& a, const EigenSystem& b) {
  if (a.dim() != b.dim()) throw DimensionError("ground_overlap: dimension mismatch");
  Complex ov = a.vectors.col(0).dot(b.vectors.col(0));
  return std::norm(ov);
}

double projector_distance(const EigenSystem& a, const EigenSystem& b, double eps_res) {
  if (a.dim() != b.dim()) throw DimensionError("projector_distance: dimension mismatch");
  auto band_projector = [eps_res](const EigenSystem& e) {
    const double cutoff = e.energies(0) + eps_res;
    CMatrix P = CMatrix::Zero(e.dim(), e.dim());
    for (Eigen::Index j = 0; j < e.dim(); ++j)
      if (e.energies(j) <= cutoff) P += e.vectors.col(j) * e.vectors.col(j).adjoint();
    return P;
  };
  return spectral_norm(band_projector(a) - band_projector(b));
}

IprResult compute_ipr(const CVector& state) {
  double n2 = state.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-10)
    throw InvalidInputError("compute_ipr: state not normalized (|norm^2 - 1| = " +
                            std::to_string(std::abs(n2 - 1.0)) + ")");
  double ipr = 0.0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    double p = std::norm(state(i));
    ipr += p * p;
  }
  return {ipr, 1.0 / ipr};
}

}  // namespace pathcool::spectral
