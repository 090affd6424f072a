#include "uhlmann_lab/linalg.hpp"

#include <cmath>

namespace uhl::linalg {

MatX exp_minus_i_hermitian(const MatX& H, double t) {
  // Symmetrize first so round-off in H cannot leak an anti-Hermitian part.
  const MatX Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<MatX> es(Hs);
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::exp(-I * (t * w(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatX polar_unitary(const MatX& V) {
  Eigen::JacobiSVD<MatX> svd(V, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double spectral_norm(const MatX& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatX> svd(M);
  return svd.singularValues()(0);
}

double unitarity_defect(const MatX& V) {
  return spectral_norm(V.adjoint() * V - MatX::Identity(V.rows(), V.cols()));
}

double hermiticity_defect(const MatX& M) { return spectral_norm(M - M.adjoint()); }

}  // namespace uhl::linalg
