#include "uhlmann_lab/spinmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uhlmann_lab/errors.hpp"

namespace uhl {

void ModelParams::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g))
    throw Error(ErrorCode::InvalidArgument, "coupling g must be >= 0, got " + std::to_string(g));
  if (!(theta >= 0.0 && theta <= pi))
    throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, pi], got " + std::to_string(theta));
  if (!std::isfinite(phi0)) throw Error(ErrorCode::InvalidArgument, "phi0 must be finite");
}

Vec4 Eigensystem::state(int j, double phi) const {
  Vec4 v = Vec4::Zero();
  const double inv = 1.0 / std::sqrt(norms[j]);
  for (int i = 0; i < 4; ++i) v(component_to_basis[i]) = components(j, i) * inv;
  if (phi != 0.0) v = rotation_unitary(phi) * v;
  return v;
}

Mat4 Eigensystem::basis(double phi) const {
  Mat4 b;
  for (int j = 0; j < 4; ++j) b.col(j) = state(j, phi);
  return b;
}

cplx Eigensystem::derivative_overlap(int i, int j) const {
  const double num = components(i, 3) * components(j, 3) - components(i, 0) * components(j, 0);
  return I * (num / std::sqrt(norms[i] * norms[j]));
}

Mat4 hamiltonian(const ModelParams& p, double phi) {
  const double st = std::sin(p.theta);
  const Mat2 field = st * std::cos(phi) * PauliAlgebra::sigma_x() + st * std::sin(phi) * PauliAlgebra::sigma_y() +
                     std::cos(p.theta) * PauliAlgebra::sigma_z();
  const Mat2& id = PauliAlgebra::identity2();
  const Mat4 xx = kron(PauliAlgebra::sigma_x(), PauliAlgebra::sigma_x());
  const Mat4 yy = kron(PauliAlgebra::sigma_y(), PauliAlgebra::sigma_y());
  return kron(field, id) + (0.5 * p.g) * (xx - yy);
}

std::array<double, 4> energies(double g, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double e1sq = 1.0 + 0.5 * g * g + 0.5 * g * std::sqrt(g * g + 4.0 * s * s);
  // E1^2 E3^2 = 1 + g^2 cos^2(theta); avoids cancellation in the "-" root.
  const double e3sq = (1.0 + g * g * c * c) / e1sq;
  const double e1 = std::sqrt(e1sq), e3 = std::sqrt(e3sq);
  return {e1, -e1, e3, -e3};
}

Eigensystem spectrum(const ModelParams& p) {
  p.validate();
  Eigensystem es;
  es.energies = energies(p.g, p.theta);
  es.method = EigenMethod::ClosedForm;
  const double s = std::sin(p.theta), c = std::cos(p.theta);
  for (int j = 0; j < 4; ++j) {
    const double e = es.energies[j];
    const double den = 1.0 - e * e;
    if (std::abs(den) < kSingularTolerance)
      throw Error(ErrorCode::SingularEigenvector,
                  "|1 - E^2| below tolerance for level " + std::to_string(j + 1));
    es.components(j, 0) = s;
    es.components(j, 1) = p.g * (c * c - e * e) / den;
    es.components(j, 2) = e - c;
    es.components(j, 3) = p.g * s * (c - e) / den;
    es.norms[j] = es.components.row(j).squaredNorm();
  }
  return es;
}

Eigensystem spectrum_dense(const ModelParams& p) {
  p.validate();
  const Eigen::Matrix4d h = hamiltonian(p, 0.0).real();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(h);

  struct Pair {
    double energy;
    Eigen::Vector4d comps;  // closed-form component order
  };
  std::array<Pair, 4> pairs;
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector4d comps;
    for (int i = 0; i < 4; ++i) comps(i) = solver.eigenvectors()(component_to_basis[i], k);
    for (int i = 0; i < 4; ++i) {
      if (std::abs(comps(i)) > 1e-12) {
        if (comps(i) < 0) comps = -comps;
        break;
      }
    }
    pairs[k] = {solver.eigenvalues()(k), comps};
  }
  constexpr double tie = 1e-10;
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (std::abs(a.energy - b.energy) > tie) return a.energy > b.energy;
    return std::lexicographical_compare(b.comps.begin(), b.comps.end(), a.comps.begin(), a.comps.end());
  });

  // Descending order is E1, E3, E4, E2.
  constexpr std::array<int, 4> level_of_rank{kE1, kE3, kE4, kE2};
  Eigensystem es;
  es.method = EigenMethod::DenseFallback;
  es.energies = energies(p.g, p.theta);
  for (int r = 0; r < 4; ++r) {
    const int j = level_of_rank[r];
    es.components.row(j) = pairs[r].comps.transpose();
    es.norms[j] = pairs[r].comps.squaredNorm();
  }
  return es;
}

Eigensystem eigensystem(const ModelParams& p) {
  try {
    return spectrum(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularEigenvector) throw;
    return spectrum_dense(p);
  }
}

Mat4 rotation_generator() {
  Mat4 gen = Mat4::Zero();
  gen(1, 1) = 1.0;
  gen(2, 2) = -1.0;
  return gen;
}

Mat4 rotation_unitary(double phi) {
  Mat4 u = Mat4::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(-I * phi);
  u(2, 2) = std::exp(I * phi);
  u(3, 3) = 1.0;
  return u;
}

double berry_phase(int j, const Eigensystem& es) {
  const double u1 = es.components(j, 0), u4 = es.components(j, 3);
  return two_pi * (u1 * u1 - u4 * u4) / es.norms[j];
}

double berry_phase(int j, const ModelParams& p) { return berry_phase(j, spectrum(p)); }

double wrap_phase(double x) {
  double y = std::remainder(x, two_pi);
  if (y <= -pi) y += two_pi;
  return y;
}

double circular_distance(double a, double b) { return std::abs(std::remainder(a - b, two_pi)); }

}  // namespace uhl
