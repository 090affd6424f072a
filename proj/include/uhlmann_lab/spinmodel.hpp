#pragma once

#include <array>

#include "uhlmann_lab/pauli.hpp"

namespace uhl {

/// Physical inputs of the driven two-spin model, in units where energies are
/// rescaled by B0/2. g = 2J/B0 is the spin-spin coupling, theta the polar
/// angle of the field and phi0 the azimuth at which loops start.
struct ModelParams {
  double g = 0.0;
  double theta = 0.0;
  double phi0 = 0.0;

  /// Throws InvalidArgument unless g >= 0 and theta in [0, pi].
  void validate() const;
};

/// Level labels. Index k holds E_{k+1}: E1 = -E2 >= E3 = -E4 >= 0, so the
/// ground state is kE2 and the first excited state is kE4.
inline constexpr int kE1 = 0;
inline constexpr int kE2 = 1;
inline constexpr int kE3 = 2;
inline constexpr int kE4 = 3;

/// Eigenvector component i (0-based, closed-form ordering) lives on this
/// computational basis index. Components 1..4 of the closed form are the
/// amplitudes on |01>, |00>, |11>, |10> respectively.
inline constexpr std::array<int, 4> component_to_basis{1, 0, 3, 2};

enum class EigenMethod { ClosedForm, DenseFallback };

struct Eigensystem {
  std::array<double, 4> energies{};
  /// components(j, i) = u_j^(i+1), unnormalized, closed-form component order.
  Eigen::Matrix4d components = Eigen::Matrix4d::Zero();
  /// norms[j] = sum_i components(j, i)^2.
  std::array<double, 4> norms{};
  EigenMethod method = EigenMethod::ClosedForm;

  /// Normalized |u_j(phi)> = U(phi)|u_j(0)> in the computational basis.
  Vec4 state(int j, double phi = 0.0) const;
  /// Columns are state(0..3, phi).
  Mat4 basis(double phi = 0.0) const;
  /// <u_i|d_phi u_j> = i (u_i^(4) u_j^(4) - u_i^(1) u_j^(1)) / sqrt(N_i N_j).
  cplx derivative_overlap(int i, int j) const;
};

/// Singularity threshold on |1 - E_j^2| for the closed-form eigenvectors.
inline constexpr double kSingularTolerance = 1e-9;

Mat4 hamiltonian(const ModelParams& p, double phi);

/// The four rescaled energies E1..E4 in level order.
std::array<double, 4> energies(double g, double theta);

/// Closed-form eigensystem. Throws SingularEigenvector when some
/// |1 - E_j^2| < kSingularTolerance (for instance g = 0 or theta = 0).
Eigensystem spectrum(const ModelParams& p);

/// Dense diagonalization of H(0) with the closed-form energies' level order.
/// Degenerate levels are ordered by descending lexicographic comparison of the
/// eigenvector components; each vector's first nonzero component is positive.
Eigensystem spectrum_dense(const ModelParams& p);

/// spectrum() with the dense fallback at singular inputs.
Eigensystem eigensystem(const ModelParams& p);

/// G = (sigma_z x 1 - 1 x sigma_z) / 2, so that U(phi) = exp(-i phi G).
Mat4 rotation_generator();

/// diag(1, e^{-i phi}, e^{+i phi}, 1) in the computational basis.
Mat4 rotation_unitary(double phi);

/// gamma_j = (2 pi / N_j) ([u_j^(1)]^2 - [u_j^(4)]^2): the full loop integral of
/// <u_j|i d_phi u_j>, in [-2 pi, 2 pi] (not wrapped).
double berry_phase(int j, const Eigensystem& es);
double berry_phase(int j, const ModelParams& p);

/// Wraps an angle to (-pi, pi].
double wrap_phase(double x);

/// Distance between two angles on the circle, in [0, pi].
double circular_distance(double a, double b);

}  // namespace uhl
