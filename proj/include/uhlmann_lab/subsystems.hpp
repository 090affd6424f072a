#pragma once

#include <array>
#include <string_view>

#include "uhlmann_lab/spinmodel.hpp"
#include "uhlmann_lab/thermal.hpp"
#include "uhlmann_lab/uhlmann.hpp"

namespace uhl {

/// A is the driven spin, B the undriven one.
enum class Subsystem { A, B };

constexpr std::string_view to_string(Subsystem s) { return s == Subsystem::A ? "A" : "B"; }

/// Reduced single-spin state
///
///   rho^s(phi) = [[a, c e^{-i phi}], [c e^{+i phi}, 1 - a]]
///
/// written in the basis where the drive winds the off-diagonal as e^{-i phi}:
/// (up, down) for A and (down, up) for B.
struct QubitReduced {
  Subsystem which = Subsystem::A;
  double a = 0.5;
  double c = 0.0;
  double det = 0.25;                      // a (1 - a) - c^2 = p1 p2
  std::array<double, 2> populations{};    // p1 <= p2
  /// beta_l = c / (p_l - a); +-inf when c = 0.
  std::array<double, 2> betas{};
  /// N_l = beta_l^2 + 1.
  std::array<double, 2> norms{};
  /// Normalized eigenvector |v_l(phi)> = (x_l e^{-i phi}, y_l).
  std::array<double, 2> x{};
  std::array<double, 2> y{};
  double delta = 0.0;    // (2a - 1) / (2c)
  double delta_p = 0.0;  // (1 - 2 sqrt(det)) / (N1 N2)

  Mat2 matrix(double phi = 0.0) const;
  Mat2 eigenbasis(double phi = 0.0) const;  // columns |v_1>, |v_2>
  bool maximally_degenerate() const { return c == 0.0; }
};

/// Builds the reduced state from (a, c) and fills the eigensystem.
QubitReduced make_qubit(Subsystem which, double a, double c);

/// Reduced state from population-weighted sums of eigenvector component products.
QubitReduced reduce(const GibbsEnsemble& ens, const Eigensystem& es, Subsystem which);
QubitReduced reduce(const GibbsEnsemble& ens, const ModelParams& p, Subsystem which);
QubitReduced reduced_state(const ModelParams& p, double T, Subsystem which);

/// Brute-force partial trace of the 4x4 state, returned in the same basis as QubitReduced::matrix.
Mat2 partial_trace(const Mat4& rho, Subsystem which);

/// (a, c) read from a brute-force partial trace of ens.rho (evaluated at phi0).
QubitReduced reduce_by_contraction(const GibbsEnsemble& ens, double phi0, Subsystem which);

struct SubsystemPhase {
  double phase = 0.0;
  double r2 = 1.0;  // r_s^2; negative values mean imaginary r_s
  std::array<double, 2> berry_pair{};
  double composed = 0.0;  // sum_l p_l gamma_l
  /// -cos(pi r) - i (composed - pi) sin(pi r)/(pi r); Arg of this is the phase.
  cplx value{1.0, 0.0};
  /// Chebyshev form z^s with value = -U1(z^s) = -2 z^s.
  cplx chebyshev_argument() const { return -0.5 * value; }
};

/// gamma_l = 2 pi beta_l^2 / N_l.
std::array<double, 2> subsystem_berry_phases(const QubitReduced& q);

/// cos(pi r) and sin(pi r)/(pi r) as functions of r^2 (cosh/sinh branch for r^2 < 0).
std::array<double, 2> even_cos_sinc(double r2);

/// Closed-form subsystem Uhlmann phase.
SubsystemPhase subsystem_phase_analytic(const QubitReduced& q);

/// Eigenbasis-built connection for the reduced state at phi.
ConnectionField subsystem_connection(const QubitReduced& q, double phi);

/// -2 i Delta p (n_delta . sigma) with n_delta = (-delta cos phi, -delta sin phi, 1).
Mat2 subsystem_connection_compact(const QubitReduced& q, double phi);

/// Path-ordered holonomy of the reduced state by RK4, re-deriving the eigenbasis at every phi.
Holonomy subsystem_holonomy_ode(const QubitReduced& q, double phi0, const OdeOptions& opts = {});

/// Rotating-frame closed form for the reduced state, U_s(phi) = diag(e^{-i phi}, 1).
Holonomy subsystem_holonomy_closed_form(const QubitReduced& q, double phi0);

struct IdentityResidual {
  double raw = 0.0;       // gammabar^A + gammabar^B - 2 pi - gammabar^AB
  double mod_2pi = 0.0;   // distance of raw to the nearest multiple of 2 pi
};

IdentityResidual composed_phase_identity_check(const ModelParams& p, double T);

struct BlochState {
  Eigen::Vector3d vector = Eigen::Vector3d::Zero();
  double equatorial_radius = 0.0;
};

BlochState bloch(const QubitReduced& q, double phi);

}  // namespace uhl
