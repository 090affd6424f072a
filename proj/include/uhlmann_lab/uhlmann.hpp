#pragma once

#include <functional>
#include <span>

#include "uhlmann_lab/spinmodel.hpp"
#include "uhlmann_lab/thermal.hpp"

namespace uhl {

/// Uhlmann connection A = sum_{i!=j} A_ij |psi_i><psi_j| dphi at one point of the loop.
struct ConnectionField {
  MatX coefficients;  // A_ij, zero diagonal
  MatX basis;         // columns |psi_j>
  int dimension = 0;
  /// Pairs (i<j) whose population sum fell below the degeneracy threshold;
  /// their coefficients were set to zero.
  int degenerate_pairs = 0;

  /// The connection as an operator on the state space (anti-Hermitian).
  MatX operator_form() const { return basis * coefficients * basis.adjoint(); }
};

inline constexpr double kDegenerateDensityTolerance = 1e-15;

/// A_ij = (sqrt p_j - sqrt p_i)^2 / (p_j + p_i) <psi_i|d psi_j> for i != j.
ConnectionField connection_generic(std::span<const double> populations, const MatX& basis, const MatX& overlaps);

/// Composite-system connection at the loop origin phi0, built from the
/// closed-form eigenvector components (dense fallback at singular inputs).
ConnectionField connection_composite(const ModelParams& p, double T);
ConnectionField connection_composite(const Eigensystem& es, const GibbsEnsemble& ens, const ModelParams& p);

enum class HolonomyMethod { ClosedForm, PathOrderedODE };

struct Holonomy {
  MatX V;
  MatX K;  // Hermitian generator i A(phi0); empty for the ODE route
  HolonomyMethod method = HolonomyMethod::ClosedForm;
};

/// One-cycle holonomy for a connection that co-rotates with U(phi) = exp(-i phi G):
/// V = exp(-2 pi i (K - G)), K = i A(phi0).
Holonomy holonomy_rotating_frame(const ConnectionField& a0, const MatX& generator);

/// Composite holonomy from the rotating-frame closed form.
Holonomy holonomy_closed_form(const ModelParams& p, double T);

using ConnectionFunction = std::function<MatX(double phi)>;

struct OdeOptions {
  int steps = 2048;
  bool reunitarize = true;
};

inline constexpr int kMinOdeSteps = 16;

/// Fixed-step RK4 solution of dV/dphi = A(phi) V, V(phi0) = 1, over phi0 -> phi0 + 2 pi.
/// If reunitarize is set and the endpoint drifts from unitarity by more than 1e-12,
/// V is replaced by its polar unitary factor.
Holonomy holonomy_ode(const ConnectionFunction& field, double phi0, const OdeOptions& opts = {});

/// A(phi) = U(phi - phi0) A(phi0) U^dagger(phi - phi0) for the composite system.
ConnectionFunction composite_connection_function(const ModelParams& p, double T);

struct PhaseResult {
  double phase = 0.0;  // (-pi, pi]
  cplx trace_value{1.0, 0.0};
  double modulus = 1.0;
  bool trace_near_zero = false;
};

inline constexpr double kTraceNearZero = 1e-9;

/// |Im z| below which a negative trace counts as lying on the real axis. Traces are
/// bounded by 1 in modulus, so this sits a few ulps above accumulated roundoff.
inline constexpr double kRealAxisTolerance = 1e-14;

/// Arg z on the principal branch (-pi, pi], with the negative real axis mapped to +pi.
/// Roundoff-level imaginary parts (|Im z| <= kRealAxisTolerance) do not move z off the axis.
PhaseResult phase_from_trace(cplx z);

/// Arg Tr[rho V].
PhaseResult uhlmann_phase(const MatX& rho, const MatX& V);

struct PhaseOptions {
  HolonomyMethod method = HolonomyMethod::ClosedForm;
  int steps = 2048;
};

PhaseResult uhlmann_phase_composite(const ModelParams& p, double T, const PhaseOptions& opts = {});

}  // namespace uhl
