#pragma once

#include <optional>
#include <vector>

#include "uhlmann_lab/subsystems.hpp"
#include "uhlmann_lab/uhlmann.hpp"

namespace uhl {

struct CriticalConstants {
  double T_c;  // 1 / ln(2 + sqrt 3)
  double g_c;  // 2 / sqrt 3
  double R_c;  // sqrt 3 / 2
};

CriticalConstants critical_constants();

/// Complex samples along an ordered parameter sweep.
struct ArgandCurve {
  std::vector<double> parameter;
  std::vector<cplx> z;
};

inline constexpr double kCurveClosureTolerance = 1e-9;
inline constexpr double kOriginTolerance = 1e-12;

/// Signed number of turns about the origin from summed principal-branch
/// argument increments. Throws CurveNotClosed / OriginOnCurve.
int winding_number(const ArgandCurve& curve);

/// z(theta) = Tr[rho V] for theta in [0, pi] at fixed (g, T). z(0) = z(pi) = 1,
/// and z(pi - theta) = conj z(theta), so the sweep is already a closed loop.
ArgandCurve composite_argand_theta(double g, double T, int samples);

/// Chebyshev argument z^s(theta) of the subsystem phase, theta in [0, pi].
ArgandCurve subsystem_argand_theta(Subsystem which, double g, double T, int samples);

enum class SweepAxis { T, g, theta };
enum class PhaseTarget { Composite, SubsystemA, SubsystemB };

PhaseTarget target_of(Subsystem s);

struct Sweep1D {
  PhaseTarget target = PhaseTarget::Composite;
  SweepAxis axis = SweepAxis::T;
  double lo = 0.0;
  double hi = 1.0;
  /// Held coordinates; the swept one is ignored.
  double g = 0.0;
  double theta = pi / 2;
  double T = 1.0;
  int resolution = 400;
};

struct TransitionRoot {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double phase_below = 0.0;
  double phase_above = 0.0;
};

struct TransitionSet {
  Sweep1D sweep;
  std::vector<TransitionRoot> roots;
  /// Widths of the Phi = pi windows bounded by consecutive roots (Delta T or Delta g).
  std::vector<double> gap_widths;
  bool none_found() const { return roots.empty(); }
};

inline constexpr double kBisectionTolerance = 1e-10;
inline constexpr double kImaginaryTolerance = 1e-8;

/// Smooth signed surrogate whose zeros are the transitions: Re z for the
/// composite at theta = pi/2 (after checking |Im z| < 1e-8), r_s^2 - 1/4 for a subsystem.
double transition_indicator(PhaseTarget target, double g, double theta, double T);

/// Uhlmann phase of the target at (g, theta, T).
double target_phase(PhaseTarget target, double g, double theta, double T);

/// All sign changes of the indicator on a uniform grid, refined by bisection.
TransitionSet transitions_1d(const Sweep1D& sweep);

struct CurveBox {
  double g_lo = 0.001;
  double g_hi = 2.0;
  double T_lo = 0.01;
  double T_hi = 1.2;
  double step = 0.01;
  int seed_resolution = 800;
};

struct CurvePoint {
  double g;
  double T;
};

struct CriticalCurve {
  Subsystem which = Subsystem::A;
  std::vector<std::vector<CurvePoint>> branches;
  /// Interior maximum of T along the curve, when one exists.
  std::optional<CurvePoint> maximum;
};

/// Zero set of r_s(pi/2, g, T) - 1/2 inside the box, traced by pseudo-arclength
/// continuation from the roots on the low-T edge.
CriticalCurve critical_curve(Subsystem which, const CurveBox& box = {});

/// Boundary temperature of the subsystem at coupling g (root of r_s - 1/2 in T).
std::optional<double> subsystem_boundary_temperature(Subsystem which, double g, double T_lo, double T_hi,
                                                     int resolution = 400);

struct SchottkyCorrespondence {
  double T_transition1 = 0.0;
  double T_peak_c24 = 0.0;
  double gap = 0.0;  // T_transition1 - T_peak_c24
};

/// Lower composite transition at theta = pi/2 vs. the maximum of C_T^{24}(T).
SchottkyCorrespondence schottky_correspondence(double g);

/// Golden-section maximizer of a unimodal function on [lo, hi].
double golden_maximize(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

}  // namespace uhl
