#include "uhlmann_lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uhlmann_lab/errors.hpp"

namespace uhl {

CriticalConstants critical_constants() {
  const double s3 = std::numbers::sqrt3;
  return {1.0 / std::log(2.0 + s3), 2.0 / s3, 0.5 * s3};
}

int winding_number(const ArgandCurve& curve) {
  const auto& z = curve.z;
  if (z.size() < 3) throw Error(ErrorCode::InvalidArgument, "curve needs at least 3 samples");
  if (std::abs(z.front() - z.back()) > kCurveClosureTolerance)
    throw Error(ErrorCode::CurveNotClosed, "endpoints differ by " + std::to_string(std::abs(z.front() - z.back())));
  for (const cplx& w : z)
    if (std::abs(w) < kOriginTolerance) throw Error(ErrorCode::OriginOnCurve, "sample within 1e-12 of the origin");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) total += std::arg(z[k + 1] / z[k]);
  const double turns = total / two_pi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw Error(ErrorCode::CurveNotClosed, "accumulated argument is not a whole number of turns");
  return static_cast<int>(rounded);
}

ArgandCurve composite_argand_theta(double g, double T, int samples) {
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
  ArgandCurve c;
  c.parameter.resize(samples);
  c.z.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double th = pi * k / (samples - 1);
    c.parameter[k] = th;
    c.z[k] = uhlmann_phase_composite({g, th, 0.0}, T).trace_value;
  }
  return c;
}

ArgandCurve subsystem_argand_theta(Subsystem which, double g, double T, int samples) {
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "need at least 3 samples");
  ArgandCurve c;
  c.parameter.resize(samples);
  c.z.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double th = pi * k / (samples - 1);
    c.parameter[k] = th;
    c.z[k] = subsystem_phase_analytic(reduced_state({g, th, 0.0}, T, which)).chebyshev_argument();
  }
  return c;
}

PhaseTarget target_of(Subsystem s) { return s == Subsystem::A ? PhaseTarget::SubsystemA : PhaseTarget::SubsystemB; }

namespace {

Subsystem subsystem_of(PhaseTarget t) { return t == PhaseTarget::SubsystemA ? Subsystem::A : Subsystem::B; }

struct Point3 {
  double g, theta, T;
};

Point3 place(const Sweep1D& s, double x) {
  Point3 p{s.g, s.theta, s.T};
  switch (s.axis) {
    case SweepAxis::T: p.T = x; break;
    case SweepAxis::g: p.g = x; break;
    case SweepAxis::theta: p.theta = x; break;
  }
  return p;
}

}  // namespace

double transition_indicator(PhaseTarget target, double g, double theta, double T) {
  if (target == PhaseTarget::Composite) {
    if (std::abs(theta - pi / 2) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "composite transitions are located at theta = pi/2 only");
    const cplx z = uhlmann_phase_composite({g, theta, 0.0}, T).trace_value;
    if (std::abs(z.imag()) >= kImaginaryTolerance)
      throw Error(ErrorCode::InvalidArgument, "Tr[rho V] is not real at the equator: Im z = " + std::to_string(z.imag()));
    return z.real();
  }
  return subsystem_phase_analytic(reduced_state({g, theta, 0.0}, T, subsystem_of(target))).r2 - 0.25;
}

double target_phase(PhaseTarget target, double g, double theta, double T) {
  if (target == PhaseTarget::Composite) return uhlmann_phase_composite({g, theta, 0.0}, T).phase;
  return subsystem_phase_analytic(reduced_state({g, theta, 0.0}, T, subsystem_of(target))).phase;
}

TransitionSet transitions_1d(const Sweep1D& sweep) {
  if (sweep.resolution < 2) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 2");
  if (!(sweep.hi > sweep.lo)) throw Error(ErrorCode::InvalidArgument, "empty sweep range");
  if (sweep.target == PhaseTarget::Composite && sweep.axis == SweepAxis::theta)
    throw Error(ErrorCode::InvalidArgument, "composite sweeps must hold theta = pi/2");

  auto f = [&](double x) {
    const Point3 p = place(sweep, x);
    return transition_indicator(sweep.target, p.g, p.theta, p.T);
  };
  auto phase = [&](double x) {
    const Point3 p = place(sweep, x);
    return target_phase(sweep.target, p.g, p.theta, p.T);
  };

  const int n = sweep.resolution;
  std::vector<double> xs(n), fs(n);
  for (int k = 0; k < n; ++k) {
    xs[k] = sweep.lo + (sweep.hi - sweep.lo) * k / (n - 1);
    fs[k] = f(xs[k]);
  }

  TransitionSet out;
  out.sweep = sweep;
  for (int k = 0; k + 1 < n; ++k) {
    if (fs[k] == 0.0 || !(fs[k] * fs[k + 1] < 0.0 || fs[k + 1] == 0.0)) continue;
    double lo = xs[k], hi = xs[k + 1], flo = fs[k];
    while (hi - lo > kBisectionTolerance) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    TransitionRoot r;
    r.value = 0.5 * (lo + hi);
    r.bracket_lo = xs[k];
    r.bracket_hi = xs[k + 1];
    r.phase_below = phase(xs[k]);
    r.phase_above = phase(xs[k + 1]);
    out.roots.push_back(r);
  }
  for (std::size_t k = 0; k + 1 < out.roots.size(); ++k) {
    if (circular_distance(out.roots[k].phase_above, pi) < 0.5)
      out.gap_widths.push_back(out.roots[k + 1].value - out.roots[k].value);
  }
  return out;
}

std::optional<double> subsystem_boundary_temperature(Subsystem which, double g, double T_lo, double T_hi,
                                                     int resolution) {
  Sweep1D s;
  s.target = target_of(which);
  s.axis = SweepAxis::T;
  s.lo = T_lo;
  s.hi = T_hi;
  s.g = g;
  s.theta = pi / 2;
  s.resolution = resolution;
  const auto set = transitions_1d(s);
  if (set.none_found()) return std::nullopt;
  return set.roots.back().value;
}

double golden_maximize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace {

struct Tracer {
  Subsystem which;
  CurveBox box;

  double F(double g, double T) const {
    return subsystem_phase_analytic(reduced_state({g, pi / 2, 0.0}, T, which)).r2 - 0.25;
  }

  Eigen::Vector2d grad(double g, double T) const {
    const double hg = 1e-6 * std::max(1.0, g), hT = 1e-6 * std::max(1e-2, T);
    return {(F(g + hg, T) - F(g - hg, T)) / (2 * hg), (F(g, T + hT) - F(g, T - hT)) / (2 * hT)};
  }

  bool inside(const Eigen::Vector2d& x) const {
    return x(0) >= box.g_lo && x(0) <= box.g_hi && x(1) >= box.T_lo && x(1) <= box.T_hi;
  }

  // Newton on {F(x) = 0, t.(x - xp) = 0}.
  std::optional<Eigen::Vector2d> correct(Eigen::Vector2d x, const Eigen::Vector2d& xp,
                                         const Eigen::Vector2d& t) const {
    for (int it = 0; it < 30; ++it) {
      if (x(1) <= 0.0 || x(0) < 0.0) return std::nullopt;
      const double fx = F(x(0), x(1));
      const Eigen::Vector2d gr = grad(x(0), x(1));
      Eigen::Matrix2d J;
      J << gr(0), gr(1), t(0), t(1);
      const Eigen::Vector2d rhs(fx, t.dot(x - xp));
      const Eigen::Vector2d dx = J.fullPivLu().solve(rhs);
      x -= dx;
      if (dx.norm() < 1e-13) return x;
    }
    if (x(1) > 0.0 && std::abs(F(x(0), x(1))) < 1e-10) return x;
    return std::nullopt;
  }

  std::vector<CurvePoint> trace(Eigen::Vector2d x, Eigen::Vector2d dir) const {
    std::vector<CurvePoint> pts{{x(0), x(1)}};
    double ds = box.step;
    for (int guard = 0; guard < 100000; ++guard) {
      Eigen::Vector2d gr = grad(x(0), x(1));
      Eigen::Vector2d t(-gr(1), gr(0));
      t.normalize();
      if (t.dot(dir) < 0) t = -t;
      const Eigen::Vector2d xp = x + ds * t;
      auto next = correct(xp, xp, t);
      if (!next || (*next - x).norm() > 3 * ds) {
        ds *= 0.5;
        if (ds < 1e-6 * box.step) break;
        continue;
      }
      dir = *next - x;
      x = *next;
      if (!inside(x)) break;
      pts.push_back({x(0), x(1)});
      ds = std::min(box.step, 1.5 * ds);
    }
    return pts;
  }
};

}  // namespace

CriticalCurve critical_curve(Subsystem which, const CurveBox& box) {
  if (!(box.g_hi > box.g_lo) || !(box.T_hi > box.T_lo) || box.T_lo <= 0.0)
    throw Error(ErrorCode::InvalidArgument, "invalid critical-curve box");
  Tracer tr{which, box};
  CriticalCurve out;
  out.which = which;

  // Seeds: roots along the low-temperature edge.
  Sweep1D s;
  s.target = target_of(which);
  s.axis = SweepAxis::g;
  s.lo = box.g_lo;
  s.hi = box.g_hi;
  s.T = box.T_lo;
  s.theta = pi / 2;
  s.resolution = box.seed_resolution;
  const auto seeds = transitions_1d(s);

  for (const auto& seed : seeds.roots) {
    bool covered = false;
    for (const auto& br : out.branches) {
      const auto& end = br.back();
      if (std::abs(end.g - seed.value) < 5 * box.step && std::abs(end.T - box.T_lo) < 5 * box.step) covered = true;
    }
    if (covered) continue;
    out.branches.push_back(tr.trace({seed.value, box.T_lo}, {0.0, 1.0}));
  }

  // Interior maximum of T: refine on the local graph T(g) near the best sample.
  for (const auto& br : out.branches) {
    if (br.size() < 3) continue;
    std::size_t k = 0;
    for (std::size_t i = 1; i < br.size(); ++i)
      if (br[i].T > br[k].T) k = i;
    if (k == 0 || k + 1 == br.size()) continue;
    const double T_guess = br[k].T;
    auto boundary_T = [&](double g) {
      double lo = std::max(box.T_lo, T_guess - 0.05), hi = T_guess + 0.05;
      double flo = tr.F(g, lo);
      if (flo * tr.F(g, hi) > 0) return -1.0;
      while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        const double fm = tr.F(g, mid);
        if ((fm < 0) == (flo < 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };
    const double g_lo = std::min(br[k - 1].g, br[k + 1].g), g_hi = std::max(br[k - 1].g, br[k + 1].g);
    const double g_star = golden_maximize(boundary_T, g_lo, g_hi, 1e-9);
    const CurvePoint m{g_star, boundary_T(g_star)};
    if (!out.maximum || m.T > out.maximum->T) out.maximum = m;
  }
  return out;
}

SchottkyCorrespondence schottky_correspondence(double g) {
  Sweep1D s;
  s.target = PhaseTarget::Composite;
  s.axis = SweepAxis::T;
  s.lo = 0.002;
  s.hi = 1.0;
  s.g = g;
  s.theta = pi / 2;
  s.resolution = 1000;
  const auto set = transitions_1d(s);
  if (set.none_found()) throw Error(ErrorCode::NoTransitionFound, "no composite transition at g = " + std::to_string(g));

  SchottkyCorrespondence out;
  out.T_transition1 = set.roots.front().value;
  auto c24 = [g](double T) { return heat_capacity(g, T).pair(kE2, kE4); };
  // Coarse scan, then golden refinement around the best sample.
  const int n = 2000;
  double best_T = s.lo, best = -1.0;
  for (int k = 0; k < n; ++k) {
    const double T = s.lo + (s.hi - s.lo) * k / (n - 1);
    const double v = c24(T);
    if (v > best) {
      best = v;
      best_T = T;
    }
  }
  const double dT = (s.hi - s.lo) / (n - 1);
  out.T_peak_c24 = golden_maximize(c24, std::max(s.lo, best_T - dT), best_T + dT, 1e-12);
  out.gap = out.T_transition1 - out.T_peak_c24;
  return out;
}

}  // namespace uhl
