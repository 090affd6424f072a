#include "uhlmann_lab/subsystems.hpp"

#include <cmath>
#include <limits>

#include "uhlmann_lab/errors.hpp"

namespace uhl {

namespace {

// Normalized (x, y) for beta = num / den, robust when den -> 0.
void unit_amplitudes(double num, double den, double& x, double& y) {
  const double r = std::hypot(num, den);
  if (r == 0.0) {
    x = 1.0;
    y = 0.0;
    return;
  }
  // beta = num/den; (beta, 1)/sqrt(beta^2+1) = (num, den)/r up to the sign of den.
  const double sgn = den < 0.0 ? -1.0 : 1.0;
  x = sgn * num / r;
  y = sgn * den / r;
}

}  // namespace

Mat2 QubitReduced::matrix(double phi) const {
  Mat2 m;
  m << a, c * std::exp(-I * phi), c * std::exp(I * phi), 1.0 - a;
  return m;
}

Mat2 QubitReduced::eigenbasis(double phi) const {
  Mat2 b;
  for (int l = 0; l < 2; ++l) {
    b(0, l) = x[l] * std::exp(-I * phi);
    b(1, l) = y[l];
  }
  return b;
}

QubitReduced make_qubit(Subsystem which, double a, double c) {
  QubitReduced q;
  q.which = which;
  q.a = a;
  q.c = c;
  q.det = a * (1.0 - a) - c * c;
  const double d = 1.0 - 2.0 * a;
  const double s = std::sqrt(d * d + 4.0 * c * c);
  q.populations = {0.5 * (1.0 - s), 0.5 * (1.0 + s)};

  // p_l - a without cancellation: the product (p1 - a)(p2 - a) = -c^2.
  double gap1, gap2;
  if (d >= 0.0) {
    gap2 = 0.5 * (d + s);
    gap1 = (gap2 > 0.0) ? -c * c / gap2 : 0.0;
  } else {
    gap1 = 0.5 * (d - s);
    gap2 = -c * c / gap1;
  }
  const std::array<double, 2> gaps{gap1, gap2};
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (int l = 0; l < 2; ++l) {
    if (gaps[l] != 0.0) {
      q.betas[l] = c / gaps[l];
    } else {
      q.betas[l] = (c == 0.0) ? inf : std::copysign(inf, c);
    }
    q.norms[l] = q.betas[l] * q.betas[l] + 1.0;
    unit_amplitudes(c, gaps[l], q.x[l], q.y[l]);
  }
  if (c == 0.0 && d == 0.0) {
    // Maximally mixed: any orthonormal pair diagonalizes rho; keep (1,0), (0,1).
    q.x = {1.0, 0.0};
    q.y = {0.0, 1.0};
  }
  q.delta = (c != 0.0) ? (2.0 * a - 1.0) / (2.0 * c) : std::copysign(inf, 2.0 * a - 1.0);
  q.delta_p = (1.0 - 2.0 * std::sqrt(std::max(q.det, 0.0))) / (q.norms[0] * q.norms[1]);
  return q;
}

QubitReduced reduce(const GibbsEnsemble& ens, const Eigensystem& es, Subsystem which) {
  double a = 0.0, c = 0.0;
  for (int j = 0; j < 4; ++j) {
    const auto u = es.components.row(j);
    const double w = ens.populations[j] / es.norms[j];
    if (which == Subsystem::A) {
      a += w * (u(0) * u(0) + u(1) * u(1));
      c += w * (u(0) * u(2) + u(1) * u(3));
    } else {
      a += w * (u(0) * u(0) + u(2) * u(2));
      c += w * (u(0) * u(1) + u(2) * u(3));
    }
  }
  return make_qubit(which, a, c);
}

QubitReduced reduce(const GibbsEnsemble& ens, const ModelParams& p, Subsystem which) {
  return reduce(ens, eigensystem(p), which);
}

QubitReduced reduced_state(const ModelParams& p, double T, Subsystem which) {
  const Eigensystem es = eigensystem(p);
  return reduce(gibbs_state(es, p, T), es, which);
}

Mat2 partial_trace(const Mat4& rho, Subsystem which) {
  Mat2 out = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        if (which == Subsystem::A) {
          out(i, j) += rho(2 * i + k, 2 * j + k);
        } else {
          // B is listed as (down, up).
          out(i, j) += rho(2 * k + (1 - i), 2 * k + (1 - j));
        }
      }
  return out;
}

QubitReduced reduce_by_contraction(const GibbsEnsemble& ens, double phi0, Subsystem which) {
  const Mat2 m = partial_trace(ens.rho, which);
  const double a = m(0, 0).real();
  const double c = (m(0, 1) * std::exp(I * phi0)).real();
  return make_qubit(which, a, c);
}

std::array<double, 2> subsystem_berry_phases(const QubitReduced& q) {
  return {two_pi * q.x[0] * q.x[0], two_pi * q.x[1] * q.x[1]};
}

std::array<double, 2> even_cos_sinc(double r2) {
  const double x2 = pi * pi * r2;  // (pi r)^2, possibly negative
  if (std::abs(x2) < 1e-3) {
    // Taylor series in x^2, accurate to ~1e-17 here.
    const double cosv = 1.0 - x2 / 2.0 + x2 * x2 / 24.0 - x2 * x2 * x2 / 720.0 + x2 * x2 * x2 * x2 / 40320.0;
    const double sincv = 1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0 + x2 * x2 * x2 * x2 / 362880.0;
    return {cosv, sincv};
  }
  if (x2 > 0.0) {
    const double xr = std::sqrt(x2);
    return {std::cos(xr), std::sin(xr) / xr};
  }
  const double xi = std::sqrt(-x2);
  return {std::cosh(xi), std::sinh(xi) / xi};
}

SubsystemPhase subsystem_phase_analytic(const QubitReduced& q) {
  SubsystemPhase out;
  out.berry_pair = subsystem_berry_phases(q);
  out.composed = q.populations[0] * out.berry_pair[0] + q.populations[1] * out.berry_pair[1];
  out.r2 = 1.0 - out.berry_pair[0] * out.berry_pair[1] * (1.0 - 4.0 * q.det) / (pi * pi);
  const auto [cosv, sincv] = even_cos_sinc(out.r2);
  out.value = cplx(-cosv, -(out.composed - pi) * sincv);
  out.phase = phase_from_trace(out.value).phase;
  return out;
}

ConnectionField subsystem_connection(const QubitReduced& q, double phi) {
  MatX overlaps(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) overlaps(i, j) = -I * (q.x[i] * q.x[j]);
  const MatX basis = q.eigenbasis(phi);
  return connection_generic(q.populations, basis, overlaps);
}

Mat2 subsystem_connection_compact(const QubitReduced& q, double phi) {
  if (q.maximally_degenerate()) return Mat2::Zero();
  const Mat2 n_sigma = -q.delta * std::cos(phi) * PauliAlgebra::sigma_x() -
                       q.delta * std::sin(phi) * PauliAlgebra::sigma_y() + PauliAlgebra::sigma_z();
  return (-2.0 * I * q.delta_p) * n_sigma;
}

Holonomy subsystem_holonomy_ode(const QubitReduced& q, double phi0, const OdeOptions& opts) {
  return holonomy_ode([&q](double phi) -> MatX { return subsystem_connection(q, phi).operator_form(); }, phi0,
                      opts);
}

Holonomy subsystem_holonomy_closed_form(const QubitReduced& q, double phi0) {
  MatX gen = MatX::Zero(2, 2);
  gen(0, 0) = 1.0;
  return holonomy_rotating_frame(subsystem_connection(q, phi0), gen);
}

IdentityResidual composed_phase_identity_check(const ModelParams& p, double T) {
  const Eigensystem es = eigensystem(p);
  const GibbsEnsemble ens = gibbs_state(es, p, T);
  double composite = 0.0;
  for (int j = 0; j < 4; ++j) composite += ens.populations[j] * berry_phase(j, es);
  const auto sa = subsystem_phase_analytic(reduce(ens, es, Subsystem::A));
  const auto sb = subsystem_phase_analytic(reduce(ens, es, Subsystem::B));
  IdentityResidual r;
  r.raw = sa.composed + sb.composed - two_pi - composite;
  r.mod_2pi = std::abs(std::remainder(r.raw, two_pi));
  return r;
}

BlochState bloch(const QubitReduced& q, double phi) {
  BlochState b;
  b.vector = Eigen::Vector3d(2.0 * q.c * std::cos(phi), 2.0 * q.c * std::sin(phi), 2.0 * q.a - 1.0);
  b.equatorial_radius = std::abs(2.0 * q.c);
  return b;
}

}  // namespace uhl
