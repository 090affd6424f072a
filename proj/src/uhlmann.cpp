#include "uhlmann_lab/uhlmann.hpp"

#include <cmath>
#include <string>

#include "uhlmann_lab/errors.hpp"
#include "uhlmann_lab/linalg.hpp"

namespace uhl {

ConnectionField connection_generic(std::span<const double> populations, const MatX& basis, const MatX& overlaps) {
  const auto n = static_cast<Eigen::Index>(populations.size());
  if (basis.rows() != n || basis.cols() != n || overlaps.rows() != n || overlaps.cols() != n)
    throw Error(ErrorCode::InvalidArgument, "connection_generic: dimension mismatch");

  ConnectionField out;
  out.dimension = static_cast<int>(n);
  out.basis = basis;
  out.coefficients = MatX::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (populations[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "negative population");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double sum = populations[i] + populations[j];
      if (sum < kDegenerateDensityTolerance) {
        if (i < j) ++out.degenerate_pairs;
        continue;
      }
      const double d = std::sqrt(populations[j]) - std::sqrt(populations[i]);
      out.coefficients(i, j) = (d * d / sum) * overlaps(i, j);
    }
  }
  return out;
}

ConnectionField connection_composite(const Eigensystem& es, const GibbsEnsemble& ens, const ModelParams& p) {
  MatX overlaps(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) overlaps(i, j) = es.derivative_overlap(i, j);
  const MatX basis = es.basis(p.phi0);
  return connection_generic(ens.populations, basis, overlaps);
}

ConnectionField connection_composite(const ModelParams& p, double T) {
  require_positive_temperature(T);
  const Eigensystem es = eigensystem(p);
  return connection_composite(es, gibbs_state(es, p, T), p);
}

Holonomy holonomy_rotating_frame(const ConnectionField& a0, const MatX& generator) {
  Holonomy h;
  h.method = HolonomyMethod::ClosedForm;
  const MatX A = a0.operator_form();
  h.K = I * A;
  h.K = 0.5 * (h.K + h.K.adjoint());
  h.V = linalg::exp_minus_i_hermitian(h.K - generator, two_pi);
  return h;
}

Holonomy holonomy_closed_form(const ModelParams& p, double T) {
  return holonomy_rotating_frame(connection_composite(p, T), rotation_generator());
}

Holonomy holonomy_ode(const ConnectionFunction& field, double phi0, const OdeOptions& opts) {
  if (opts.steps < kMinOdeSteps)
    throw Error(ErrorCode::StepCountTooSmall,
                "need at least " + std::to_string(kMinOdeSteps) + " steps, got " + std::to_string(opts.steps));
  const double h = two_pi / opts.steps;
  MatX V;
  for (int k = 0; k < opts.steps; ++k) {
    const double phi = phi0 + k * h;
    const MatX a_start = field(phi);
    const MatX a_mid = field(phi + 0.5 * h);
    const MatX a_end = field(phi + h);
    if (k == 0) V = MatX::Identity(a_start.rows(), a_start.cols());
    const MatX k1 = a_start * V;
    const MatX k2 = a_mid * (V + (0.5 * h) * k1);
    const MatX k3 = a_mid * (V + (0.5 * h) * k2);
    const MatX k4 = a_end * (V + h * k3);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (opts.reunitarize && linalg::unitarity_defect(V) > 1e-12) V = linalg::polar_unitary(V);
  Holonomy out;
  out.V = std::move(V);
  out.method = HolonomyMethod::PathOrderedODE;
  return out;
}

ConnectionFunction composite_connection_function(const ModelParams& p, double T) {
  const MatX a0 = connection_composite(p, T).operator_form();
  const double phi0 = p.phi0;
  return [a0, phi0](double phi) -> MatX {
    const Mat4 u = rotation_unitary(phi - phi0);
    return u * a0 * u.adjoint();
  };
}

PhaseResult phase_from_trace(cplx z) {
  PhaseResult r;
  r.trace_value = z;
  r.modulus = std::abs(z);
  r.trace_near_zero = r.modulus < kTraceNearZero;
  double a = std::arg(z);
  if (a <= -pi || (z.real() < 0.0 && std::abs(z.imag()) <= kRealAxisTolerance)) a = pi;
  r.phase = a;
  return r;
}

PhaseResult uhlmann_phase(const MatX& rho, const MatX& V) { return phase_from_trace((rho * V).trace()); }

PhaseResult uhlmann_phase_composite(const ModelParams& p, double T, const PhaseOptions& opts) {
  require_positive_temperature(T);
  const Eigensystem es = eigensystem(p);
  const GibbsEnsemble ens = gibbs_state(es, p, T);
  const ConnectionField a0 = connection_composite(es, ens, p);
  MatX V;
  if (opts.method == HolonomyMethod::ClosedForm) {
    V = holonomy_rotating_frame(a0, rotation_generator()).V;
  } else {
    const MatX a = a0.operator_form();
    const double phi0 = p.phi0;
    V = holonomy_ode(
            [&a, phi0](double phi) -> MatX {
              const Mat4 u = rotation_unitary(phi - phi0);
              return u * a * u.adjoint();
            },
            phi0, {opts.steps, true})
            .V;
  }
  return uhlmann_phase(ens.rho, V);
}

}  // namespace uhl
