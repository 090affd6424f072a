#include "uhlmann_lab/grid.hpp"

#include <omp.h>

#include <exception>

#include "uhlmann_lab/errors.hpp"

namespace uhl {

void validate(const PhaseMapSpec& spec) {
  for (const Axis* a : {&spec.g, &spec.theta, &spec.T})
    if (a->count < 1) throw Error(ErrorCode::InvalidArgument, "axis count must be >= 1");
  if (!(spec.T.min > 0.0) || !(spec.T.max > 0.0))
    throw Error(ErrorCode::NonpositiveTemperature, "temperature axis must be strictly positive");
  if (spec.g.min < 0.0 || spec.g.max < 0.0) throw Error(ErrorCode::InvalidArgument, "g must be >= 0");
  if (spec.theta.min < 0.0 || spec.theta.max > pi + 1e-15)
    throw Error(ErrorCode::InvalidArgument, "theta must lie in [0, pi]");
  if (spec.method == HolonomyMethod::PathOrderedODE && spec.steps < kMinOdeSteps)
    throw Error(ErrorCode::StepCountTooSmall, "ODE needs at least 16 steps");
}

PhaseCell evaluate_cell(const PhaseMapSpec& spec, std::size_t index) {
  const std::size_t nT = spec.T.count, nth = spec.theta.count;
  const int iT = static_cast<int>(index % nT);
  const int ith = static_cast<int>((index / nT) % nth);
  const int ig = static_cast<int>(index / (nT * nth));

  PhaseCell cell;
  cell.g = spec.g.at(ig);
  cell.theta = std::min(spec.theta.at(ith), pi);
  cell.T = spec.T.at(iT);
  const ModelParams p{cell.g, cell.theta, 0.0};

  switch (spec.target) {
    case MapTarget::Composite: {
      const auto r = uhlmann_phase_composite(p, cell.T, {spec.method, spec.steps});
      cell.phase = r.phase;
      cell.value = r.trace_value;
      cell.trace_near_zero = r.trace_near_zero;
      cell.dense_fallback = eigensystem(p).method == EigenMethod::DenseFallback;
      break;
    }
    case MapTarget::SubsystemA:
    case MapTarget::SubsystemB: {
      const Subsystem s = spec.target == MapTarget::SubsystemA ? Subsystem::A : Subsystem::B;
      const Eigensystem es = eigensystem(p);
      cell.dense_fallback = es.method == EigenMethod::DenseFallback;
      const auto q = reduce(gibbs_state(es, p, cell.T), es, s);
      if (spec.method == HolonomyMethod::ClosedForm) {
        const auto r = subsystem_phase_analytic(q);
        cell.phase = r.phase;
        cell.value = r.value;
      } else {
        const auto V = subsystem_holonomy_ode(q, 0.0, {spec.steps, true}).V;
        const auto r = uhlmann_phase(q.matrix(0.0), V);
        cell.phase = r.phase;
        cell.value = r.trace_value;
      }
      cell.trace_near_zero = std::abs(cell.value) < kTraceNearZero;
      break;
    }
    case MapTarget::Berry: {
      const Eigensystem es = eigensystem(p);
      cell.dense_fallback = es.method == EigenMethod::DenseFallback;
      cell.phase = wrap_phase(berry_phase(spec.berry_state, es));
      cell.value = std::polar(1.0, cell.phase);
      break;
    }
  }
  return cell;
}

std::vector<PhaseCell> phase_map_serial(const PhaseMapSpec& spec) {
  validate(spec);
  std::vector<PhaseCell> out(spec.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = evaluate_cell(spec, k);
  return out;
}

std::vector<PhaseCell> phase_map_parallel(const PhaseMapSpec& spec, int jobs) {
  validate(spec);
  std::vector<PhaseCell> out(spec.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      out[k] = evaluate_cell(spec, static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(uhl_grid_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace uhl
