#pragma once

#include <vector>

#include "uhlmann_lab/analysis.hpp"

namespace uhl {

/// Uniform axis; count == 1 means the coordinate is held at min.
struct Axis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  double at(int i) const { return count == 1 ? min : min + (max - min) * i / (count - 1); }
  static Axis fixed(double v) { return {v, v, 1}; }
};

enum class MapTarget { Composite, SubsystemA, SubsystemB, Berry };

struct PhaseMapSpec {
  MapTarget target = MapTarget::Composite;
  Axis g = Axis::fixed(0.5);
  Axis theta = Axis::fixed(pi / 2);
  Axis T = Axis::fixed(0.2);
  HolonomyMethod method = HolonomyMethod::ClosedForm;
  int steps = 2048;
  int berry_state = kE2;

  std::size_t size() const {
    return static_cast<std::size_t>(g.count) * static_cast<std::size_t>(theta.count) *
           static_cast<std::size_t>(T.count);
  }
};

struct PhaseCell {
  double g = 0.0;
  double theta = 0.0;
  double T = 0.0;
  double phase = 0.0;
  cplx value{1.0, 0.0};
  bool trace_near_zero = false;
  bool dense_fallback = false;
};

/// Evaluates one grid cell. Index order is g outermost, then theta, then T.
PhaseCell evaluate_cell(const PhaseMapSpec& spec, std::size_t index);

/// Serial reference kernel.
std::vector<PhaseCell> phase_map_serial(const PhaseMapSpec& spec);

/// OpenMP kernel; output order matches phase_map_serial bit for bit.
/// jobs <= 0 uses the OpenMP default team size.
std::vector<PhaseCell> phase_map_parallel(const PhaseMapSpec& spec, int jobs = 0);

/// Throws InvalidArgument for empty axes or non-positive temperatures.
void validate(const PhaseMapSpec& spec);

}  // namespace uhl
