#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "uhlmann_lab/grid.hpp"

namespace uhl::cli {

/// Evaluates a scalar such as "0.25", "pi", "pi/2", "3*pi/4" or "-1e-3".
/// Grammar: sums and differences of products/quotients of numbers, `pi` and parentheses.
double parse_scalar(std::string_view text);

/// Parses "v" (a fixed value) or "min:max[:count]".
/// A range without an explicit count takes `default_count` points.
Axis parse_axis(std::string_view text, int default_count);

/// True when `text` names a range rather than a single value.
bool is_range(std::string_view text);

/// Human-friendly form of an axis for JSON sidecars.
std::string describe(const Axis& axis);

}  // namespace uhl::cli
