#pragma once

#include <span>

namespace smx {

/// Tree summation with a split point that depends only on the length, so the
/// result is the same no matter how the values were produced.
double pairwise_sum(std::span<const double> values) noexcept;

// Sum of squares, same tree shape.
double pairwise_sum_squares(std::span<const double> values) noexcept;

}  // namespace smx
