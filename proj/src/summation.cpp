#include "smx/summation.hpp"

namespace smx {
namespace {

constexpr std::size_t kLeaf = 8;

template <class Map>
double tree(const double* x, std::size_t n, Map map) noexcept {
  if (n <= kLeaf) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += map(x[i]);
    return s;
  }
  const std::size_t half = n / 2;
  return tree(x, half, map) + tree(x + half, n - half, map);
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  return tree(values.data(), values.size(), [](double v) { return v; });
}

double pairwise_sum_squares(std::span<const double> values) noexcept {
  return tree(values.data(), values.size(), [](double v) { return v * v; });
}

}  // namespace smx
