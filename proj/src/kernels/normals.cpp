#include <algorithm>
#include <cmath>

#include "kernels/kernels.hpp"

namespace smx::kernels {
namespace {

constexpr std::size_t kBlock = 128;
constexpr double kTwoPi = 6.283185307179586;

}  // namespace

void standard_normals(std::uint64_t key, std::uint32_t stream, std::uint32_t tag, std::uint64_t step,
                      std::size_t count, double* out) noexcept {
  const std::size_t pairs = (count + 1) / 2;
  alignas(64) std::uint32_t c0[kBlock], c1[kBlock], c2[kBlock], c3[kBlock];
  alignas(64) double radius[kBlock], angle[kBlock];

  for (std::size_t base = 0; base < pairs; base += kBlock) {
    const std::size_t n = std::min(kBlock, pairs - base);
    for (std::size_t p = 0; p < kBlock; ++p) {
      c0[p] = static_cast<std::uint32_t>(step);
      c1[p] = static_cast<std::uint32_t>(step >> 32);
      c2[p] = static_cast<std::uint32_t>(base + p) | (tag << 16);
      c3[p] = stream;
    }
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int r = 0; r < 10; ++r) {
#pragma omp simd
      for (std::size_t p = 0; p < kBlock; ++p) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0[p];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2[p];
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[p] ^ k0;
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[p] ^ k1;
        c1[p] = static_cast<std::uint32_t>(p1);
        c3[p] = static_cast<std::uint32_t>(p0);
        c0[p] = n0;
        c2[p] = n2;
      }
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    // 53-bit uniforms; the first lies in (0,1) so the logarithm is finite.
#pragma omp simd
    for (std::size_t p = 0; p < n; ++p) {
      const std::uint64_t a = ((std::uint64_t{c0[p]} << 32) | c1[p]) >> 11;
      const std::uint64_t b = ((std::uint64_t{c2[p]} << 32) | c3[p]) >> 11;
      const double u1 = (static_cast<double>(static_cast<std::int64_t>(a)) + 0.5) * 0x1p-53;
      radius[p] = std::sqrt(-2.0 * std::log(u1));
      angle[p] = kTwoPi * static_cast<double>(static_cast<std::int64_t>(b)) * 0x1p-53;
    }
    double* lo = out + base;
#pragma omp simd
    for (std::size_t p = 0; p < n; ++p) lo[p] = radius[p] * std::cos(angle[p]);
    // The sine half fills the upper modes; for odd counts the last one is dropped.
    const std::size_t upper = std::min(n, count - pairs - std::min(count - pairs, base));
    double* hi = out + pairs + base;
#pragma omp simd
    for (std::size_t p = 0; p < upper; ++p) hi[p] = radius[p] * std::sin(angle[p]);
  }
}

}  // namespace smx::kernels
