#include <cmath>
#include <numbers>

#include "sattn/error.hpp"
#include "sattn/rng.hpp"

namespace sattn {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view role) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char ch : role) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return splitmix64(seed ^ h);
}

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return splitmix64(key_ + counter_ * kGamma);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r = next_u64();
  while (r >= limit) r = next_u64();
  return r % n;
}

std::pair<double, double> CounterRng::normal_pair() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sattn
