#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace sattn {

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Derives an independent stream key from a run seed and a stable role tag:
// splitmix64(seed ^ fnv1a64(role)). Every consumer of randomness gets its own
// tag ("init", "split", "shuffle", "sample", ...), so adding or reordering
// consumers never shifts another consumer's stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view role) noexcept;

// Counter-based generator: the n-th draw is splitmix64(key + n * gamma).
// Output depends only on (key, n), never on platform or library version.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t next_u64() noexcept;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;

  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

  // Two independent standard normals via Box-Muller.
  std::pair<double, double> normal_pair() noexcept;

  template <class T>
  void shuffle(std::vector<T>& items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace sattn
