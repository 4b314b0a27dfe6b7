#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace essc {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Seedable random stream. Child streams are derived from the parent's seed
/// and a path of integer keys, so dataset element i of class c always sees the
/// same numbers regardless of generation order or thread count.
class RngStream {
 public:
  using engine_type = std::mt19937_64;
  using result_type = engine_type::result_type;

  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RngStream split(std::uint64_t key) const;
  RngStream split(std::initializer_list<std::uint64_t> path) const;
  RngStream split(std::string_view tag) const;

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mean, double stddev);

  engine_type& engine() { return engine_; }

  // UniformRandomBitGenerator interface.
  static constexpr result_type min() { return engine_type::min(); }
  static constexpr result_type max() { return engine_type::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace essc
