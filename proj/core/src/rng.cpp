#include "essc/rng.hpp"

namespace essc {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

RngStream RngStream::split(std::uint64_t key) const {
  return RngStream(mix64(seed_ ^ mix64(key ^ 0x5851f42d4c957f2dULL)));
}

RngStream RngStream::split(std::initializer_list<std::uint64_t> path) const {
  RngStream out = *this;
  for (auto key : path) out = out.split(key);
  return out;
}

RngStream RngStream::split(std::string_view tag) const { return split(fnv1a64(tag)); }

double RngStream::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

double RngStream::normal(double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

}  // namespace essc
