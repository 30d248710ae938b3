#pragma once

#include <cstdint>
#include <random>

namespace nullwit {

// Deterministic random stream keyed by (seed, stream id). Distributions are
// taken from Boost.Random so draws do not depend on the standard library.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Independent child stream; identical (seed, stream, child) gives identical draws.
  RngStream derive(std::uint64_t child) const;

  double uniform();   // [0, 1)
  double normal();    // standard Gaussian
  double exponential();
  std::int64_t binomial(std::int64_t trials, double probability);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace nullwit
