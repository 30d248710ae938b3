#include "nullwit/rng.hpp"

#include <algorithm>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace nullwit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream_id ^ 0x6a09e667f3bcc909ULL))) {}

RngStream RngStream::derive(std::uint64_t child) const {
  return RngStream(splitmix64(seed_ ^ 0xbb67ae8584caa73bULL) ^ stream_id_,
                   splitmix64(child + 1));
}

double RngStream::uniform() {
  boost::random::uniform_01<double> dist;
  return dist(engine_);
}

double RngStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RngStream::exponential() {
  boost::random::exponential_distribution<double> dist(1.0);
  return dist(engine_);
}

std::int64_t RngStream::binomial(std::int64_t trials, double probability) {
  if (trials <= 0 || probability <= 0.0) return 0;
  if (probability >= 1.0) return trials;
  boost::random::binomial_distribution<std::int64_t, double> dist(trials, probability);
  return std::clamp<std::int64_t>(dist(engine_), 0, trials);
}

}  // namespace nullwit
