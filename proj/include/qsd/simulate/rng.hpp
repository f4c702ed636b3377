#pragma once

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <cstdint>

namespace qsd::simulate {

using Engine = boost::random::mt19937_64;

/// Random source of one path. Boost distributions are used for their
/// platform-independent output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double exponential() { return exponential_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  Engine engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_01<double> uniform_;
  boost::random::exponential_distribution<double> exponential_;
};

/// Stream i is seeded by a keyed hash of (master_seed, i), so every result is
/// a function of the master seed and path indices only, never of the
/// worker count.
struct RngPolicy {
  std::uint64_t master_seed = 0;

  static std::uint64_t mix(std::uint64_t z);
  std::uint64_t stream_seed(std::uint64_t stream) const;
  Rng stream(std::uint64_t index) const { return Rng(stream_seed(index)); }
};

}  // namespace qsd::simulate
