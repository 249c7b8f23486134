#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace swarm {

using Rng = std::mt19937_64;

/// Purpose tags for independent per-robot streams. Each robot owns one
/// stream per purpose so evaluation order never changes any draw.
enum class StreamPurpose : std::uint64_t {
  kWorldSetup = 1,
  kNav = 2,
  kCamera = 3,
  kGrasp = 4,
  kStrategy = 5,
  kBlackboard = 6,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t round_seed, StreamPurpose purpose, int robot_id = -1) {
  std::uint64_t h = splitmix64(round_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(robot_id)));
  return Rng(h);
}

inline double gaussian(Rng& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::bernoulli_distribution(p)(rng);
}

/// First-order Gauss-Markov process with stationary marginal N(0, sigma^2).
/// correlation_time == 0 degenerates to white noise.
class GaussMarkov {
 public:
  GaussMarkov() = default;
  GaussMarkov(double sigma, double correlation_time, double dt)
      : sigma_(sigma),
        decay_(correlation_time > 0.0 ? std::exp(-dt / correlation_time) : 0.0) {}

  double next(Rng& rng) {
    if (sigma_ == 0.0) return 0.0;
    if (!started_) {
      value_ = gaussian(rng, sigma_);
      started_ = true;
    } else {
      value_ = decay_ * value_ + std::sqrt(1.0 - decay_ * decay_) * gaussian(rng, sigma_);
    }
    return value_;
  }

 private:
  double sigma_ = 0.0;
  double decay_ = 0.0;
  double value_ = 0.0;
  bool started_ = false;
};

}  // namespace swarm
