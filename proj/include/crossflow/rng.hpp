#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace crossflow {

// splitmix64 step; used to derive independent stream seeds from one master
// seed and as the fixed hash for per-cell sweep seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// mt19937_64 is bit-exact across platforms; the <random> distributions are
// not, so all sampling is hand-rolled on top of the raw engine.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // (0, 1]  (safe for log())
  double uniform01_open() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + uniform01() * (b - a); }
  bool bernoulli(double p) { return uniform01() < p; }

  // Knuth multiplication method; fine for the small step rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01_open();
    } while (p > limit);
    return k - 1;
  }

  // Box-Muller (cosine branch).
  double normal(double mean, double sd) {
    const double u1 = uniform01_open();
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) *
                     std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + sd * z;
  }

  double truncated_normal(double mean, double sd, double lo, double hi) {
    for (int i = 0; i < 1000; ++i) {
      const double v = normal(mean, sd);
      if (v >= lo && v <= hi) return v;
    }
    return 0.5 * (lo + hi);  // degenerate parameters
  }

 private:
  std::mt19937_64 engine_;
};

inline std::array<std::uint64_t, 4> derive_stream_seeds(std::uint64_t master) {
  std::uint64_t state = master;
  std::array<std::uint64_t, 4> seeds{};
  for (auto& s : seeds) s = splitmix64(state);
  return seeds;
}

// One stream per stochastic process, so changing e.g. the vehicle demand
// leaves the pedestrian arrival sequence untouched.
struct RngStreams {
  RandomStream ped_demand;
  RandomStream veh_demand;
  RandomStream placement;
  RandomStream desired_speed;

  explicit RngStreams(std::uint64_t master)
      : RngStreams(derive_stream_seeds(master)) {}

 private:
  explicit RngStreams(std::array<std::uint64_t, 4> s)
      : ped_demand(s[0]), veh_demand(s[1]), placement(s[2]), desired_speed(s[3]) {}
};

}  // namespace crossflow
