#ifndef ZONODPP_RNG_HPP
#define ZONODPP_RNG_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace zonodpp {

// splitmix64 finalizer, used to whiten derived stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream ids: one independent stream per (domain, index) pair. The manifest
// records master seed + this derivation so every run is reproducible.
enum class StreamDomain : std::uint64_t {
  Tiling = 1,
  Weights = 2,
  Subset = 3,
  ChainInit = 4,
  Exact = 5,
  AldousBroder = 6,
  BasisExchange = 7,
  UnifZonotope = 8,
  VolZonotope = 9,
};

inline std::uint64_t stream_id(StreamDomain domain, std::uint64_t index = 0) {
  return (static_cast<std::uint64_t>(domain) << 32) | index;
}

// Seedable random stream with portable real-valued draws. The engine is the
// standard-specified mt19937_64; the distribution transforms are hand-rolled
// because std::uniform_real_distribution and friends are implementation
// defined, which would break the bit-identical trace contract across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream `id` of `master`: seeded with the id-th splitmix64 output.
  static Rng stream(std::uint64_t master, std::uint64_t id) {
    return Rng(mix64(master + 0x9e3779b97f4a7c15ULL * id));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on {0,...,n-1}, rejection sampling to avoid modulo bias.
  int uniform_int(int n) {
    const auto un = static_cast<std::uint64_t>(n);
    for (;;) {
      const std::uint64_t v = engine_();
      const std::uint64_t m = v % un;
      if (v - m <= std::numeric_limits<std::uint64_t>::max() - un + 1) {
        return static_cast<int>(m);
      }
    }
  }

  // Standard normal via Marsaglia's polar method; the paired deviate is
  // cached, so draws come in deterministic order.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Uniform direction on the unit sphere S^{dim-1}.
  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd d(dim);
    double norm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) d[i] = gaussian();
      norm = d.norm();
    } while (norm < 1e-12);
    return d / norm;
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace zonodpp

#endif
