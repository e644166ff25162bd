#pragma once

#include <cstdint>
#include <random>

namespace simplexsmooth {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed of an independent sub-stream identified by (seed, a, b).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

//! Seedable random stream.
/*! Wraps std::mt19937_64. Uniform, normal and gamma variates are generated
    here rather than through <random> distributions so that draws are
    reproducible across standard library implementations.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();
  /// Gamma(shape, 1) by Marsaglia and Tsang; shape >= 1 uses the direct
  /// squeeze, smaller shapes go through the u^{1/a} boost.
  double gamma(double shape);

  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

} // namespace simplexsmooth
