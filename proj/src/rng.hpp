#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "minkowski.hpp"

namespace dwk {

// Counter-based random streams: every draw is a pure function of
// (seed, index, slot), so parallel and serial sweeps produce identical
// values no matter how the work is partitioned.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t index,
                         std::uint64_t slot = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (slot * 0x9e3779b97f4a7c15ULL + 1));
}

// Uniform in [0, 1).
inline double uniform(std::uint64_t seed, std::uint64_t index,
                      std::uint64_t slot = 0) {
  return static_cast<double>(key(seed, index, slot) >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1]; safe as a log argument.
inline double uniform_pos(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t slot = 0) {
  return 1.0 - uniform(seed, index, slot);
}

// Standard normal via Box-Muller; consumes slots (slot, slot+1).
inline double normal(std::uint64_t seed, std::uint64_t index,
                     std::uint64_t slot = 0) {
  double u1 = uniform_pos(seed, index, slot);
  double u2 = uniform(seed, index, slot + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Uniform direction on the unit 2-sphere; consumes slots (slot, slot+1).
inline std::array<double, 3> sphere_dir(std::uint64_t seed, std::uint64_t index,
                                        std::uint64_t slot = 0) {
  double c = 2.0 * uniform(seed, index, slot) - 1.0;
  double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  double phi = 2.0 * M_PI * uniform(seed, index, slot + 1);
  return {s * std::cos(phi), s * std::sin(phi), c};
}

// Random unit future timelike vector, rapidity uniform in [0, max_rapidity].
inline Vec4 unit_timelike(std::uint64_t seed, std::uint64_t index,
                          double max_rapidity = 2.0, std::uint64_t slot = 0) {
  double r = max_rapidity * uniform(seed, index, slot);
  return boosted_unit_timelike(r, sphere_dir(seed, index, slot + 1));
}

// Random future causal vector: y^0 = s, |y| = v*s with v in [0, 1].
inline Vec4 future_causal(std::uint64_t seed, std::uint64_t index,
                          std::uint64_t slot = 0) {
  double s = 0.1 + 4.9 * uniform(seed, index, slot);
  double v = uniform(seed, index, slot + 1);
  auto d = sphere_dir(seed, index, slot + 2);
  return {s, s * v * d[0], s * v * d[1], s * v * d[2]};
}

}  // namespace rng
}  // namespace dwk
