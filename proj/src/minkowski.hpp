#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace dwk {

// Spacetime 4-vectors on Minkowski space with signature (+,-,-,-).
using Vec4 = std::array<double, 4>;

constexpr double metric_diag(std::size_t mu) { return mu == 0 ? 1.0 : -1.0; }

// eta(a, b) = a^0 b^0 - a.b
inline double minkowski_dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

// Index lowering: a_mu = eta_{mu nu} a^nu (and raising, which is identical).
inline Vec4 flip_index(const Vec4& a) {
  return {a[0], -a[1], -a[2], -a[3]};
}

inline Vec4 add(const Vec4& a, const Vec4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Vec4 scale(const Vec4& a, double s) {
  return {s * a[0], s * a[1], s * a[2], s * a[3]};
}

inline bool is_future_causal(const Vec4& a, double tol = 0.0) {
  return a[0] >= -tol && minkowski_dot(a, a) >= -tol;
}

inline bool is_future_timelike(const Vec4& a, double tol = 0.0) {
  return a[0] > 0.0 && minkowski_dot(a, a) > tol;
}

// Unit future timelike vector from boost rapidity and spatial direction.
inline Vec4 boosted_unit_timelike(double rapidity, const std::array<double, 3>& dir) {
  double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
  return {ch, sh * dir[0], sh * dir[1], sh * dir[2]};
}

}  // namespace dwk
