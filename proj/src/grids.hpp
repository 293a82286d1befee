#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "error.hpp"

namespace dwk {

// Uniform 1-D grid.
struct Grid1D {
  double origin{0.0};
  double step{1.0};
  std::size_t count{1};

  static Grid1D from_range(double lo, double hi, double step) {
    if (!(step > 0.0)) throw config_range_error("grid step must be positive");
    if (!(hi > lo)) throw config_range_error("grid range must be increasing");
    auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    return {lo, step, n};
  }

  double at(std::size_t i) const { return origin + step * static_cast<double>(i); }
  double back() const { return at(count - 1); }
  std::size_t size() const { return count; }

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = at(i);
    return v;
  }

  bool contains(double x) const {
    return x >= origin - 1e-12 * step && x <= back() + 1e-12 * step;
  }

  // Cell index and fractional offset for interpolation.
  void locate(double x, std::size_t& i, double& frac) const {
    if (!contains(x)) throw numeric_error("sample outside grid");
    double t = (x - origin) / step;
    double fi = std::floor(t);
    if (fi < 0.0) fi = 0.0;
    i = static_cast<std::size_t>(fi);
    if (i >= count - 1) {
      i = count - 2;
      frac = 1.0;
    } else {
      frac = t - fi;
    }
  }
};

// Scalar field sampled over (sigma, q) with bilinear interpolation.
template <typename T>
struct Field2D {
  Grid1D sigma;
  Grid1D q;
  std::vector<T> values;  // row-major [i_sigma][i_q]

  Field2D() = default;
  Field2D(Grid1D s, Grid1D qq) : sigma(s), q(qq), values(s.count * qq.count, T{}) {}

  T& at(std::size_t is, std::size_t iq) { return values[is * q.count + iq]; }
  const T& at(std::size_t is, std::size_t iq) const {
    return values[is * q.count + iq];
  }

  T interp(double s, double x) const {
    std::size_t i, j;
    double fs, fq;
    sigma.locate(s, i, fs);
    q.locate(x, j, fq);
    const T v00 = at(i, j), v01 = at(i, j + 1);
    const T v10 = at(i + 1, j), v11 = at(i + 1, j + 1);
    return v00 * ((1 - fs) * (1 - fq)) + v01 * ((1 - fs) * fq) +
           v10 * (fs * (1 - fq)) + v11 * (fs * fq);
  }
};

using RealField2D = Field2D<double>;
using ComplexField2D = Field2D<std::complex<double>>;

}  // namespace dwk
