#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace dwk::stats {

double normal_cdf(double x, double mean, double variance);

// Two-sided Kolmogorov-Smirnov distance between the empirical law of
// `samples` and the continuous CDF `cdf`. Sorts a copy of the samples.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// Inverse-CDF sampler over a uniform grid density: the discrete CDF is the
// left-cumulative sum of density*dq and is interpolated linearly inside each
// cell. Throws on degenerate (zero-mass or negative) densities.
class GridSampler {
 public:
  GridSampler(std::vector<double> grid, std::vector<double> density);

  // Deterministic draw from the counter-based stream (seed, index).
  double sample(std::uint64_t seed, std::uint64_t index) const;
  double quantile(double u) const;  // u in [0, 1)

 private:
  std::vector<double> grid_;
  std::vector<double> cdf_;
};

// Mean and variance of a gridded density by trapezoidal quadrature (the
// density need not be normalized; moments are taken of the normalized one).
struct Moments {
  double mass;
  double mean;
  double variance;
};
Moments grid_moments(const std::vector<double>& grid,
                     const std::vector<double>& density);

// CDF of a gridded density: cumulative trapezoid, linear in between,
// clamped to {0, 1} outside the grid.
class GridCdf {
 public:
  GridCdf(std::vector<double> grid, const std::vector<double>& density);
  double operator()(double x) const;

 private:
  std::vector<double> grid_;
  std::vector<double> cum_;
};

}  // namespace dwk::stats
