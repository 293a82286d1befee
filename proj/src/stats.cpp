#include "stats.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace dwk::stats {

double normal_cdf(double x, double mean, double variance) {
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
  if (samples.empty()) throw numeric_error("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    double hi = (static_cast<double>(i) + 1.0) / n - f;
    double lo = f - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

GridSampler::GridSampler(std::vector<double> grid, std::vector<double> density)
    : grid_(std::move(grid)) {
  if (grid_.size() < 2 || grid_.size() != density.size())
    throw numeric_error("grid sampler: bad grid");
  cdf_.resize(grid_.size());
  cdf_[0] = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (density[i] < 0.0 || density[i - 1] < 0.0)
      throw numeric_error("grid sampler: negative density");
    cdf_[i] = cdf_[i - 1] +
              0.5 * (density[i] + density[i - 1]) * (grid_[i] - grid_[i - 1]);
  }
  double mass = cdf_.back();
  if (!(mass > 0.0)) throw numeric_error("grid sampler: zero-mass density");
  for (auto& c : cdf_) c /= mass;
}

double GridSampler::quantile(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t hi = std::min<std::size_t>(
      std::max<std::ptrdiff_t>(1, it - cdf_.begin()), cdf_.size() - 1);
  std::size_t lo = hi - 1;
  double span = cdf_[hi] - cdf_[lo];
  double t = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
  return grid_[lo] + t * (grid_[hi] - grid_[lo]);
}

double GridSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  return quantile(rng::uniform(seed, index));
}

GridCdf::GridCdf(std::vector<double> grid, const std::vector<double>& density)
    : grid_(std::move(grid)) {
  if (grid_.size() < 2 || grid_.size() != density.size())
    throw numeric_error("grid cdf: bad grid");
  cum_.resize(grid_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < grid_.size(); ++i)
    cum_[i] = cum_[i - 1] +
              0.5 * (density[i] + density[i - 1]) * (grid_[i] - grid_[i - 1]);
  double mass = cum_.back();
  if (!(mass > 0.0)) throw numeric_error("grid cdf: zero mass");
  for (auto& c : cum_) c /= mass;
}

double GridCdf::operator()(double x) const {
  if (x <= grid_.front()) return 0.0;
  if (x >= grid_.back()) return 1.0;
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  std::size_t lo = hi - 1;
  double t = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
  return cum_[lo] + t * (cum_[hi] - cum_[lo]);
}

Moments grid_moments(const std::vector<double>& grid,
                     const std::vector<double>& density) {
  if (grid.size() < 2 || grid.size() != density.size())
    throw numeric_error("grid_moments: bad grid");
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double dq = grid[i] - grid[i - 1];
    m0 += 0.5 * dq * (density[i] + density[i - 1]);
    m1 += 0.5 * dq * (density[i] * grid[i] + density[i - 1] * grid[i - 1]);
    m2 += 0.5 * dq *
          (density[i] * grid[i] * grid[i] + density[i - 1] * grid[i - 1] * grid[i - 1]);
  }
  if (!(m0 > 0.0)) throw numeric_error("grid_moments: zero mass");
  double mean = m1 / m0;
  return {m0, mean, m2 / m0 - mean * mean};
}

}  // namespace dwk::stats
