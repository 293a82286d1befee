#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "grids.hpp"
#include "minkowski.hpp"
#include "quantum.hpp"
#include "riesz.hpp"

namespace dwk::guiding {

class FoldError : public Error {
 public:
  explicit FoldError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

// Point on a characteristic of the guiding flow.
struct CharacteristicState {
  double t{0.0};
  std::array<double, 3> s{0.0, 0.0, 0.0};
  double q{0.0};
  double tau{0.0};
};

// Quasilinear coefficients in the frame where the distinguished vectorfield
// points along e0: time_rate = T^0_0, space_rate^j = T^j_0, and field_rate =
// K^0_0, the q-velocity of the flow (the PDE reads
// time_rate d_t phi + space_rate^j d_j phi = field_rate).
struct GuidingCoefficients {
  double time_rate{1.0};
  std::array<double, 3> space_rate{0.0, 0.0, 0.0};
  double field_rate{0.0};
};

using CoefficientField = std::function<GuidingCoefficients(
    double t, const std::array<double, 3>& s, double q)>;

// Coefficients from a B-valued field, evaluated through the Riesz tensor and
// the configuration-space current.
GuidingCoefficients guiding_coefficients(const riesz::BField& field, double lambda,
                                         const Vec4& x, double q, double h = 1e-4);

// RK4 flow of dt/dtau = time_rate, ds/dtau = space_rate, dq/dtau =
// field_rate. Errors out where time_rate <= 0.
std::vector<CharacteristicState> integrate_characteristic(
    const CharacteristicState& start, const CoefficientField& coeffs, double dtau,
    std::size_t n_steps);

// Gridded coefficients over (t, s, q) with one spatial dimension; trilinear
// interpolation. The carrier for locality experiments: grid data can be
// edited pointwise.
struct CoefficientGrid {
  Grid1D t, s, q;
  std::vector<double> time_rate, space_rate, field_rate;

  static CoefficientGrid sample(const Grid1D& t, const Grid1D& s, const Grid1D& q,
                                const CoefficientField& coeffs);
  std::size_t index(std::size_t it, std::size_t is, std::size_t iq) const;
  GuidingCoefficients interp(double t, double s, double q) const;
  CoefficientField as_field() const;
};

// Field beable evolved from Cauchy data phi0 on a line of labels xi along
// the first spatial axis; Lagrangian output (position and field value per
// label per output time). Nodes are masked from the first sign change of
// d(s)/d(xi) onward.
struct FieldBeable {
  std::vector<double> xi;
  std::vector<double> t_out;
  std::vector<std::vector<double>> s;     // [time][label]
  std::vector<std::vector<double>> phi;   // [time][label]
  std::vector<std::vector<char>> valid;   // [time][label]
  double first_fold_time{std::numeric_limits<double>::infinity()};

  // Interpolated phi(t_out[it], s) from the pre-fold fan.
  double eulerian_phi(std::size_t it, double s_probe) const;
};

FieldBeable evolve_field_beable(const CoefficientField& coeffs,
                                const std::function<double(double)>& phi0,
                                const Grid1D& xi_grid, double t_final,
                                std::size_t n_out, double dt);

// Plane-wave guiding dq/dsigma = d_q f by RK4; f supplied as a closure
// (use profile_f for gridded profiles).
std::vector<std::array<double, 2>> planewave_guiding(
    const std::function<double(double, double)>& f, double q0, double sigma0,
    double sigma1, std::size_t steps, double h = 1e-5);

// f/g closures backed by a quantum profile (bilinear interpolation).
std::function<double(double, double)> profile_f(const quantum::QuantumProfile& p);
std::function<double(double, double)> profile_g(const quantum::QuantumProfile& p);

struct EquivarianceStat {
  double sigma_check{0.0};
  double ks{0.0};
  std::size_t n_samples{0};
};

// Draws n samples from g(0,.) by inverse CDF (counter-based streams keyed by
// (seed, index)), evolves each by the plane-wave guiding law, and returns
// the KS distance of the evolved ensemble against truth_cdf.
EquivarianceStat monte_carlo_equivariance(
    const quantum::QuantumProfile& profile, std::size_t n_samples,
    std::uint64_t seed, double sigma_check,
    const std::function<double(double)>& truth_cdf, unsigned threads = 1,
    double guiding_dsigma = 5e-3);

// Same, returning the evolved samples (for custom statistics).
std::vector<double> equivariance_samples(const quantum::QuantumProfile& profile,
                                         std::size_t n_samples, std::uint64_t seed,
                                         double sigma_check, unsigned threads = 1,
                                         double guiding_dsigma = 5e-3);

// Drift of the mass of a flowed interval of the profile density.
double mass_flow_invariance(const quantum::QuantumProfile& profile, double a0,
                            double b0, double sigma_end, std::size_t checkpoints,
                            bool whole_line = false);

}  // namespace dwk::guiding
