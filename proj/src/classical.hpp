#pragma once

#include <functional>
#include <span>
#include <vector>

#include "grids.hpp"
#include "minkowski.hpp"

namespace dwk::classical {

// Thrown near the tan/sec poles of the oscillator closed forms and whenever
// a characteristic reaches a phase singularity.
class CausticError : public Error {
 public:
  explicit CausticError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

class OutOfGridError : public Error {
 public:
  explicit OutOfGridError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

// Harmonic-oscillator scalar field, V(q) = omega^2 q^2 / 2, with plane-wave
// direction n (unit future timelike) and initial data (q0, B0) at sigma0.
struct HarmonicParams {
  double omega{1.0};
  double q0{1.0};
  double B0{0.0};
  double sigma0{0.0};
  Vec4 n{1.0, 0.0, 0.0, 0.0};
};

void validate(const HarmonicParams& p, double tol = 1e-12);

// Reduced Hamilton-Jacobi phase of the oscillator:
// f = -(omega/2)(B0^2/omega^2 + q^2) tan(omega(sigma-sigma0))
//     + B0 q sec(omega(sigma-sigma0)).
double oscillator_f(double sigma, double q, const HarmonicParams& p);

// Transported density g(sigma,q) = g0(q sec - (B0/omega) tan) * sec.
double oscillator_g(double sigma, double q, const HarmonicParams& p,
                    const std::function<double(double)>& g0);

// Oscillator trajectory q0 cos(omega sigma') + (B0/omega) sin(omega sigma'),
// sigma' = sigma - sigma0.
double classical_beable(double sigma, const HarmonicParams& p);

// Covariant Hamilton-Jacobi vectorfield S^mu(x, q), either a closed form or
// a plane-wave grid profile f(sigma, q) along direction n.
class SVectorField {
 public:
  using Evaluator = std::function<Vec4(const Vec4& x, std::span<const double> q)>;

  static SVectorField from_function(Evaluator e, int target_dim = 1);
  // S^mu = f(n.x, q) n^mu with closed-form f.
  static SVectorField plane_wave(std::function<double(double, double)> f, Vec4 n);
  // Same, backed by a gridded profile (bilinear interpolation, out-of-grid
  // samples are errors).
  static SVectorField plane_wave_grid(RealField2D f, Vec4 n);
  static SVectorField oscillator(const HarmonicParams& p);

  Vec4 value(const Vec4& x, std::span<const double> q) const;
  int target_dim() const { return target_dim_; }

 private:
  Evaluator eval_;
  int target_dim_{1};
};

// Scalar density field rho(x, q), closed-form or plane-wave gridded.
class DensityField {
 public:
  using Evaluator = std::function<double(const Vec4& x, std::span<const double> q)>;

  static DensityField from_function(Evaluator e);
  static DensityField plane_wave(std::function<double(double, double)> g, Vec4 n);
  static DensityField plane_wave_grid(RealField2D g, Vec4 n);

  double value(const Vec4& x, std::span<const double> q) const;

 private:
  Evaluator eval_;
};

using Potential = std::function<double(std::span<const double>)>;

// Residual of d_mu S^mu + (1/2) d_a S^mu d^a S_mu + V at (x, q).
// Derivatives are centered differences with step h.
double dwhj_residual(const SVectorField& s, const Potential& v, const Vec4& x,
                     std::span<const double> q, double h = 1e-4);

// Components of dw^a + w^b ^ d_b w^a with w^a = d^a S_mu dx^mu, indexed
// [a][pair] over the 6 ordered pairs mu < nu.
std::vector<std::array<double, 6>> integrability_residual(
    const SVectorField& s, const Vec4& x, std::span<const double> q,
    double h = 1e-4);

// max over mu of |d_mu rho + d_a (rho d^a S_mu)| at (x, q).
double continuity_residual(const DensityField& rho, const SVectorField& s,
                           const Vec4& x, std::span<const double> q,
                           double h = 1e-4);

// Validator for the plane-wave sign restrictions (f >= 0, d_sigma f <= 0,
// g >= 0). Violations are reported, not fatal: the oscillator closed forms
// violate the first two on parts of their domain.
struct PlaneWaveRestrictionReport {
  double worst_negative_f{0.0};        // min(f, 0) over samples
  double worst_positive_dsigma_f{0.0}; // max(d_sigma f, 0)
  double worst_negative_g{0.0};        // min(g, 0)
  bool clean() const {
    return worst_negative_f == 0.0 && worst_positive_dsigma_f == 0.0 &&
           worst_negative_g == 0.0;
  }
};

PlaneWaveRestrictionReport check_plane_wave_restrictions(
    const std::function<double(double, double)>& f,
    const std::function<double(double, double)>& g, const Grid1D& sigma_grid,
    const Grid1D& q_grid, double h = 1e-4);

// Integrates the classical guiding law d_mu phi^a = d^a S_mu along the
// straight line x(tau) = x0 + tau * dir by RK4.
struct BeableSample {
  double tau;
  std::vector<double> phi;
};

std::vector<BeableSample> classical_guiding_integrate(
    const SVectorField& s, const Vec4& x0, std::span<const double> q0,
    const Vec4& dir, double tau_end, std::size_t steps, double h = 1e-5);

// Max relative drift of the mass of [a0, b0] transported by the plane-wave
// flow dq/dsigma = d_q f. `whole_line` freezes the endpoints (total mass).
double mass_invariance(const std::function<double(double, double)>& f,
                       const std::function<double(double, double)>& g,
                       double a0, double b0, double sigma0, double sigma_end,
                       std::size_t checkpoints, bool whole_line = false,
                       std::size_t quad_cells = 4000, double h = 1e-5);

}  // namespace dwk::classical
