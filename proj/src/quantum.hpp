#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "clifford.hpp"
#include "grids.hpp"
#include "minkowski.hpp"

namespace dwk::quantum {

using complexd = std::complex<double>;

class NodeCrossingError : public Error {
 public:
  explicit NodeCrossingError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

class QuantumSingularityError : public Error {
 public:
  explicit QuantumSingularityError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

class DispersionError : public Error {
 public:
  explicit DispersionError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

class CoarseGridError : public Error {
 public:
  explicit CoarseGridError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

// Potential V(q) for a single scalar field: harmonic or tabulated.
class Potential {
 public:
  static Potential harmonic(double omega);
  static Potential tabulated(Grid1D grid, std::vector<double> values);
  static Potential zero();

  double operator()(double q) const { return eval_(q); }

 private:
  std::function<double(double)> eval_;
};

// Exact Gaussian-packet solution of the harmonic plane-wave system:
//   f = -(lambda/2) omega sigma - (omega/2)(2 q q0 sin(omega sigma)
//        - q0^2 sin(2 omega sigma) / 2)
//   g = normal density, mean q0 cos(omega sigma), variance lambda / (2 omega).
struct GaussianScenario {
  double omega{1.0};
  double q0{1.0};
  double lambda{0.1};
};

double analytic_gaussian_f(double sigma, double q, const GaussianScenario& s);
double analytic_gaussian_g(double sigma, double q, const GaussianScenario& s);
double analytic_gaussian_mean(double sigma, const GaussianScenario& s);
double analytic_gaussian_variance(const GaussianScenario& s);

// Effective wave function sqrt(g) exp(i f / lambda) on a stored
// (sigma, q) grid, plus the recovered (f, g).
struct QuantumProfile {
  double lambda{0.1};
  ComplexField2D psi_tilde;
  RealField2D f;  // NaN where the amplitude is below the node threshold
  RealField2D g;
  double norm_drift{0.0};  // relative drift of the slice L2 norm over the run

  std::vector<double> g_slice(std::size_t i_sigma) const;
};

struct EvolveOptions {
  std::size_t store_stride{10};  // store every k-th step
  std::size_t refine{8};         // internal q-grid refinement factor
  double pad_sigma{0.0};         // evolve slightly past the end for interpolation
};

// Unconditionally stable Crank-Nicolson evolution of
//   i lambda d_sigma psi = -(lambda^2/2) d_qq psi + V psi
// with homogeneous Dirichlet ends. The solver refines the requested q grid
// internally and stores slices on the requested grid, so the stored slice
// norm is conserved to roundoff.
QuantumProfile crank_nicolson_evolve(
    const std::function<complexd(double)>& initial, const Potential& v,
    double lambda, const Grid1D& sigma_grid, const Grid1D& q_grid,
    const EvolveOptions& opts = {});

// Phase unwrapping of psi_tilde: amplitude below 1e-8 of the global max is
// masked (NaN); the phase is anchored at the global amplitude maximum,
// unwrapped outward in q per slice and stitched across sigma at the anchor
// column. Throws NodeCrossingError when no valid stitch path exists.
void extract_f_g(QuantumProfile& profile);

// Pointwise residuals of the plane-wave quantum system. lambda == 0 drops
// the quantum-potential term (the classical reduction).
double quantum_hj_residual(const std::function<double(double, double)>& f,
                           const std::function<double(double, double)>& g,
                           const Potential& v, double lambda, double sigma,
                           double q, double h = 1e-4);

double continuity_residual(const std::function<double(double, double)>& f,
                           const std::function<double(double, double)>& g,
                           double sigma, double q, double h = 1e-4);

// Quantum-potential value (lambda^2/2) (d_qq sqrt g)/sqrt g at (sigma, q).
double quantum_potential(const std::function<double(double, double)>& g,
                         double lambda, double sigma, double q, double h = 1e-4);

// Plane-wave wave-function value sqrt(g) exp{(i/lambda) f gamma.n}:
// psi = sqrt(g) cos(f/lambda), psi_mu = i sqrt(g) sin(f/lambda) n_mu.
clifford::BElement plane_wave_b(double f, double g, const Vec4& n, double lambda);

// B-valued field sampled on a spacetime box cross q grid. Spacetime axes
// with a single node are treated as directions the field is constant along;
// axes with 2-4 nodes are rejected as too coarse for centered differences.
struct PsiGrid {
  std::array<Grid1D, 4> x;
  Grid1D q;
  std::vector<clifford::BElement> values;

  static PsiGrid sample(
      const std::array<Grid1D, 4>& axes, const Grid1D& q_grid,
      const std::function<clifford::BElement(const Vec4&, double)>& field);

  std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2,
                    std::size_t i3, std::size_t iq) const;
  const clifford::BElement& at(std::size_t i0, std::size_t i1, std::size_t i2,
                               std::size_t i3, std::size_t iq) const;
  Vec4 point(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) const;
};

// Residuals of the covariant system: r1 = i lambda d_mu psi - H psi_mu
// (4 components), r2 = i lambda d_mu psi^mu - H psi, r3 = d_mu psi_nu -
// d_nu psi_mu (6 components); maxima of |.| over interior nodes.
struct KanatchikovResiduals {
  double r1_max{0.0};
  double r2_max{0.0};
  double r3_max{0.0};
  std::size_t nodes{0};
  double max_all() const { return std::max(r1_max, std::max(r2_max, r3_max)); }
};

KanatchikovResiduals kanatchikov_residual(const PsiGrid& field, const Potential& v,
                                          double lambda);

// Discrete spectrum of H = -(lambda^2/2) d_qq + V with Dirichlet ends.
struct Eigenmode {
  int index{0};
  double energy{0.0};
  std::vector<double> profile;  // over q_grid, discrete-L2 normalized
};

std::vector<Eigenmode> hamiltonian_eigenmodes(const Potential& v, double lambda,
                                              const Grid1D& q_grid,
                                              std::size_t count);

// Separated single-mode solution psi = e^{-i k.x} mode(q) with
// psi_mu = (lambda k_mu / E) e^{-i k.x} mode(q); requires the dispersion
// relation lambda^2 k.k = E^2 to 1e-10.
PsiGrid mode_solution(const Eigenmode& mode, const Grid1D& mode_grid,
                      const Vec4& k_up, double lambda,
                      const std::array<Grid1D, 4>& axes);

// Fields (rho, zeta, u) over configuration space for the variational system.
struct RhoZetaUField {
  std::function<double(const Vec4&, double)> rho;
  std::function<double(const Vec4&, double)> zeta;
  std::function<Vec4(const Vec4&, double)> u;  // index-up components
};

struct VariationalResiduals {
  double zeta_eq{0.0};
  double rho_eq{0.0};
  Vec4 u_eq{0.0, 0.0, 0.0, 0.0};
  double constraint{0.0};
  double multiplier{0.0};  // the computed Lagrange multiplier
  double max_abs() const;
};

VariationalResiduals variational_residuals(const RhoZetaUField& fields,
                                           const Potential& v, double lambda,
                                           const Vec4& x, double q,
                                           double h = 1e-4);

// Pointwise Lagrangian densities and the two dropped terms; all four values
// share the same finite-difference primitives, so l_c - l_q - gap1 - gap2
// vanishes identically.
struct LagrangianGap {
  double l_q{0.0};
  double l_c{0.0};
  double gap1{0.0};
  double gap2{0.0};
};

LagrangianGap lagrangian_gap(const RhoZetaUField& fields, double lambda,
                             const Vec4& x, double q,
                             const Potential& v = Potential::zero(),
                             double h = 1e-4);

// Classical-limit sweep on the exact Gaussian solution: per lambda, the
// measured density std against sqrt(lambda/2 omega), the sup of the
// classical Hamilton-Jacobi defect over the moving packet window
// (|q - mean| <= 3 std), and the quantum-potential magnitude at the center.
struct LimitSweepRow {
  double lambda;
  double g_std;
  double g_std_predicted;
  double f_gap_sup;
  double qp_center;
};

std::vector<LimitSweepRow> classical_limit_sweep(
    const std::vector<double>& lambdas, double omega, double q0,
    double sigma_max, double caustic_margin = 0.35);

}  // namespace dwk::quantum
