#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "clifford.hpp"
#include "grids.hpp"
#include "minkowski.hpp"

namespace dwk::riesz {

class SingularTensorError : public Error {
 public:
  explicit SingularTensorError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

// Raised when slice data is not square-integrable (no spatial decay) or
// the slice integral is not strictly timelike.
class NotNormalizableError : public Error {
 public:
  explicit NotNormalizableError(const std::string& what)
      : Error(ErrorCode::numeric, what) {}
};

// Symmetric rank-two tensor T^{mu nu}, index up-up.
struct RieszTensor {
  std::array<std::array<double, 4>, 4> t{};

  double& at(int mu, int nu) { return t[mu][nu]; }
  double at(int mu, int nu) const { return t[mu][nu]; }

  // T^mu_nu y^nu (second index lowered with the metric).
  Vec4 apply_mixed(const Vec4& y_up) const;
  // T(a, b) = T^{mu nu} a_mu b_nu for index-up arguments.
  double contract(const Vec4& a_up, const Vec4& b_up) const;
  double max_abs() const;
  double symmetry_defect() const;
};

// T^{mu nu} = (1/4) tr(adjoint(Psi) gamma^mu Psi gamma^nu), computed through
// the matrix algebra. Throws if the imaginary residue exceeds 1e-10.
RieszTensor riesz_from_b(const clifford::BElement& b);

// Closed form from the polar decomposition:
// T = rho (cos^2 - sin^2)(zeta/lambda) eta + 2 rho sin^2(zeta/lambda) u u.
RieszTensor riesz_from_polar(const clifford::PolarData& p, double lambda);

// Same closed form on raw values (zeta may be any real, e.g. a phase f).
RieszTensor riesz_polar_raw(double rho, double zeta_over_lambda, const Vec4& u);

// Mixed-index inverse (1/rho) sec(2 zeta/lambda) {delta - 2 sin^2 u u};
// entry [mu][nu] is (T^-1)^mu_nu. Throws SingularTensorError near
// cos(2 zeta / lambda) = 0 or rho = 0.
std::array<std::array<double, 4>, 4> riesz_inverse(const clifford::PolarData& p,
                                                   double lambda);

// Randomized dominant-energy-condition check: T.Y stays future causal for
// future causal Y, and T(Y, Y) >= 0 for timelike Y.
struct DecReport {
  bool passed{true};
  double worst_causality{0.0};   // most negative eta(TY, TY)
  double worst_future{0.0};      // most negative (TY)^0
  double worst_quadratic{0.0};   // most negative T(Y, Y)
  std::size_t trials{0};
};

DecReport dec_check(const RieszTensor& t, std::size_t trials, std::uint64_t seed,
                    double tol = 1e-12);

// Configuration-space current K^{a nu} and its lowered form, by centered
// q-differences of a B-valued field (target dimension 1 here, so a = 0).
struct KCurrent {
  Vec4 k_up{};    // K^{0 nu}
  Vec4 k_down{};  // K^0_nu
};

using BField = std::function<clifford::BElement(const Vec4&, double)>;

KCurrent k_current(const BField& field, double lambda, const Vec4& x, double q,
                   double h = 1e-4);

// Residual of d_mu T^{mu nu} + d_a K^{a nu} per nu, centered differences.
Vec4 conservation_residual(const BField& field, double lambda, const Vec4& x,
                           double q, double h = 1e-3);

// The distinguished vectorfield from slice data.
struct XData {
  Vec4 x_tilde{};  // slice integral of T^{mu nu} n_nu
  Vec4 x{};        // x_tilde / eta(x_tilde, x_tilde)
  Vec4 x_hat{};    // unit vector along x_tilde
  double norm_x_tilde{0.0};
  double norm_x{0.0};  // 1 / norm_x_tilde
};

// Slice data: B values on a spatial box cross the q grid at fixed time.
struct SliceSpec {
  std::array<Grid1D, 3> s;
  Grid1D q;
};

using SliceField = std::function<clifford::BElement(const std::array<double, 3>&,
                                                    double)>;

// X~^mu = integral of T^{mu nu} n_nu over the slice (trapezoid), n the unit
// slice normal. Data must decay below `decay_tol` (relative to the slice
// max) at the spatial box edges, else it is rejected as not integrable;
// a null or spacelike integral refuses normalization.
XData xtilde_from_slice(const SliceSpec& spec, const SliceField& field,
                        const Vec4& normal = {1.0, 0.0, 0.0, 0.0},
                        double decay_tol = 1e-10);

// Integral of varrho = T(x_hat, x_hat) over the same slice.
double varrho_slice_integral(const SliceSpec& spec, const SliceField& field,
                             const XData& x);

// Currents J^mu = T^mu_nu X^nu and K^a = K^a_nu X^nu.
struct ConfigCurrent {
  Vec4 j{};
  double k{};  // single target dimension
};

ConfigCurrent currents_and_y(const RieszTensor& t, const KCurrent& k,
                             const XData& x);

// varrho = T(x_hat, x_hat) from polar data; never below rho.
double varrho(const clifford::PolarData& p, double lambda, const Vec4& x_hat);
double varrho_gap(const clifford::PolarData& p, double lambda, const Vec4& x_hat);

// Cosine taper over the outer fraction of a radial box: 1 inside, smooth
// ramp to 0 across [r0, r1].
double radial_taper(const std::array<double, 3>& s, double r0, double r1);

}  // namespace dwk::riesz
