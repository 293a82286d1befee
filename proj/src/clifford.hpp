#pragma once

#include <array>
#include <complex>

#include "minkowski.hpp"

namespace dwk::clifford {

using complexd = std::complex<double>;

// Element of the complexified spacetime algebra, stored as a dense 4x4
// complex matrix in the Dirac representation (row-major).
class CliffordElement {
 public:
  CliffordElement() : m_{} {}

  complexd& at(int i, int j) { return m_[4 * i + j]; }
  const complexd& at(int i, int j) const { return m_[4 * i + j]; }

  CliffordElement operator+(const CliffordElement& o) const;
  CliffordElement operator-(const CliffordElement& o) const;
  CliffordElement operator*(const CliffordElement& o) const;  // matrix product
  CliffordElement operator*(complexd s) const;

  CliffordElement conj_transpose() const;
  double frobenius_norm() const;
  double max_abs_diff(const CliffordElement& o) const;

  static CliffordElement identity();
  static CliffordElement zero();

 private:
  std::array<complexd, 16> m_;
};

// Dirac representation gamma matrices: entries are exact 0, +-1, +-i, so the
// Clifford relations hold with zero floating-point error.
struct GammaBasis {
  std::array<CliffordElement, 4> gamma;  // gamma^0 .. gamma^3
  CliffordElement identity;
  CliffordElement gamma5;                   // i g0 g1 g2 g3
  std::array<std::array<double, 4>, 4> metric;  // diag(1,-1,-1,-1)
};

const GammaBasis& gamma_basis();

// {a, b} = ab + ba
CliffordElement anticommutator(const CliffordElement& a, const CliffordElement& b);

// Clifford reversion: g0 a^dagger g0.
CliffordElement dirac_adjoint(const CliffordElement& a);

// Coefficient of the identity in the basis expansion, i.e. tr(a)/4.
complexd scalar_part(const CliffordElement& a);

// Element of the five-dimensional subspace spanned by {I, gamma^mu}:
// psi I + psi_mu gamma^mu, with psi_mu stored index-down.
struct BElement {
  complexd psi{};
  std::array<complexd, 4> psi_mu{};

  BElement operator+(const BElement& o) const {
    BElement r;
    r.psi = psi + o.psi;
    for (int m = 0; m < 4; ++m) r.psi_mu[m] = psi_mu[m] + o.psi_mu[m];
    return r;
  }
  BElement operator*(complexd s) const {
    BElement r;
    r.psi = s * psi;
    for (int m = 0; m < 4; ++m) r.psi_mu[m] = s * psi_mu[m];
    return r;
  }
  // psi^mu = eta^{mu nu} psi_nu
  complexd psi_up(int mu) const { return metric_diag(mu) * psi_mu[mu]; }
};

// Pruefer data of a wave-function value: amplitude-squared rho >= 0, phase
// magnitude zeta >= 0, and the unit future timelike phase direction u^mu.
struct PolarData {
  double rho{1.0};
  double zeta{0.0};
  Vec4 u{1.0, 0.0, 0.0, 0.0};  // index-up components
};

// Validates the PolarData invariants (rho >= 0, zeta >= 0, u unit future
// timelike within tol); throws dwk::Error(numeric) on violation.
void validate_polar(const PolarData& p, double tol = 1e-12);

// psi = sqrt(rho) cos(zeta/lambda), psi_mu = i sqrt(rho) sin(zeta/lambda) u_mu.
// The zeta -> 0 direction degeneracy resolves to psi_mu = 0.
BElement b_from_polar(const PolarData& p, double lambda);

CliffordElement b_to_matrix(const BElement& b);

struct BProjection {
  BElement b;
  double residual;  // Frobenius norm of the component outside span{I, gamma^mu}
};

BProjection matrix_to_b(const CliffordElement& a);

// (adjoint(Phi) Psi)_sc for B elements, via the component closed form
// phi^* psi + phi^*_mu psi^mu. The matrix-trace route must agree.
complexd b_pairing(const BElement& phi, const BElement& psi);

}  // namespace dwk::clifford
