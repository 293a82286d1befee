#include "clifford.hpp"

#include <cmath>

#include "error.hpp"

namespace dwk::clifford {

CliffordElement CliffordElement::operator+(const CliffordElement& o) const {
  CliffordElement r;
  for (int k = 0; k < 16; ++k) r.m_[k] = m_[k] + o.m_[k];
  return r;
}

CliffordElement CliffordElement::operator-(const CliffordElement& o) const {
  CliffordElement r;
  for (int k = 0; k < 16; ++k) r.m_[k] = m_[k] - o.m_[k];
  return r;
}

CliffordElement CliffordElement::operator*(const CliffordElement& o) const {
  CliffordElement r;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      complexd aik = m_[4 * i + k];
      if (aik == complexd{}) continue;
      for (int j = 0; j < 4; ++j) r.m_[4 * i + j] += aik * o.m_[4 * k + j];
    }
  return r;
}

CliffordElement CliffordElement::operator*(complexd s) const {
  CliffordElement r;
  for (int k = 0; k < 16; ++k) r.m_[k] = s * m_[k];
  return r;
}

CliffordElement CliffordElement::conj_transpose() const {
  CliffordElement r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m_[4 * i + j] = std::conj(m_[4 * j + i]);
  return r;
}

double CliffordElement::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : m_) s += std::norm(z);
  return std::sqrt(s);
}

double CliffordElement::max_abs_diff(const CliffordElement& o) const {
  double m = 0.0;
  for (int k = 0; k < 16; ++k) m = std::max(m, std::abs(m_[k] - o.m_[k]));
  return m;
}

CliffordElement CliffordElement::identity() {
  CliffordElement r;
  for (int i = 0; i < 4; ++i) r.at(i, i) = 1.0;
  return r;
}

CliffordElement CliffordElement::zero() { return CliffordElement(); }

namespace {

GammaBasis build_gamma_basis() {
  const complexd I(0.0, 1.0);
  GammaBasis b;
  b.identity = CliffordElement::identity();

  // gamma^0 = diag(1, 1, -1, -1)
  CliffordElement g0;
  g0.at(0, 0) = 1.0;
  g0.at(1, 1) = 1.0;
  g0.at(2, 2) = -1.0;
  g0.at(3, 3) = -1.0;

  // gamma^k = [[0, sigma_k], [-sigma_k, 0]]
  CliffordElement g1;
  g1.at(0, 3) = 1.0;
  g1.at(1, 2) = 1.0;
  g1.at(2, 1) = -1.0;
  g1.at(3, 0) = -1.0;

  CliffordElement g2;
  g2.at(0, 3) = -I;
  g2.at(1, 2) = I;
  g2.at(2, 1) = I;
  g2.at(3, 0) = -I;

  CliffordElement g3;
  g3.at(0, 2) = 1.0;
  g3.at(1, 3) = -1.0;
  g3.at(2, 0) = -1.0;
  g3.at(3, 1) = 1.0;

  b.gamma = {g0, g1, g2, g3};
  b.gamma5 = (g0 * g1 * g2 * g3) * I;

  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      b.metric[m][n] = (m == n) ? metric_diag(m) : 0.0;
  return b;
}

}  // namespace

const GammaBasis& gamma_basis() {
  static const GammaBasis basis = build_gamma_basis();
  return basis;
}

CliffordElement anticommutator(const CliffordElement& a, const CliffordElement& b) {
  return a * b + b * a;
}

CliffordElement dirac_adjoint(const CliffordElement& a) {
  const auto& g0 = gamma_basis().gamma[0];
  return g0 * a.conj_transpose() * g0;
}

complexd scalar_part(const CliffordElement& a) {
  return (a.at(0, 0) + a.at(1, 1) + a.at(2, 2) + a.at(3, 3)) * 0.25;
}

void validate_polar(const PolarData& p, double tol) {
  if (!(p.rho >= 0.0)) throw numeric_error("polar data: rho must be nonnegative");
  if (!(p.zeta >= 0.0)) throw numeric_error("polar data: zeta must be nonnegative");
  if (!(p.u[0] > 0.0)) throw numeric_error("polar data: u must be future-directed");
  double uu = minkowski_dot(p.u, p.u);
  if (std::abs(uu - 1.0) > tol)
    throw numeric_error("polar data: u must be unit timelike");
}

BElement b_from_polar(const PolarData& p, double lambda) {
  if (!(lambda > 0.0)) throw numeric_error("b_from_polar: lambda must be positive");
  validate_polar(p);
  double r = std::sqrt(p.rho);
  double c = std::cos(p.zeta / lambda);
  double s = std::sin(p.zeta / lambda);
  BElement out;
  out.psi = r * c;
  Vec4 u_down = flip_index(p.u);
  for (int m = 0; m < 4; ++m) out.psi_mu[m] = complexd(0.0, r * s * u_down[m]);
  return out;
}

CliffordElement b_to_matrix(const BElement& b) {
  const auto& basis = gamma_basis();
  CliffordElement r = basis.identity * b.psi;
  for (int m = 0; m < 4; ++m) r = r + basis.gamma[m] * b.psi_mu[m];
  return r;
}

BProjection matrix_to_b(const CliffordElement& a) {
  const auto& basis = gamma_basis();
  BProjection out;
  out.b.psi = scalar_part(a);
  // (gamma^nu a)_sc = psi_mu eta^{nu mu} = psi^nu
  for (int nu = 0; nu < 4; ++nu) {
    complexd up = scalar_part(basis.gamma[nu] * a);
    out.b.psi_mu[nu] = metric_diag(nu) * up;
  }
  out.residual = (a - b_to_matrix(out.b)).frobenius_norm();
  return out;
}

complexd b_pairing(const BElement& phi, const BElement& psi) {
  complexd s = std::conj(phi.psi) * psi.psi;
  for (int m = 0; m < 4; ++m)
    s += std::conj(phi.psi_mu[m]) * metric_diag(m) * psi.psi_mu[m];
  return s;
}

}  // namespace dwk::clifford
