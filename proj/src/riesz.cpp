#include "riesz.hpp"

#include <cmath>

#include "rng.hpp"

namespace dwk::riesz {

using clifford::BElement;
using clifford::CliffordElement;
using clifford::gamma_basis;

Vec4 RieszTensor::apply_mixed(const Vec4& y_up) const {
  Vec4 y_down = flip_index(y_up);
  Vec4 out{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) out[mu] += t[mu][nu] * y_down[nu];
  return out;
}

double RieszTensor::contract(const Vec4& a_up, const Vec4& b_up) const {
  Vec4 a = flip_index(a_up), b = flip_index(b_up);
  double s = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) s += t[mu][nu] * a[mu] * b[nu];
  return s;
}

double RieszTensor::max_abs() const {
  double m = 0.0;
  for (const auto& row : t)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

double RieszTensor::symmetry_defect() const {
  double m = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) m = std::max(m, std::abs(t[mu][nu] - t[nu][mu]));
  return m;
}

RieszTensor riesz_from_b(const clifford::BElement& b) {
  const auto& basis = gamma_basis();
  CliffordElement psi = clifford::b_to_matrix(b);
  CliffordElement adj = clifford::dirac_adjoint(psi);
  RieszTensor out;
  double worst_imag = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    CliffordElement left = adj * basis.gamma[mu] * psi;
    for (int nu = 0; nu < 4; ++nu) {
      auto val = clifford::scalar_part(left * basis.gamma[nu]);
      worst_imag = std::max(worst_imag, std::abs(val.imag()));
      out.t[mu][nu] = val.real();
    }
  }
  if (worst_imag > 1e-10)
    throw numeric_error("riesz_from_b: imaginary residue above tolerance");
  return out;
}

RieszTensor riesz_polar_raw(double rho, double zeta_over_lambda, const Vec4& u) {
  double c = std::cos(zeta_over_lambda), s = std::sin(zeta_over_lambda);
  double iso = rho * (c * c - s * s);
  double aniso = 2.0 * rho * s * s;
  RieszTensor out;
  for (int mu = 0; mu < 4; ++mu) {
    out.t[mu][mu] = iso * metric_diag(mu);
    for (int nu = 0; nu < 4; ++nu) out.t[mu][nu] += aniso * u[mu] * u[nu];
  }
  return out;
}

RieszTensor riesz_from_polar(const clifford::PolarData& p, double lambda) {
  if (!(lambda > 0.0)) throw numeric_error("riesz_from_polar: lambda must be positive");
  clifford::validate_polar(p);
  return riesz_polar_raw(p.rho, p.zeta / lambda, p.u);
}

std::array<std::array<double, 4>, 4> riesz_inverse(const clifford::PolarData& p,
                                                   double lambda) {
  clifford::validate_polar(p);
  double c2 = std::cos(2.0 * p.zeta / lambda);
  if (!(p.rho > 0.0) || std::abs(c2) < 1e-10)
    throw SingularTensorError("riesz_inverse: tensor is singular here");
  double s = std::sin(p.zeta / lambda);
  double ssq = s * s;
  Vec4 u_down = flip_index(p.u);
  std::array<std::array<double, 4>, 4> inv{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double delta = mu == nu ? 1.0 : 0.0;
      inv[mu][nu] = (delta - 2.0 * ssq * p.u[mu] * u_down[nu]) / (p.rho * c2);
    }
  return inv;
}

DecReport dec_check(const RieszTensor& t, std::size_t trials, std::uint64_t seed,
                    double tol) {
  DecReport rep;
  rep.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    Vec4 y = rng::future_causal(seed, i);
    Vec4 ty = t.apply_mixed(y);
    double causality = minkowski_dot(ty, ty);
    double future = ty[0];
    rep.worst_causality = std::min(rep.worst_causality, causality);
    rep.worst_future = std::min(rep.worst_future, future);
    // strictly timelike probe for the quadratic form
    Vec4 z = rng::unit_timelike(seed, i, 2.0, 8);
    double quad = t.contract(z, z);
    rep.worst_quadratic = std::min(rep.worst_quadratic, quad);
    if (causality < -tol * std::max(1.0, t.max_abs() * t.max_abs()) ||
        future < -tol * std::max(1.0, t.max_abs()) ||
        quad < -tol * std::max(1.0, t.max_abs()))
      rep.passed = false;
  }
  return rep;
}

KCurrent k_current(const BField& field, double lambda, const Vec4& x, double q,
                   double h) {
  BElement bp = field(x, q + h), bm = field(x, q - h), b0 = field(x, q);
  BElement db;
  db.psi = (bp.psi - bm.psi) / (2.0 * h);
  for (int mu = 0; mu < 4; ++mu)
    db.psi_mu[mu] = (bp.psi_mu[mu] - bm.psi_mu[mu]) / (2.0 * h);

  // [(adjoint(Psi) dPsi - adjoint(dPsi) Psi) gamma^nu]_sc
  //   = (psi* dpsi^nu - psi dpsi*^nu) + (psi*^nu dpsi - psi^nu dpsi*)
  KCurrent out;
  double worst_imag = 0.0;
  for (int nu = 0; nu < 4; ++nu) {
    std::complex<double> z = std::conj(b0.psi) * db.psi_up(nu) +
                             std::conj(b0.psi_up(nu)) * db.psi;
    std::complex<double> val = 0.5 * lambda / std::complex<double>(0.0, 1.0) *
                               (z - std::conj(z));
    worst_imag = std::max(worst_imag, std::abs(val.imag()));
    out.k_up[nu] = val.real();
  }
  if (worst_imag > 1e-10)
    throw numeric_error("k_current: imaginary residue above tolerance");
  out.k_down = flip_index(out.k_up);
  return out;
}

Vec4 conservation_residual(const BField& field, double lambda, const Vec4& x,
                           double q, double h) {
  auto t_at = [&](const Vec4& xx) { return riesz_from_b(field(xx, q)); };
  Vec4 res{};
  for (int mu = 0; mu < 4; ++mu) {
    Vec4 xp = x, xm = x;
    xp[mu] += h;
    xm[mu] -= h;
    RieszTensor tp = t_at(xp), tm = t_at(xm);
    for (int nu = 0; nu < 4; ++nu)
      res[nu] += (tp.t[mu][nu] - tm.t[mu][nu]) / (2.0 * h);
  }
  KCurrent kp = k_current(field, lambda, x, q + h, h);
  KCurrent km = k_current(field, lambda, x, q - h, h);
  for (int nu = 0; nu < 4; ++nu)
    res[nu] += (kp.k_up[nu] - km.k_up[nu]) / (2.0 * h);
  return res;
}

namespace {

double trapezoid_weight(std::size_t i, std::size_t count) {
  return (i == 0 || i + 1 == count) ? 0.5 : 1.0;
}

}  // namespace

XData xtilde_from_slice(const SliceSpec& spec, const SliceField& field,
                        const Vec4& normal, double decay_tol) {
  Vec4 n_down = flip_index(normal);

  // decay scan over the spatial box boundary (all q), against the slice max
  double max_amp = 0.0, edge_amp = 0.0;
  for (std::size_t i = 0; i < spec.s[0].count; ++i)
    for (std::size_t j = 0; j < spec.s[1].count; ++j)
      for (std::size_t k = 0; k < spec.s[2].count; ++k) {
        bool edge = i == 0 || i + 1 == spec.s[0].count || j == 0 ||
                    j + 1 == spec.s[1].count || k == 0 || k + 1 == spec.s[2].count;
        // probing a coarse set of q values suffices for the decay scan
        for (std::size_t iq = 0; iq < spec.q.count; iq += std::max<std::size_t>(1, spec.q.count / 16)) {
          BElement b = field({spec.s[0].at(i), spec.s[1].at(j), spec.s[2].at(k)},
                             spec.q.at(iq));
          double amp = std::abs(b.psi);
          for (const auto& c : b.psi_mu) amp = std::max(amp, std::abs(c));
          max_amp = std::max(max_amp, amp);
          if (edge) edge_amp = std::max(edge_amp, amp);
        }
      }
  if (!(max_amp > 0.0))
    throw NotNormalizableError("slice integral: field vanishes on the slice");
  if (edge_amp > decay_tol * max_amp)
    throw NotNormalizableError(
        "slice integral: data does not decay at the spatial box edges (not "
        "square-integrable)");

  XData out;
  for (std::size_t i = 0; i < spec.s[0].count; ++i) {
    double wi = trapezoid_weight(i, spec.s[0].count);
    for (std::size_t j = 0; j < spec.s[1].count; ++j) {
      double wj = trapezoid_weight(j, spec.s[1].count);
      for (std::size_t k = 0; k < spec.s[2].count; ++k) {
        double wk = trapezoid_weight(k, spec.s[2].count);
        for (std::size_t iq = 0; iq < spec.q.count; ++iq) {
          double w = wi * wj * wk * trapezoid_weight(iq, spec.q.count);
          RieszTensor t = riesz_from_b(
              field({spec.s[0].at(i), spec.s[1].at(j), spec.s[2].at(k)},
                    spec.q.at(iq)));
          for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu)
              out.x_tilde[mu] += w * t.t[mu][nu] * n_down[nu];
        }
      }
    }
  }
  double cell =
      spec.s[0].step * spec.s[1].step * spec.s[2].step * spec.q.step;
  out.x_tilde = scale(out.x_tilde, cell);

  double xx = minkowski_dot(out.x_tilde, out.x_tilde);
  if (!(xx > 0.0) || !(out.x_tilde[0] > 0.0))
    throw NotNormalizableError(
        "slice integral is not strictly timelike future-directed; "
        "normalization refused");
  out.norm_x_tilde = std::sqrt(xx);
  out.x = scale(out.x_tilde, 1.0 / xx);
  out.x_hat = scale(out.x_tilde, 1.0 / out.norm_x_tilde);
  out.norm_x = 1.0 / out.norm_x_tilde;
  return out;
}

double varrho_slice_integral(const SliceSpec& spec, const SliceField& field,
                             const XData& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.s[0].count; ++i) {
    double wi = trapezoid_weight(i, spec.s[0].count);
    for (std::size_t j = 0; j < spec.s[1].count; ++j) {
      double wj = trapezoid_weight(j, spec.s[1].count);
      for (std::size_t k = 0; k < spec.s[2].count; ++k) {
        double wk = trapezoid_weight(k, spec.s[2].count);
        for (std::size_t iq = 0; iq < spec.q.count; ++iq) {
          double w = wi * wj * wk * trapezoid_weight(iq, spec.q.count);
          RieszTensor t = riesz_from_b(
              field({spec.s[0].at(i), spec.s[1].at(j), spec.s[2].at(k)},
                    spec.q.at(iq)));
          sum += w * t.contract(x.x_hat, x.x_hat);
        }
      }
    }
  }
  return sum * spec.s[0].step * spec.s[1].step * spec.s[2].step * spec.q.step;
}

ConfigCurrent currents_and_y(const RieszTensor& t, const KCurrent& k,
                             const XData& x) {
  ConfigCurrent out;
  out.j = t.apply_mixed(x.x);
  out.k = 0.0;
  Vec4 x_down = flip_index(x.x);
  for (int nu = 0; nu < 4; ++nu) out.k += k.k_up[nu] * x_down[nu];
  return out;
}

double varrho(const clifford::PolarData& p, double lambda, const Vec4& x_hat) {
  if (!(minkowski_dot(x_hat, x_hat) > 0.0) || !(x_hat[0] > 0.0))
    throw numeric_error("varrho: x_hat must be future timelike");
  RieszTensor t = riesz_from_polar(p, lambda);
  return t.contract(x_hat, x_hat);
}

double varrho_gap(const clifford::PolarData& p, double lambda, const Vec4& x_hat) {
  return varrho(p, lambda, x_hat) - p.rho;
}

double radial_taper(const std::array<double, 3>& s, double r0, double r1) {
  double r = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
  if (r <= r0) return 1.0;
  if (r >= r1) return 0.0;
  double t = (r - r0) / (r1 - r0);
  return 0.5 * (1.0 + std::cos(M_PI * t));
}

}  // namespace dwk::riesz
