#include "classical.hpp"

#include <cmath>

namespace dwk::classical {

namespace {
constexpr double kCausticTol = 1e-8;

double checked_cos(double omega_dsigma) {
  double c = std::cos(omega_dsigma);
  if (std::abs(c) < kCausticTol)
    throw CausticError("oscillator phase at a tan/sec pole");
  return c;
}
}  // namespace

void validate(const HarmonicParams& p, double tol) {
  if (!(p.omega > 0.0)) throw numeric_error("harmonic params: omega must be positive");
  if (!(p.n[0] > 0.0)) throw numeric_error("harmonic params: n must be future-directed");
  if (std::abs(minkowski_dot(p.n, p.n) - 1.0) > tol)
    throw numeric_error("harmonic params: n must be unit timelike");
}

double oscillator_f(double sigma, double q, const HarmonicParams& p) {
  double w = p.omega * (sigma - p.sigma0);
  double c = checked_cos(w);
  double tan_w = std::sin(w) / c;
  double sec_w = 1.0 / c;
  return -0.5 * p.omega * (p.B0 * p.B0 / (p.omega * p.omega) + q * q) * tan_w +
         p.B0 * q * sec_w;
}

double oscillator_g(double sigma, double q, const HarmonicParams& p,
                    const std::function<double(double)>& g0) {
  double w = p.omega * (sigma - p.sigma0);
  double c = checked_cos(w);
  double sec_w = 1.0 / c;
  double tan_w = std::sin(w) * sec_w;
  return g0(q * sec_w - p.B0 / p.omega * tan_w) * sec_w;
}

double classical_beable(double sigma, const HarmonicParams& p) {
  double w = p.omega * (sigma - p.sigma0);
  return p.q0 * std::cos(w) + p.B0 / p.omega * std::sin(w);
}

SVectorField SVectorField::from_function(Evaluator e, int target_dim) {
  SVectorField f;
  f.eval_ = std::move(e);
  f.target_dim_ = target_dim;
  return f;
}

SVectorField SVectorField::plane_wave(std::function<double(double, double)> f,
                                      Vec4 n) {
  auto fn = [f = std::move(f), n](const Vec4& x, std::span<const double> q) {
    double sigma = minkowski_dot(n, x);
    return scale(n, f(sigma, q[0]));
  };
  return from_function(std::move(fn), 1);
}

SVectorField SVectorField::plane_wave_grid(RealField2D f, Vec4 n) {
  auto fn = [f = std::move(f), n](const Vec4& x, std::span<const double> q) {
    double sigma = minkowski_dot(n, x);
    double val;
    try {
      val = f.interp(sigma, q[0]);
    } catch (const Error&) {
      throw OutOfGridError("plane-wave profile sampled outside its grid");
    }
    return scale(n, val);
  };
  return from_function(std::move(fn), 1);
}

SVectorField SVectorField::oscillator(const HarmonicParams& p) {
  validate(p);
  return plane_wave([p](double s, double q) { return oscillator_f(s, q, p); }, p.n);
}

Vec4 SVectorField::value(const Vec4& x, std::span<const double> q) const {
  return eval_(x, q);
}

DensityField DensityField::from_function(Evaluator e) {
  DensityField f;
  f.eval_ = std::move(e);
  return f;
}

DensityField DensityField::plane_wave(std::function<double(double, double)> g,
                                      Vec4 n) {
  return from_function([g = std::move(g), n](const Vec4& x, std::span<const double> q) {
    return g(minkowski_dot(n, x), q[0]);
  });
}

DensityField DensityField::plane_wave_grid(RealField2D g, Vec4 n) {
  return from_function([g = std::move(g), n](const Vec4& x, std::span<const double> q) {
    try {
      return g.interp(minkowski_dot(n, x), q[0]);
    } catch (const Error&) {
      throw OutOfGridError("plane-wave profile sampled outside its grid");
    }
  });
}

double DensityField::value(const Vec4& x, std::span<const double> q) const {
  return eval_(x, q);
}

namespace {

Vec4 shift_x(const Vec4& x, int mu, double h) {
  Vec4 y = x;
  y[mu] += h;
  return y;
}

std::vector<double> shift_q(std::span<const double> q, std::size_t a, double h) {
  std::vector<double> y(q.begin(), q.end());
  y[a] += h;
  return y;
}

// v^a_mu = d^a S_mu = d_a (eta_{mu nu} S^nu); rows a, columns mu.
std::vector<Vec4> velocity_matrix(const SVectorField& s, const Vec4& x,
                                  std::span<const double> q, double h) {
  std::size_t n = q.size();
  std::vector<Vec4> v(n);
  for (std::size_t a = 0; a < n; ++a) {
    auto qp = shift_q(q, a, h), qm = shift_q(q, a, -h);
    Vec4 sp = flip_index(s.value(x, qp));
    Vec4 sm = flip_index(s.value(x, qm));
    for (int mu = 0; mu < 4; ++mu) v[a][mu] = (sp[mu] - sm[mu]) / (2.0 * h);
  }
  return v;
}

}  // namespace

double dwhj_residual(const SVectorField& s, const Potential& v, const Vec4& x,
                     std::span<const double> q, double h) {
  double div = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Vec4 sp = s.value(shift_x(x, mu, h), q);
    Vec4 sm = s.value(shift_x(x, mu, -h), q);
    div += (sp[mu] - sm[mu]) / (2.0 * h);
  }
  auto vel = velocity_matrix(s, x, q, h);
  double grad = 0.0;
  for (std::size_t a = 0; a < vel.size(); ++a)
    for (int mu = 0; mu < 4; ++mu)
      grad += metric_diag(mu) * vel[a][mu] * vel[a][mu];
  return div + 0.5 * grad + v(q);
}

std::vector<std::array<double, 6>> integrability_residual(
    const SVectorField& s, const Vec4& x, std::span<const double> q, double h) {
  std::size_t n = q.size();
  auto v_at = [&](const Vec4& xx, std::span<const double> qq) {
    return velocity_matrix(s, xx, qq, h);
  };

  // d_mu v^a_nu by centered differences in x.
  std::vector<std::array<Vec4, 4>> dx_v(n);  // [a][mu][nu]
  for (int mu = 0; mu < 4; ++mu) {
    auto vp = v_at(shift_x(x, mu, h), q);
    auto vm = v_at(shift_x(x, mu, -h), q);
    for (std::size_t a = 0; a < n; ++a)
      for (int nu = 0; nu < 4; ++nu)
        dx_v[a][mu][nu] = (vp[a][nu] - vm[a][nu]) / (2.0 * h);
  }

  // d_b v^a_nu by centered differences in q.
  std::vector<std::vector<Vec4>> dq_v(n, std::vector<Vec4>(n));  // [b][a][nu]
  for (std::size_t b = 0; b < n; ++b) {
    auto qp = shift_q(q, b, h), qm = shift_q(q, b, -h);
    auto vp = v_at(x, qp);
    auto vm = v_at(x, qm);
    for (std::size_t a = 0; a < n; ++a)
      for (int nu = 0; nu < 4; ++nu)
        dq_v[b][a][nu] = (vp[a][nu] - vm[a][nu]) / (2.0 * h);
  }

  auto v0 = v_at(x, q);
  std::vector<std::array<double, 6>> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    int pair = 0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu + 1; nu < 4; ++nu) {
        double r = dx_v[a][mu][nu] - dx_v[a][nu][mu];
        for (std::size_t b = 0; b < n; ++b)
          r += v0[b][mu] * dq_v[b][a][nu] - v0[b][nu] * dq_v[b][a][mu];
        out[a][pair++] = r;
      }
  }
  return out;
}

double continuity_residual(const DensityField& rho, const SVectorField& s,
                           const Vec4& x, std::span<const double> q, double h) {
  std::size_t n = q.size();
  double worst = 0.0;
  // flux^a_mu = rho * v^a_mu evaluated where needed
  auto flux = [&](const Vec4& xx, std::span<const double> qq) {
    auto v = velocity_matrix(s, xx, qq, h);
    double r = rho.value(xx, qq);
    for (auto& row : v)
      for (int mu = 0; mu < 4; ++mu) row[mu] *= r;
    return v;
  };
  for (int mu = 0; mu < 4; ++mu) {
    double drho = (rho.value(shift_x(x, mu, h), q) - rho.value(shift_x(x, mu, -h), q)) /
                  (2.0 * h);
    double divq = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      auto qp = shift_q(q, a, h), qm = shift_q(q, a, -h);
      divq += (flux(x, qp)[a][mu] - flux(x, qm)[a][mu]) / (2.0 * h);
    }
    worst = std::max(worst, std::abs(drho + divq));
  }
  return worst;
}

PlaneWaveRestrictionReport check_plane_wave_restrictions(
    const std::function<double(double, double)>& f,
    const std::function<double(double, double)>& g, const Grid1D& sigma_grid,
    const Grid1D& q_grid, double h) {
  PlaneWaveRestrictionReport rep;
  for (std::size_t i = 0; i < sigma_grid.count; ++i)
    for (std::size_t j = 0; j < q_grid.count; ++j) {
      double s = sigma_grid.at(i), q = q_grid.at(j);
      double fv = f(s, q);
      double dfs = (f(s + h, q) - f(s - h, q)) / (2.0 * h);
      double gv = g(s, q);
      rep.worst_negative_f = std::min(rep.worst_negative_f, fv);
      rep.worst_positive_dsigma_f = std::max(rep.worst_positive_dsigma_f, dfs);
      rep.worst_negative_g = std::min(rep.worst_negative_g, gv);
    }
  return rep;
}

std::vector<BeableSample> classical_guiding_integrate(
    const SVectorField& s, const Vec4& x0, std::span<const double> q0,
    const Vec4& dir, double tau_end, std::size_t steps, double h) {
  if (steps == 0) throw numeric_error("classical_guiding_integrate: zero steps");
  std::size_t n = q0.size();
  double dtau = tau_end / static_cast<double>(steps);

  // dphi^a/dtau = dir^mu v^a_mu(x(tau), phi)
  auto rate = [&](double tau, const std::vector<double>& phi) {
    Vec4 x = add(x0, scale(dir, tau));
    auto v = velocity_matrix(s, x, phi, h);
    std::vector<double> r(n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
      for (int mu = 0; mu < 4; ++mu) r[a] += dir[mu] * v[a][mu];
    return r;
  };

  std::vector<BeableSample> out;
  out.reserve(steps + 1);
  std::vector<double> phi(q0.begin(), q0.end());
  out.push_back({0.0, phi});
  std::vector<double> k1, k2, k3, k4, tmp(n);
  for (std::size_t i = 0; i < steps; ++i) {
    double tau = dtau * static_cast<double>(i);
    k1 = rate(tau, phi);
    for (std::size_t a = 0; a < n; ++a) tmp[a] = phi[a] + 0.5 * dtau * k1[a];
    k2 = rate(tau + 0.5 * dtau, tmp);
    for (std::size_t a = 0; a < n; ++a) tmp[a] = phi[a] + 0.5 * dtau * k2[a];
    k3 = rate(tau + 0.5 * dtau, tmp);
    for (std::size_t a = 0; a < n; ++a) tmp[a] = phi[a] + dtau * k3[a];
    k4 = rate(tau + dtau, tmp);
    for (std::size_t a = 0; a < n; ++a)
      phi[a] += dtau / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    out.push_back({tau + dtau, phi});
  }
  return out;
}

namespace {

// RK4 for the scalar plane-wave flow dq/dsigma = d_q f.
double flow_endpoint(const std::function<double(double, double)>& f, double q_init,
                     double sigma0, double sigma1, std::size_t steps, double h) {
  auto rate = [&](double s, double q) {
    return (f(s, q + h) - f(s, q - h)) / (2.0 * h);
  };
  double ds = (sigma1 - sigma0) / static_cast<double>(steps);
  double q = q_init;
  for (std::size_t i = 0; i < steps; ++i) {
    double s = sigma0 + ds * static_cast<double>(i);
    double k1 = rate(s, q);
    double k2 = rate(s + 0.5 * ds, q + 0.5 * ds * k1);
    double k3 = rate(s + 0.5 * ds, q + 0.5 * ds * k2);
    double k4 = rate(s + ds, q + ds * k3);
    q += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return q;
}

double interval_mass(const std::function<double(double, double)>& g, double sigma,
                     double a, double b, std::size_t cells) {
  double hq = (b - a) / static_cast<double>(cells);
  double sum = 0.5 * (g(sigma, a) + g(sigma, b));
  for (std::size_t i = 1; i < cells; ++i)
    sum += g(sigma, a + hq * static_cast<double>(i));
  return sum * hq;
}

}  // namespace

double mass_invariance(const std::function<double(double, double)>& f,
                       const std::function<double(double, double)>& g,
                       double a0, double b0, double sigma0, double sigma_end,
                       std::size_t checkpoints, bool whole_line,
                       std::size_t quad_cells, double h) {
  if (!(b0 > a0)) throw numeric_error("mass_invariance: empty domain");
  if (checkpoints == 0) throw numeric_error("mass_invariance: no checkpoints");
  double m0 = interval_mass(g, sigma0, a0, b0, quad_cells);
  if (!(m0 > 0.0)) throw numeric_error("mass_invariance: zero-mass domain");

  double worst = 0.0;
  const std::size_t flow_steps = 2000;
  for (std::size_t k = 1; k <= checkpoints; ++k) {
    double sigma = sigma0 + (sigma_end - sigma0) * static_cast<double>(k) /
                               static_cast<double>(checkpoints);
    double a = a0, b = b0;
    if (!whole_line) {
      a = flow_endpoint(f, a0, sigma0, sigma, flow_steps, h);
      b = flow_endpoint(f, b0, sigma0, sigma, flow_steps, h);
    }
    double m = interval_mass(g, sigma, a, b, quad_cells);
    worst = std::max(worst, std::abs(m - m0) / m0);
  }
  return worst;
}

}  // namespace dwk::classical
