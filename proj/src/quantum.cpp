#include "quantum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "stats.hpp"

namespace dwk::quantum {

Potential Potential::harmonic(double omega) {
  if (!(omega > 0.0)) throw numeric_error("harmonic potential: omega must be positive");
  Potential p;
  p.eval_ = [omega](double q) { return 0.5 * omega * omega * q * q; };
  return p;
}

Potential Potential::tabulated(Grid1D grid, std::vector<double> values) {
  if (values.size() != grid.count)
    throw numeric_error("tabulated potential: size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw numeric_error("tabulated potential: non-finite value");
  Potential p;
  p.eval_ = [grid, values = std::move(values)](double q) {
    std::size_t i;
    double t;
    grid.locate(q, i, t);
    return values[i] * (1.0 - t) + values[i + 1] * t;
  };
  return p;
}

Potential Potential::zero() {
  Potential p;
  p.eval_ = [](double) { return 0.0; };
  return p;
}

double analytic_gaussian_f(double sigma, double q, const GaussianScenario& s) {
  double ws = s.omega * sigma;
  return -0.5 * s.lambda * ws -
         0.5 * s.omega * (2.0 * q * s.q0 * std::sin(ws) -
                          0.5 * s.q0 * s.q0 * std::sin(2.0 * ws));
}

double analytic_gaussian_g(double sigma, double q, const GaussianScenario& s) {
  double var = analytic_gaussian_variance(s);
  double d = q - analytic_gaussian_mean(sigma, s);
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
}

double analytic_gaussian_mean(double sigma, const GaussianScenario& s) {
  return s.q0 * std::cos(s.omega * sigma);
}

double analytic_gaussian_variance(const GaussianScenario& s) {
  return 0.5 * s.lambda / s.omega;
}

std::vector<double> QuantumProfile::g_slice(std::size_t i_sigma) const {
  std::vector<double> out(g.q.count);
  for (std::size_t j = 0; j < g.q.count; ++j) out[j] = g.at(i_sigma, j);
  return out;
}

namespace {

// Cached Thomas factorization for a constant complex tridiagonal system with
// uniform off-diagonal.
struct TridiagSolver {
  std::vector<complexd> w;       // 1 / pivot
  std::vector<complexd> c_over;  // normalized upper diagonal
  complexd off;

  TridiagSolver(const std::vector<complexd>& diag, complexd off_) : off(off_) {
    std::size_t n = diag.size();
    w.resize(n);
    c_over.resize(n);
    complexd prev_c{};
    for (std::size_t i = 0; i < n; ++i) {
      complexd pivot = diag[i] - (i ? off * prev_c : complexd{});
      if (std::abs(pivot) < 1e-300)
        throw numeric_error("tridiagonal solve: singular assembly");
      w[i] = 1.0 / pivot;
      c_over[i] = off * w[i];
      prev_c = c_over[i];
    }
  }

  void solve(std::vector<complexd>& rhs) const {
    std::size_t n = rhs.size();
    rhs[0] *= w[0];
    for (std::size_t i = 1; i < n; ++i)
      rhs[i] = (rhs[i] - off * rhs[i - 1]) * w[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_over[i] * rhs[i + 1];
  }
};

double slice_norm(const std::vector<complexd>& psi, double dq) {
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return std::sqrt(s * dq);
}

}  // namespace

QuantumProfile crank_nicolson_evolve(
    const std::function<complexd(double)>& initial, const Potential& v,
    double lambda, const Grid1D& sigma_grid, const Grid1D& q_grid,
    const EvolveOptions& opts) {
  if (!(lambda > 0.0)) throw numeric_error("evolve: lambda must be positive");
  if (q_grid.count < 5 || sigma_grid.count < 2)
    throw numeric_error("evolve: grid too small");
  const std::size_t refine = std::max<std::size_t>(1, opts.refine);
  const std::size_t stride = std::max<std::size_t>(1, opts.store_stride);

  const double dsig = sigma_grid.step;
  std::size_t n_steps = sigma_grid.count - 1;
  if (opts.pad_sigma > 0.0)
    n_steps += static_cast<std::size_t>(std::ceil(opts.pad_sigma / dsig));
  n_steps = ((n_steps + stride - 1) / stride) * stride;

  // Internal fine grid; output nodes are every `refine`-th internal node.
  const std::size_t m = (q_grid.count - 1) * refine + 1;
  const double dq = q_grid.step / static_cast<double>(refine);
  std::vector<complexd> psi(m);
  for (std::size_t j = 0; j < m; ++j) {
    psi[j] = initial(q_grid.origin + dq * static_cast<double>(j));
    if (!std::isfinite(psi[j].real()) || !std::isfinite(psi[j].imag()))
      throw numeric_error("evolve: non-finite initial data");
  }
  psi.front() = 0.0;  // homogeneous Dirichlet box
  psi.back() = 0.0;

  // Crank-Nicolson, interior unknowns: A psi+ = B psi with A = I + iC,
  // B = I - iC, C real symmetric tridiagonal.
  const std::size_t dim = m - 2;
  const double beta = 0.5 * dsig * (0.5 * lambda / (dq * dq));  // off of C (negated)
  std::vector<complexd> diag_a(dim), diag_b(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double q = q_grid.origin + dq * static_cast<double>(i + 1);
    double delta = 0.5 * dsig * (lambda / (dq * dq) + v(q) / lambda);
    diag_a[i] = complexd(1.0, delta);
    diag_b[i] = complexd(1.0, -delta);
  }
  const complexd off_a(0.0, -beta), off_b(0.0, beta);
  TridiagSolver solver(diag_a, off_a);

  Grid1D stored_sigma{sigma_grid.origin, dsig * static_cast<double>(stride),
                      n_steps / stride + 1};
  QuantumProfile profile;
  profile.lambda = lambda;
  profile.psi_tilde = ComplexField2D(stored_sigma, q_grid);

  auto store = [&](std::size_t slot) {
    for (std::size_t j = 0; j < q_grid.count; ++j)
      profile.psi_tilde.at(slot, j) = psi[j * refine];
  };
  store(0);

  std::vector<complexd> rhs(dim);
  for (std::size_t step = 1; step <= n_steps; ++step) {
    for (std::size_t i = 0; i < dim; ++i) {
      rhs[i] = diag_b[i] * psi[i + 1];
      rhs[i] += off_b * psi[i];      // psi[0] and psi[m-1] stay zero
      rhs[i] += off_b * psi[i + 2];
    }
    solver.solve(rhs);
    for (std::size_t i = 0; i < dim; ++i) psi[i + 1] = rhs[i];
    if (step % stride == 0) store(step / stride);
  }

  double norm0 = 0.0, drift = 0.0;
  for (std::size_t k = 0; k < stored_sigma.count; ++k) {
    std::vector<complexd> slice(q_grid.count);
    for (std::size_t j = 0; j < q_grid.count; ++j) slice[j] = profile.psi_tilde.at(k, j);
    double nk = slice_norm(slice, q_grid.step);
    if (k == 0)
      norm0 = nk;
    else
      drift = std::max(drift, std::abs(nk - norm0) / norm0);
  }
  profile.norm_drift = drift;

  extract_f_g(profile);
  return profile;
}

void extract_f_g(QuantumProfile& profile) {
  const auto& psi = profile.psi_tilde;
  const std::size_t ns = psi.sigma.count, nq = psi.q.count;
  profile.f = RealField2D(psi.sigma, psi.q);
  profile.g = RealField2D(psi.sigma, psi.q);

  double max_amp = 0.0;
  std::size_t i0 = 0, j0 = 0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nq; ++j) {
      double a = std::abs(psi.at(i, j));
      profile.g.at(i, j) = a * a;
      if (a > max_amp) {
        max_amp = a;
        i0 = i;
        j0 = j;
      }
    }
  if (!(max_amp > 0.0)) throw NodeCrossingError("phase unwrap: field vanishes");
  const double threshold = 1e-8 * max_amp;
  const double lambda = profile.lambda;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& v : profile.f.values) v = nan;

  // Phase adjusted by whole turns to sit nearest the reference.
  auto branch_near = [&](complexd z, double ref) {
    double phase = lambda * std::arg(z);
    double turn = 2.0 * M_PI * lambda;
    double k = std::round((ref - phase) / turn);
    return phase + k * turn;
  };

  auto unwrap_slice = [&](std::size_t i, std::size_t j_ref, double ref_f) {
    profile.f.at(i, j_ref) = ref_f;
    double prev = ref_f;
    for (std::size_t j = j_ref + 1; j < nq; ++j) {
      if (std::abs(psi.at(i, j)) < threshold) break;  // masked beyond a node
      prev = branch_near(psi.at(i, j), prev);
      profile.f.at(i, j) = prev;
    }
    prev = ref_f;
    for (std::size_t j = j_ref; j-- > 0;) {
      if (std::abs(psi.at(i, j)) < threshold) break;
      prev = branch_near(psi.at(i, j), prev);
      profile.f.at(i, j) = prev;
    }
  };

  // Anchor slice, then stitch outward in sigma at the anchor column,
  // re-anchoring at a slice's own maximum when the column dies.
  unwrap_slice(i0, j0, lambda * std::arg(psi.at(i0, j0)));
  for (int dir : {+1, -1}) {
    std::size_t col = j0;
    std::size_t prev_i = i0;
    for (std::size_t step = 1;; ++step) {
      std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(i0) +
                          dir * static_cast<std::ptrdiff_t>(step);
      if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(ns)) break;
      std::size_t i = static_cast<std::size_t>(ii);
      if (std::abs(psi.at(i, col)) < threshold ||
          std::isnan(profile.f.at(prev_i, col))) {
        // re-anchor at this slice's maximum, if reachable from prev slice
        std::size_t best = nq;
        double best_amp = threshold;
        for (std::size_t j = 0; j < nq; ++j) {
          double a = std::abs(psi.at(i, j));
          if (a > best_amp && !std::isnan(profile.f.at(prev_i, j))) {
            best_amp = a;
            best = j;
          }
        }
        if (best == nq)
          throw NodeCrossingError("phase unwrap: no valid stitch path across sigma");
        col = best;
      }
      unwrap_slice(i, col, branch_near(psi.at(i, col), profile.f.at(prev_i, col)));
      prev_i = i;
    }
  }
}

namespace {
constexpr double kGFloor = 0.0;  // exact zeros and sign changes are nodes

double sqrt_checked(double g) {
  if (!(g > kGFloor) || !std::isfinite(g))
    throw QuantumSingularityError("quantum potential: density vanishes at sample");
  return std::sqrt(g);
}
}  // namespace

double quantum_potential(const std::function<double(double, double)>& g,
                         double lambda, double sigma, double q, double h) {
  double r0 = sqrt_checked(g(sigma, q));
  double rp = sqrt_checked(g(sigma, q + h));
  double rm = sqrt_checked(g(sigma, q - h));
  return 0.5 * lambda * lambda * (rp - 2.0 * r0 + rm) / (h * h) / r0;
}

double quantum_hj_residual(const std::function<double(double, double)>& f,
                           const std::function<double(double, double)>& g,
                           const Potential& v, double lambda, double sigma,
                           double q, double h) {
  double dfs = (f(sigma + h, q) - f(sigma - h, q)) / (2.0 * h);
  double dfq = (f(sigma, q + h) - f(sigma, q - h)) / (2.0 * h);
  double qp = lambda > 0.0 ? quantum_potential(g, lambda, sigma, q, h) : 0.0;
  return dfs + 0.5 * dfq * dfq + v(q) - qp;
}

double continuity_residual(const std::function<double(double, double)>& f,
                           const std::function<double(double, double)>& g,
                           double sigma, double q, double h) {
  double dgs = (g(sigma + h, q) - g(sigma - h, q)) / (2.0 * h);
  auto flux = [&](double qq) {
    double dfq = (f(sigma, qq + h) - f(sigma, qq - h)) / (2.0 * h);
    return g(sigma, qq) * dfq;
  };
  double div = (flux(q + h) - flux(q - h)) / (2.0 * h);
  return dgs + div;
}

clifford::BElement plane_wave_b(double f, double g, const Vec4& n, double lambda) {
  if (!(lambda > 0.0)) throw numeric_error("plane_wave_b: lambda must be positive");
  if (g < 0.0) throw numeric_error("plane_wave_b: negative density");
  double r = std::sqrt(g);
  double c = std::cos(f / lambda), s = std::sin(f / lambda);
  clifford::BElement b;
  b.psi = r * c;
  Vec4 n_down = flip_index(n);
  for (int mu = 0; mu < 4; ++mu) b.psi_mu[mu] = complexd(0.0, r * s * n_down[mu]);
  return b;
}

PsiGrid PsiGrid::sample(
    const std::array<Grid1D, 4>& axes, const Grid1D& q_grid,
    const std::function<clifford::BElement(const Vec4&, double)>& field) {
  PsiGrid out;
  out.x = axes;
  out.q = q_grid;
  std::size_t total = q_grid.count;
  for (const auto& ax : axes) total *= ax.count;
  out.values.resize(total);
  std::size_t idx = 0;
  for (std::size_t i0 = 0; i0 < axes[0].count; ++i0)
    for (std::size_t i1 = 0; i1 < axes[1].count; ++i1)
      for (std::size_t i2 = 0; i2 < axes[2].count; ++i2)
        for (std::size_t i3 = 0; i3 < axes[3].count; ++i3) {
          Vec4 x{axes[0].at(i0), axes[1].at(i1), axes[2].at(i2), axes[3].at(i3)};
          for (std::size_t iq = 0; iq < q_grid.count; ++iq)
            out.values[idx++] = field(x, q_grid.at(iq));
        }
  return out;
}

std::size_t PsiGrid::index(std::size_t i0, std::size_t i1, std::size_t i2,
                           std::size_t i3, std::size_t iq) const {
  return (((i0 * x[1].count + i1) * x[2].count + i2) * x[3].count + i3) * q.count + iq;
}

const clifford::BElement& PsiGrid::at(std::size_t i0, std::size_t i1,
                                      std::size_t i2, std::size_t i3,
                                      std::size_t iq) const {
  return values[index(i0, i1, i2, i3, iq)];
}

Vec4 PsiGrid::point(std::size_t i0, std::size_t i1, std::size_t i2,
                    std::size_t i3) const {
  return {x[0].at(i0), x[1].at(i1), x[2].at(i2), x[3].at(i3)};
}

KanatchikovResiduals kanatchikov_residual(const PsiGrid& field, const Potential& v,
                                          double lambda) {
  for (const auto& ax : field.x)
    if (ax.count > 1 && ax.count < 5)
      throw CoarseGridError("covariant residual: fewer than 5 nodes per axis");
  if (field.q.count < 5)
    throw CoarseGridError("covariant residual: fewer than 5 q nodes");

  const complexd i_unit(0.0, 1.0);
  const double dq = field.q.step;
  KanatchikovResiduals out;

  std::array<std::size_t, 4> lo{}, hi{};
  for (int mu = 0; mu < 4; ++mu) {
    lo[mu] = field.x[mu].count == 1 ? 0 : 1;
    hi[mu] = field.x[mu].count == 1 ? 1 : field.x[mu].count - 1;
  }

  std::array<std::size_t, 4> idx{};
  for (idx[0] = lo[0]; idx[0] < hi[0]; ++idx[0])
    for (idx[1] = lo[1]; idx[1] < hi[1]; ++idx[1])
      for (idx[2] = lo[2]; idx[2] < hi[2]; ++idx[2])
        for (idx[3] = lo[3]; idx[3] < hi[3]; ++idx[3])
          for (std::size_t iq = 1; iq + 1 < field.q.count; ++iq) {
            auto node = [&](int mu, int offset) -> const clifford::BElement& {
              auto shifted = idx;
              shifted[mu] = static_cast<std::size_t>(
                  static_cast<std::ptrdiff_t>(shifted[mu]) + offset);
              return field.at(shifted[0], shifted[1], shifted[2], shifted[3], iq);
            };
            const auto& center = field.at(idx[0], idx[1], idx[2], idx[3], iq);
            const auto& qp = field.at(idx[0], idx[1], idx[2], idx[3], iq + 1);
            const auto& qm = field.at(idx[0], idx[1], idx[2], idx[3], iq - 1);

            // centered spacetime gradients of all five components
            std::array<clifford::BElement, 4> grad{};
            for (int mu = 0; mu < 4; ++mu) {
              if (field.x[mu].count == 1) continue;
              const auto& p = node(mu, +1);
              const auto& m = node(mu, -1);
              double inv = 0.5 / field.x[mu].step;
              grad[mu].psi = (p.psi - m.psi) * inv;
              for (int nu = 0; nu < 4; ++nu)
                grad[mu].psi_mu[nu] = (p.psi_mu[nu] - m.psi_mu[nu]) * inv;
            }

            double vq = v(field.q.at(iq));
            auto ham = [&](complexd c, complexd pl, complexd mn) {
              return -0.5 * lambda * lambda * (pl - 2.0 * c + mn) / (dq * dq) +
                     vq * c;
            };

            double r1 = 0.0;
            for (int mu = 0; mu < 4; ++mu) {
              complexd val = i_unit * lambda * grad[mu].psi -
                             ham(center.psi_mu[mu], qp.psi_mu[mu], qm.psi_mu[mu]);
              r1 = std::max(r1, std::abs(val));
            }

            complexd div{};
            for (int mu = 0; mu < 4; ++mu)
              div += metric_diag(mu) * grad[mu].psi_mu[mu];
            double r2 = std::abs(i_unit * lambda * div -
                                 ham(center.psi, qp.psi, qm.psi));

            double r3 = 0.0;
            for (int mu = 0; mu < 4; ++mu)
              for (int nu = mu + 1; nu < 4; ++nu)
                r3 = std::max(r3,
                              std::abs(grad[mu].psi_mu[nu] - grad[nu].psi_mu[mu]));

            out.r1_max = std::max(out.r1_max, r1);
            out.r2_max = std::max(out.r2_max, r2);
            out.r3_max = std::max(out.r3_max, r3);
            ++out.nodes;
          }
  return out;
}

std::vector<Eigenmode> hamiltonian_eigenmodes(const Potential& v, double lambda,
                                              const Grid1D& q_grid,
                                              std::size_t count) {
  if (q_grid.count < 3) throw numeric_error("eigenmodes: grid too small");
  const std::size_t dim = q_grid.count - 2;
  if (count >= dim) throw numeric_error("eigenmodes: count must be below grid size");
  const double dq = q_grid.step;

  Eigen::VectorXd diag(dim), sub(dim - 1);
  for (std::size_t i = 0; i < dim; ++i)
    diag[static_cast<Eigen::Index>(i)] =
        lambda * lambda / (dq * dq) + v(q_grid.at(i + 1));
  sub.setConstant(-0.5 * lambda * lambda / (dq * dq));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw numeric_error("eigenmodes: eigensolver failed to converge");

  std::vector<Eigenmode> modes(count);
  for (std::size_t n = 0; n < count; ++n) {
    auto& mode = modes[n];
    mode.index = static_cast<int>(n);
    mode.energy = solver.eigenvalues()[static_cast<Eigen::Index>(n)];
    mode.profile.assign(q_grid.count, 0.0);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double c = solver.eigenvectors()(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(n));
      mode.profile[i + 1] = c;
      norm2 += c * c * dq;
    }
    double scale = 1.0 / std::sqrt(norm2);
    double peak = 0.0;
    for (double c : mode.profile) peak = std::abs(c) > std::abs(peak) ? c : peak;
    if (peak < 0.0) scale = -scale;
    for (auto& c : mode.profile) c *= scale;
  }
  return modes;
}

PsiGrid mode_solution(const Eigenmode& mode, const Grid1D& mode_grid,
                      const Vec4& k_up, double lambda,
                      const std::array<Grid1D, 4>& axes) {
  if (mode.profile.size() != mode_grid.count)
    throw numeric_error("mode_solution: profile/grid mismatch");
  double e = mode.energy;
  double kk = minkowski_dot(k_up, k_up);
  if (std::abs(lambda * lambda * kk - e * e) > 1e-10 * std::max(1.0, e * e))
    throw DispersionError("mode_solution: dispersion relation violated");

  Vec4 k_down = flip_index(k_up);
  auto field = [&, k_down, e, lambda](const Vec4& x, double q) {
    std::size_t j;
    double t;
    mode_grid.locate(q, j, t);
    double phi = mode.profile[j] * (1.0 - t) + mode.profile[j + 1] * t;
    // phase = -k_mu x^mu
    double phase = -(k_down[0] * x[0] + k_down[1] * x[1] + k_down[2] * x[2] +
                     k_down[3] * x[3]);
    complexd wave = std::polar(1.0, phase);
    clifford::BElement b;
    b.psi = wave * phi;
    for (int mu = 0; mu < 4; ++mu)
      b.psi_mu[mu] = wave * (lambda * k_down[mu] / e * phi);
    return b;
  };
  return PsiGrid::sample(axes, mode_grid, field);
}

double VariationalResiduals::max_abs() const {
  double m = std::max(std::abs(zeta_eq), std::abs(rho_eq));
  for (double c : u_eq) m = std::max(m, std::abs(c));
  return std::max(m, std::abs(constraint));
}

namespace {

Vec4 shift4(const Vec4& x, int mu, double h) {
  Vec4 y = x;
  y[mu] += h;
  return y;
}

}  // namespace

VariationalResiduals variational_residuals(const RhoZetaUField& fields,
                                           const Potential& v, double lambda,
                                           const Vec4& x, double q, double h) {
  const auto& rho = fields.rho;
  const auto& zeta = fields.zeta;
  const auto& u = fields.u;

  Vec4 u0 = u(x, q);
  if (!(minkowski_dot(u0, u0) > 0.0))
    throw numeric_error("variational residuals: u is not timelike at the sample");
  double rho0 = rho(x, q);
  double zeta0 = zeta(x, q);

  auto dx_scalar = [&](const std::function<double(const Vec4&, double)>& f, int mu) {
    return (f(shift4(x, mu, h), q) - f(shift4(x, mu, -h), q)) / (2.0 * h);
  };
  auto dq_scalar = [&](const std::function<double(const Vec4&, double)>& f) {
    return (f(x, q + h) - f(x, q - h)) / (2.0 * h);
  };

  double s2 = std::sin(2.0 * zeta0 / lambda);
  double c2 = std::cos(2.0 * zeta0 / lambda);
  double ssq = std::sin(zeta0 / lambda) * std::sin(zeta0 / lambda);

  // first derivatives of u (up components): dq_u[mu], dx_u[mu][nu]
  Vec4 dq_u;
  {
    Vec4 up = u(x, q + h), um = u(x, q - h);
    for (int mu = 0; mu < 4; ++mu) dq_u[mu] = (up[mu] - um[mu]) / (2.0 * h);
  }
  double div_u = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Vec4 up = u(shift4(x, mu, h), q), um = u(shift4(x, mu, -h), q);
    div_u += (up[mu] - um[mu]) / (2.0 * h);
  }
  double dudu = 0.0;  // d_a u^mu d^a u_mu, Euclidean target index
  for (int mu = 0; mu < 4; ++mu) dudu += metric_diag(mu) * dq_u[mu] * dq_u[mu];

  double u_dzeta = 0.0;
  for (int mu = 0; mu < 4; ++mu) u_dzeta += u0[mu] * dx_scalar(zeta, mu);
  double dzq = dq_scalar(zeta);

  // quantum-potential term
  auto sqrt_rho = [&](const Vec4& xx, double qq) {
    double r = rho(xx, qq);
    if (!(r > 0.0)) throw QuantumSingularityError("variational residuals: rho <= 0");
    return std::sqrt(r);
  };
  double lap_sqrt_rho =
      (sqrt_rho(x, q + h) - 2.0 * sqrt_rho(x, q) + sqrt_rho(x, q - h)) / (h * h);

  VariationalResiduals out;
  out.zeta_eq = u_dzeta + 0.5 * dzq * dzq + v(q) + 0.5 * lambda * s2 * div_u +
                0.5 * lambda * lambda * ssq * dudu -
                0.5 * lambda * lambda * lap_sqrt_rho / sqrt_rho(x, q);

  double div_rho_u = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    auto flux = [&](const Vec4& xx, double qq) { return rho(xx, qq) * u(xx, qq)[mu]; };
    div_rho_u += (flux(shift4(x, mu, h), q) - flux(shift4(x, mu, -h), q)) / (2.0 * h);
  }
  auto rho_dzq = [&](const Vec4& xx, double qq) {
    return rho(xx, qq) * (zeta(xx, qq + h) - zeta(xx, qq - h)) / (2.0 * h);
  };
  double dq_rho_dzq = (rho_dzq(x, q + h) - rho_dzq(x, q - h)) / (2.0 * h);
  out.rho_eq = div_rho_u + dq_rho_dzq - rho0 * c2 * div_u -
               0.5 * lambda * rho0 * s2 * dudu;

  auto rho_s2 = [&](const Vec4& xx, double qq) {
    return rho(xx, qq) * std::sin(2.0 * zeta(xx, qq) / lambda);
  };
  double u_d_rho_s2 = 0.0;
  Vec4 dx_rho_s2;
  for (int mu = 0; mu < 4; ++mu) {
    dx_rho_s2[mu] =
        (rho_s2(shift4(x, mu, h), q) - rho_s2(shift4(x, mu, -h), q)) / (2.0 * h);
    u_d_rho_s2 += u0[mu] * dx_rho_s2[mu];
  }
  out.multiplier = rho0 * u_dzeta - 0.5 * lambda * u_d_rho_s2 +
                   lambda * lambda * rho0 * ssq * dudu;

  Vec4 u0_down = flip_index(u0);
  for (int mu = 0; mu < 4; ++mu) {
    // d_a (rho sin^2 d^a u_mu) with the target index lowered
    auto w = [&](const Vec4& xx, double qq) {
      double s = std::sin(zeta(xx, qq) / lambda);
      double du = (u(xx, qq + h)[mu] - u(xx, qq - h)[mu]) / (2.0 * h);
      return rho(xx, qq) * s * s * metric_diag(mu) * du;
    };
    double dq_w = (w(x, q + h) - w(x, q - h)) / (2.0 * h);
    out.u_eq[mu] = -rho0 * dx_scalar(zeta, mu) + out.multiplier * u0_down[mu] +
                   0.5 * lambda * dx_rho_s2[mu] + lambda * lambda * dq_w;
  }
  out.constraint = minkowski_dot(u0, u0) - 1.0;
  return out;
}

LagrangianGap lagrangian_gap(const RhoZetaUField& fields, double lambda,
                             const Vec4& x, double q, const Potential& v,
                             double h) {
  const auto& rho = fields.rho;
  const auto& zeta = fields.zeta;
  const auto& u = fields.u;

  double rho0 = rho(x, q);
  double zeta0 = zeta(x, q);
  Vec4 u0 = u(x, q);

  double u_dzeta = 0.0, div_u = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Vec4 xp = shift4(x, mu, h), xm = shift4(x, mu, -h);
    u_dzeta += u0[mu] * (zeta(xp, q) - zeta(xm, q)) / (2.0 * h);
    div_u += (u(xp, q)[mu] - u(xm, q)[mu]) / (2.0 * h);
  }
  double dzq = (zeta(x, q + h) - zeta(x, q - h)) / (2.0 * h);
  double dudu = 0.0;
  {
    Vec4 up = u(x, q + h), um = u(x, q - h);
    for (int mu = 0; mu < 4; ++mu) {
      double d = (up[mu] - um[mu]) / (2.0 * h);
      dudu += metric_diag(mu) * d * d;
    }
  }
  auto sqrt_rho = [&](double qq) {
    double r = rho(x, qq);
    return r > 0.0 ? std::sqrt(r) : 0.0;
  };
  double dsr = (sqrt_rho(q + h) - sqrt_rho(q - h)) / (2.0 * h);
  double fisher = dsr * dsr;

  double s = std::sin(zeta0 / lambda), c = std::cos(zeta0 / lambda);
  double sc2 = 2.0 * s * c;  // one shared value keeps the identity exact

  double base = rho0 * (u_dzeta + 0.5 * dzq * dzq + v(q));
  LagrangianGap out;
  out.l_q = base + 0.5 * lambda * rho0 * sc2 * div_u +
            0.5 * lambda * lambda * rho0 * dudu * s * s +
            0.5 * lambda * lambda * fisher;
  out.l_c = base + rho0 * zeta0 * div_u + 0.5 * rho0 * zeta0 * zeta0 * dudu;
  out.gap1 = 0.5 * lambda * rho0 * div_u * (2.0 * zeta0 / lambda - sc2);
  out.gap2 = -0.5 * lambda * lambda *
             (fisher - rho0 * dudu * (zeta0 * zeta0 / (lambda * lambda) - s * s));
  return out;
}

std::vector<LimitSweepRow> classical_limit_sweep(
    const std::vector<double>& lambdas, double omega, double q0,
    double sigma_max, double caustic_margin) {
  if (lambdas.empty()) throw numeric_error("limit sweep: empty lambda list");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] < lambdas[i - 1]) || !(lambdas[i] > 0.0))
      throw numeric_error("limit sweep: lambdas must be positive and decreasing");

  double caustic = 0.5 * M_PI / omega;
  double sigma_win = std::min(sigma_max, caustic - caustic_margin);
  if (!(sigma_win > 0.0)) throw numeric_error("limit sweep: caustic inside window");

  Potential v = Potential::harmonic(omega);
  std::vector<LimitSweepRow> rows;
  for (double lambda : lambdas) {
    GaussianScenario sc{omega, q0, lambda};
    auto f = [&sc](double s, double q) { return analytic_gaussian_f(s, q, sc); };
    auto g = [&sc](double s, double q) { return analytic_gaussian_g(s, q, sc); };

    double stddev = std::sqrt(analytic_gaussian_variance(sc));
    double sigma_probe = 0.5 * sigma_win;
    double mean = analytic_gaussian_mean(sigma_probe, sc);

    Grid1D fine = Grid1D::from_range(mean - 10.0 * stddev, mean + 10.0 * stddev,
                                     stddev / 200.0);
    std::vector<double> dens(fine.count);
    for (std::size_t j = 0; j < fine.count; ++j)
      dens[j] = g(sigma_probe, fine.at(j));
    auto mom = stats::grid_moments(fine.values(), dens);

    // classical Hamilton-Jacobi defect of the lambda-solution over the
    // moving packet window |q - mean| <= 3 std
    double gap = 0.0;
    const int nsig = 61, nq = 41;
    for (int i = 0; i < nsig; ++i) {
      double s = sigma_win * static_cast<double>(i) / (nsig - 1);
      double m = analytic_gaussian_mean(s, sc);
      for (int j = 0; j < nq; ++j) {
        double q = m + 3.0 * stddev * (2.0 * static_cast<double>(j) / (nq - 1) - 1.0);
        gap = std::max(gap, std::abs(quantum_hj_residual(f, g, v, 0.0, s, q, 1e-5)));
      }
    }

    LimitSweepRow row;
    row.lambda = lambda;
    row.g_std = std::sqrt(mom.variance);
    row.g_std_predicted = stddev;
    row.f_gap_sup = gap;
    row.qp_center =
        std::abs(quantum_potential(g, lambda, sigma_probe, mean, 1e-5));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dwk::quantum
