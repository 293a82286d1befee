#include "guiding.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "classical.hpp"
#include "stats.hpp"

namespace dwk::guiding {

GuidingCoefficients guiding_coefficients(const riesz::BField& field, double lambda,
                                         const Vec4& x, double q, double h) {
  riesz::RieszTensor t = riesz::riesz_from_b(field(x, q));
  riesz::KCurrent k = riesz::k_current(field, lambda, x, q, h);
  GuidingCoefficients out;
  // mixed components against e0: T^mu_0 = T^{mu 0} (eta_00 = 1)
  out.time_rate = t.at(0, 0);
  for (int j = 0; j < 3; ++j) out.space_rate[j] = t.at(j + 1, 0);
  out.field_rate = k.k_down[0];
  return out;
}

namespace {

struct Rates {
  double dt;
  std::array<double, 3> ds;
  double dq;
};

Rates rates_of(const GuidingCoefficients& c) {
  return {c.time_rate, c.space_rate, c.field_rate};
}

}  // namespace

std::vector<CharacteristicState> integrate_characteristic(
    const CharacteristicState& start, const CoefficientField& coeffs, double dtau,
    std::size_t n_steps) {
  std::vector<CharacteristicState> path;
  path.reserve(n_steps + 1);
  CharacteristicState st = start;
  path.push_back(st);

  auto eval = [&](const CharacteristicState& p) {
    GuidingCoefficients c = coeffs(p.t, p.s, p.q);
    if (!(c.time_rate > 0.0))
      throw numeric_error("characteristic: nonpositive time rate encountered");
    return rates_of(c);
  };
  auto advance = [](const CharacteristicState& p, const Rates& r, double w) {
    CharacteristicState o = p;
    o.t += w * r.dt;
    for (int j = 0; j < 3; ++j) o.s[j] += w * r.ds[j];
    o.q += w * r.dq;
    return o;
  };

  for (std::size_t i = 0; i < n_steps; ++i) {
    Rates k1 = eval(st);
    Rates k2 = eval(advance(st, k1, 0.5 * dtau));
    Rates k3 = eval(advance(st, k2, 0.5 * dtau));
    Rates k4 = eval(advance(st, k3, dtau));
    st.t += dtau / 6.0 * (k1.dt + 2.0 * k2.dt + 2.0 * k3.dt + k4.dt);
    for (int j = 0; j < 3; ++j)
      st.s[j] += dtau / 6.0 * (k1.ds[j] + 2.0 * k2.ds[j] + 2.0 * k3.ds[j] + k4.ds[j]);
    st.q += dtau / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    st.tau += dtau;
    path.push_back(st);
  }
  return path;
}

CoefficientGrid CoefficientGrid::sample(const Grid1D& t, const Grid1D& s,
                                        const Grid1D& q,
                                        const CoefficientField& coeffs) {
  CoefficientGrid g;
  g.t = t;
  g.s = s;
  g.q = q;
  std::size_t total = t.count * s.count * q.count;
  g.time_rate.resize(total);
  g.space_rate.resize(total);
  g.field_rate.resize(total);
  std::size_t idx = 0;
  for (std::size_t it = 0; it < t.count; ++it)
    for (std::size_t is = 0; is < s.count; ++is)
      for (std::size_t iq = 0; iq < q.count; ++iq, ++idx) {
        GuidingCoefficients c =
            coeffs(t.at(it), {s.at(is), 0.0, 0.0}, q.at(iq));
        g.time_rate[idx] = c.time_rate;
        g.space_rate[idx] = c.space_rate[0];
        g.field_rate[idx] = c.field_rate;
      }
  return g;
}

std::size_t CoefficientGrid::index(std::size_t it, std::size_t is,
                                   std::size_t iq) const {
  return (it * s.count + is) * q.count + iq;
}

GuidingCoefficients CoefficientGrid::interp(double tv, double sv, double qv) const {
  std::size_t it, is, iq;
  double ft, fs, fq;
  t.locate(tv, it, ft);
  s.locate(sv, is, fs);
  q.locate(qv, iq, fq);
  auto tri = [&](const std::vector<double>& a) {
    double acc = 0.0;
    for (int dt_ = 0; dt_ < 2; ++dt_)
      for (int ds_ = 0; ds_ < 2; ++ds_)
        for (int dq_ = 0; dq_ < 2; ++dq_) {
          double w = (dt_ ? ft : 1.0 - ft) * (ds_ ? fs : 1.0 - fs) *
                     (dq_ ? fq : 1.0 - fq);
          acc += w * a[index(it + dt_, is + ds_, iq + dq_)];
        }
    return acc;
  };
  GuidingCoefficients out;
  out.time_rate = tri(time_rate);
  out.space_rate = {tri(space_rate), 0.0, 0.0};
  out.field_rate = tri(field_rate);
  return out;
}

CoefficientField CoefficientGrid::as_field() const {
  return [this](double tv, const std::array<double, 3>& sv, double qv) {
    return interp(tv, sv[0], qv);
  };
}

double FieldBeable::eulerian_phi(std::size_t it, double s_probe) const {
  const auto& srow = s[it];
  const auto& prow = phi[it];
  const auto& vrow = valid[it];
  for (std::size_t i = 0; i + 1 < srow.size(); ++i) {
    if (!vrow[i] || !vrow[i + 1]) continue;
    double a = srow[i], b = srow[i + 1];
    if ((s_probe >= a && s_probe <= b) || (s_probe >= b && s_probe <= a)) {
      double w = (b == a) ? 0.0 : (s_probe - a) / (b - a);
      return prow[i] + w * (prow[i + 1] - prow[i]);
    }
  }
  throw numeric_error("eulerian_phi: probe outside the valid fan");
}

FieldBeable evolve_field_beable(const CoefficientField& coeffs,
                                const std::function<double(double)>& phi0,
                                const Grid1D& xi_grid, double t_final,
                                std::size_t n_out, double dt) {
  if (xi_grid.count < 3) throw numeric_error("beable: need at least 3 labels");
  if (!(t_final > 0.0) || n_out == 0) throw numeric_error("beable: bad time range");

  std::size_t n = xi_grid.count;
  FieldBeable out;
  out.xi = xi_grid.values();
  std::vector<double> s_cur = out.xi;
  std::vector<double> q_cur(n);
  for (std::size_t i = 0; i < n; ++i) q_cur[i] = phi0(out.xi[i]);
  std::vector<char> alive(n, 1);

  // time-parameterized characteristics: ds/dt = B/A, dq/dt = K/A
  auto rate = [&](double t, double s, double q) -> std::array<double, 2> {
    GuidingCoefficients c = coeffs(t, {s, 0.0, 0.0}, q);
    if (!(c.time_rate > 0.0))
      throw numeric_error("beable: nonpositive time rate");
    return {c.space_rate[0] / c.time_rate, c.field_rate / c.time_rate};
  };

  auto record = [&](double t) {
    out.t_out.push_back(t);
    out.s.push_back(s_cur);
    out.phi.push_back(q_cur);
    // fold monitor: sign change of ds/dxi anywhere kills the node
    std::vector<char> v(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t lo = i == 0 ? 0 : i - 1;
      std::size_t hi = i + 1 == n ? i : i + 1;
      double jac = (s_cur[hi] - s_cur[lo]) / (out.xi[hi] - out.xi[lo]);
      if (!(jac > 0.0)) {
        v[i] = 0;
        alive[i] = 0;
        if (out.t_out.back() < out.first_fold_time)
          out.first_fold_time = out.t_out.back();
      }
      if (!alive[i]) v[i] = 0;
    }
    out.valid.push_back(std::move(v));
  };
  record(0.0);
  if (std::isfinite(out.first_fold_time))
    throw FoldError("beable: fold at t = 0 (degenerate Cauchy data)");

  double t_step = t_final / static_cast<double>(n_out);
  double t = 0.0;
  for (std::size_t k = 1; k <= n_out; ++k) {
    double target = t_step * static_cast<double>(k);
    while (t < target - 1e-15) {
      double step = std::min(dt, target - t);
      for (std::size_t i = 0; i < n; ++i) {
        double s0 = s_cur[i], q0 = q_cur[i];
        auto k1 = rate(t, s0, q0);
        auto k2 = rate(t + 0.5 * step, s0 + 0.5 * step * k1[0], q0 + 0.5 * step * k1[1]);
        auto k3 = rate(t + 0.5 * step, s0 + 0.5 * step * k2[0], q0 + 0.5 * step * k2[1]);
        auto k4 = rate(t + step, s0 + step * k3[0], q0 + step * k3[1]);
        s_cur[i] = s0 + step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        q_cur[i] = q0 + step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
      }
      t += step;
    }
    t = target;
    record(t);
  }
  return out;
}

namespace {

// RK4 flow of dq/dsigma = rate(sigma, q).
double rk4_flow_endpoint(const std::function<double(double, double)>& rate,
                         double q0, double sigma0, double sigma1,
                         std::size_t steps) {
  double ds = (sigma1 - sigma0) / static_cast<double>(steps);
  double q = q0;
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

}  // namespace

std::vector<std::array<double, 2>> planewave_guiding(
    const std::function<double(double, double)>& f, double q0, double sigma0,
    double sigma1, std::size_t steps, double h) {
  if (steps == 0) throw numeric_error("planewave_guiding: zero steps");
  auto rate = [&](double s, double q) {
    return (f(s, q + h) - f(s, q - h)) / (2.0 * h);
  };
  double ds = (sigma1 - sigma0) / static_cast<double>(steps);
  std::vector<std::array<double, 2>> traj;
  traj.reserve(steps + 1);
  double q = q0;
  traj.push_back({sigma0, q});
  for (std::size_t i = 0; i < steps; ++i) {
    double s = sigma0 + ds * static_cast<double>(i);
    double k1 = rate(s, q);
    double k2 = rate(s + 0.5 * ds, q + 0.5 * ds * k1);
    double k3 = rate(s + 0.5 * ds, q + 0.5 * ds * k2);
    double k4 = rate(s + ds, q + ds * k3);
    q += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(q))
      throw numeric_error("planewave_guiding: trajectory left the profile");
    traj.push_back({s + ds, q});
  }
  return traj;
}

std::function<double(double, double)> profile_f(const quantum::QuantumProfile& p) {
  return [&p](double sigma, double q) { return p.f.interp(sigma, q); };
}

std::function<double(double, double)> profile_g(const quantum::QuantumProfile& p) {
  return [&p](double sigma, double q) { return p.g.interp(sigma, q); };
}

std::vector<double> equivariance_samples(const quantum::QuantumProfile& profile,
                                         std::size_t n_samples, std::uint64_t seed,
                                         double sigma_check, unsigned threads,
                                         double guiding_dsigma) {
  if (n_samples == 0) throw numeric_error("equivariance: no samples");
  stats::GridSampler sampler(profile.g.q.values(), profile.g_slice(0));

  // phase slope d_q f precomputed on the stored grid (NaN where masked)
  RealField2D dfq(profile.f.sigma, profile.f.q);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < dfq.sigma.count; ++i)
    for (std::size_t j = 0; j < dfq.q.count; ++j)
      dfq.at(i, j) = (j == 0 || j + 1 == dfq.q.count)
                         ? nan
                         : (profile.f.at(i, j + 1) - profile.f.at(i, j - 1)) /
                               (2.0 * dfq.q.step);
  auto rate = [&dfq](double s, double q) {
    double r = dfq.interp(s, q);
    if (std::isnan(r))
      throw numeric_error("equivariance: trajectory left the supported region");
    return r;
  };

  double sigma0 = profile.f.sigma.origin;
  std::size_t steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil((sigma_check - sigma0) /
                                            guiding_dsigma)));

  std::vector<double> evolved(n_samples);
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double q0 = sampler.sample(seed, i);
      evolved[i] = rk4_flow_endpoint(rate, q0, sigma0, sigma_check, steps);
    }
  };

  unsigned n_threads = std::max(1u, threads);
  if (n_threads == 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (n_samples + n_threads - 1) / n_threads;
    for (unsigned k = 0; k < n_threads; ++k) {
      std::size_t lo = std::min<std::size_t>(k * chunk, n_samples);
      std::size_t hi = std::min<std::size_t>(lo + chunk, n_samples);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return evolved;
}

EquivarianceStat monte_carlo_equivariance(
    const quantum::QuantumProfile& profile, std::size_t n_samples,
    std::uint64_t seed, double sigma_check,
    const std::function<double(double)>& truth_cdf, unsigned threads,
    double guiding_dsigma) {
  auto evolved = equivariance_samples(profile, n_samples, seed, sigma_check,
                                      threads, guiding_dsigma);
  EquivarianceStat st;
  st.sigma_check = sigma_check;
  st.n_samples = n_samples;
  st.ks = stats::ks_distance(std::move(evolved), truth_cdf);
  return st;
}

double mass_flow_invariance(const quantum::QuantumProfile& profile, double a0,
                            double b0, double sigma_end, std::size_t checkpoints,
                            bool whole_line) {
  auto f = profile_f(profile);
  auto g = profile_g(profile);
  double sigma0 = profile.g.sigma.origin;
  if (whole_line) {
    // endpoints pinned just inside the stored grid
    double lo = profile.g.q.origin;
    double hi = profile.g.q.back();
    return classical::mass_invariance(f, g, lo, hi, sigma0, sigma_end,
                                      checkpoints, true);
  }
  return classical::mass_invariance(f, g, a0, b0, sigma0, sigma_end, checkpoints,
                                    false);
}

}  // namespace dwk::guiding
