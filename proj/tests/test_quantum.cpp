#include <doctest.h>

#include <cmath>
#include <complex>

#include "quantum.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace dwk;
using namespace dwk::quantum;

namespace {

GaussianScenario small_scenario() { return GaussianScenario{1.0, 1.0, 0.1}; }

QuantumProfile evolve_small(const GaussianScenario& sc, double sigma_end = 1.5,
                            double dq = 0.01, double dsigma = 1e-3) {
  auto initial = [&sc](double q) {
    return complexd(std::sqrt(analytic_gaussian_g(0.0, q, sc)), 0.0);
  };
  EvolveOptions opts;
  opts.store_stride = 5;
  opts.refine = 8;
  opts.pad_sigma = 5.0 * dsigma;
  return crank_nicolson_evolve(initial, Potential::harmonic(sc.omega), sc.lambda,
                               Grid1D::from_range(0.0, sigma_end, dsigma),
                               Grid1D::from_range(-4.0, 4.0, dq), opts);
}

}  // namespace

TEST_CASE("analytic Gaussian packet closed form") {
  auto sc = small_scenario();
  CHECK(analytic_gaussian_f(0.0, 0.37, sc) == 0.0);
  CHECK(analytic_gaussian_mean(0.0, sc) == doctest::Approx(sc.q0));
  CHECK(analytic_gaussian_variance(sc) == doctest::Approx(0.05));

  // the width never breathes: variance is lambda/(2 omega) at every sigma
  for (double sigma : {0.3, 1.0, 2.2}) {
    std::vector<double> grid, dens;
    for (double q = -3.0; q <= 3.0; q += 0.002) {
      grid.push_back(q);
      dens.push_back(analytic_gaussian_g(sigma, q, sc));
    }
    auto mom = stats::grid_moments(grid, dens);
    CHECK(mom.variance == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(mom.mean == doctest::Approx(std::cos(sigma)).epsilon(1e-8));
  }
}

TEST_CASE("density concentrates on the classical trajectory as lambda shrinks") {
  double sigma = 0.9;
  std::vector<double> masses;
  for (double lambda : {0.1, 0.01, 0.001}) {
    GaussianScenario sc{1.0, 1.0, lambda};
    double center = analytic_gaussian_mean(sigma, sc);
    double mass = 0.0, dq = 1e-4;
    for (double q = center - 0.1; q <= center + 0.1; q += dq)
      mass += analytic_gaussian_g(sigma, q, sc) * dq;
    masses.push_back(mass);
  }
  CHECK(masses[0] < masses[1]);
  CHECK(masses[1] < masses[2]);
  CHECK(masses[2] > 0.9999);
}

TEST_CASE("evolution reproduces the analytic packet") {
  auto sc = small_scenario();
  auto prof = evolve_small(sc);

  double g_gap = 0.0;
  for (std::size_t i = 0; i < prof.g.sigma.count; ++i)
    for (std::size_t j = 0; j < prof.g.q.count; ++j)
      g_gap = std::max(g_gap, std::abs(prof.g.at(i, j) -
                                       analytic_gaussian_g(prof.g.sigma.at(i),
                                                           prof.g.q.at(j), sc)));
  CHECK(g_gap < 1e-3);
  CHECK(prof.norm_drift < 1e-10);

  // unwrapped phase agrees up to one global whole turn; compared where the
  // amplitude keeps the phase well conditioned
  double g_max = 0.0;
  for (double v : prof.g.values) g_max = std::max(g_max, v);
  double turn = 2.0 * M_PI * sc.lambda;
  std::vector<double> diffs;
  for (std::size_t i = 0; i < prof.f.sigma.count; ++i)
    for (std::size_t j = 0; j < prof.f.q.count; ++j) {
      double fv = prof.f.at(i, j);
      if (std::isnan(fv) || prof.g.at(i, j) < 1e-6 * g_max) continue;
      diffs.push_back(fv - analytic_gaussian_f(prof.f.sigma.at(i), prof.f.q.at(j), sc));
    }
  double shift = turn * std::round(diffs[diffs.size() / 2] / turn);
  double f_gap = 0.0;
  for (double d : diffs) f_gap = std::max(f_gap, std::abs(d - shift));
  CHECK(f_gap < 1e-4);
}

TEST_CASE("free evolution matches the spreading-packet closed form") {
  double lambda = 0.1, alpha0 = 0.05, q0 = 0.5;
  auto initial = [&](double q) {
    double d = q - q0;
    return complexd(std::pow(2.0 * M_PI * alpha0, -0.25) *
                        std::exp(-d * d / (4.0 * alpha0)),
                    0.0);
  };
  EvolveOptions opts;
  opts.store_stride = 10;
  opts.refine = 8;
  auto prof = crank_nicolson_evolve(initial, Potential::zero(), lambda,
                                    Grid1D::from_range(0.0, 2.0, 1e-3),
                                    Grid1D::from_range(-6.0, 7.0, 0.02), opts);
  double worst = 0.0;
  for (std::size_t i = 0; i < prof.g.sigma.count; ++i) {
    double sigma = prof.g.sigma.at(i);
    double var = alpha0 + lambda * lambda * sigma * sigma / (4.0 * alpha0);
    for (std::size_t j = 0; j < prof.g.q.count; ++j) {
      double d = prof.g.q.at(j) - q0;
      double expected =
          std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
      worst = std::max(worst, std::abs(prof.g.at(i, j) - expected));
    }
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("oracle gap shrinks at second order under joint refinement") {
  auto sc = small_scenario();
  auto gap_of = [&](double dq, double dsigma) {
    auto prof = evolve_small(sc, 1.0, dq, dsigma);
    double g_gap = 0.0;
    for (std::size_t i = 0; i < prof.g.sigma.count; ++i)
      for (std::size_t j = 0; j < prof.g.q.count; ++j)
        g_gap = std::max(g_gap, std::abs(prof.g.at(i, j) -
                                         analytic_gaussian_g(prof.g.sigma.at(i),
                                                             prof.g.q.at(j), sc)));
    return g_gap;
  };
  // coarse internal grid (refine 8 keeps the internal dq at dq/8)
  double coarse = gap_of(0.16, 1.6e-2);
  double fine = gap_of(0.08, 0.8e-2);
  CHECK(coarse / fine > 3.0);
}

TEST_CASE("non-finite initial data is rejected") {
  auto initial = [](double q) {
    return q == 0.0 ? complexd(std::numeric_limits<double>::quiet_NaN(), 0.0)
                    : complexd(1.0, 0.0);
  };
  CHECK_THROWS_AS(crank_nicolson_evolve(initial, Potential::zero(), 0.1,
                                        Grid1D::from_range(0.0, 0.1, 1e-2),
                                        Grid1D::from_range(-1.0, 1.0, 0.1), {}),
                  Error);
}

TEST_CASE("phase unwrap handles nodes") {
  double lambda = 0.1;
  Grid1D qg = Grid1D::from_range(-3.0, 3.0, 0.01);
  auto modes = hamiltonian_eigenmodes(Potential::harmonic(1.0), lambda, qg, 2);
  const auto& excited = modes[1];

  SUBCASE("stationary excited mode: valid on the anchor lobe, masked beyond") {
    QuantumProfile prof;
    prof.lambda = lambda;
    prof.psi_tilde = ComplexField2D(Grid1D{0.0, 0.01, 40}, qg);
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = 0; j < qg.count; ++j)
        prof.psi_tilde.at(i, j) =
            excited.profile[j] *
            std::polar(1.0, -excited.energy * prof.psi_tilde.sigma.at(i) / lambda);
    extract_f_g(prof);

    // g is exactly the squared amplitude
    for (std::size_t j = 0; j < qg.count; j += 50)
      CHECK(prof.g.at(3, j) ==
            doctest::Approx(std::norm(prof.psi_tilde.at(3, j))).epsilon(1e-14));

    // phase is linear in sigma on the anchored lobe
    std::size_t j_pos = qg.count / 2 + 40;  // right lobe sample
    std::size_t j_neg = qg.count / 2 - 40;  // mirrored on the left lobe
    double slope = (prof.f.at(20, j_pos) - prof.f.at(10, j_pos)) /
                   (prof.f.sigma.at(20) - prof.f.sigma.at(10));
    CHECK(slope == doctest::Approx(-excited.energy).epsilon(1e-8));
    // the far lobe is separated by a node: masked
    CHECK(std::isnan(prof.f.at(5, j_neg)));
  }

  SUBCASE("a dead slice breaks the stitch path") {
    QuantumProfile prof;
    prof.lambda = lambda;
    prof.psi_tilde = ComplexField2D(Grid1D{0.0, 0.01, 10}, qg);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < qg.count; ++j)
        prof.psi_tilde.at(i, j) =
            i == 5 ? complexd{} : complexd(modes[0].profile[j], 0.0);
    CHECK_THROWS_AS(extract_f_g(prof), NodeCrossingError);
  }
}

TEST_CASE("plane-wave quantum residuals") {
  auto sc = small_scenario();
  auto f = [&sc](double s, double q) { return analytic_gaussian_f(s, q, sc); };
  auto g = [&sc](double s, double q) { return analytic_gaussian_g(s, q, sc); };
  auto v = Potential::harmonic(sc.omega);

  SUBCASE("exact solution has vanishing residuals") {
    double worst_hj = 0.0, worst_cont = 0.0;
    for (double sigma : {0.1, 0.7, 1.4})
      for (double dq : {-0.4, -0.1, 0.2, 0.5}) {
        double q = analytic_gaussian_mean(sigma, sc) + dq;
        worst_hj = std::max(worst_hj,
                            std::abs(quantum_hj_residual(f, g, v, sc.lambda, sigma, q)));
        worst_cont = std::max(worst_cont, std::abs(continuity_residual(f, g, sigma, q)));
      }
    CHECK(worst_hj < 1e-5);
    CHECK(worst_cont < 1e-5);
  }

  SUBCASE("dropping the quantum term recovers the classical equations") {
    // classical oscillator pair with a wide packet
    auto f_cl = [](double s, double q) { return -0.5 * q * q * std::tan(s); };
    auto g_cl = [](double s, double q) {
      double sec = 1.0 / std::cos(s);
      double y = q * sec;
      return std::exp(-(y - 1.0) * (y - 1.0) / 1.0) * sec / std::sqrt(M_PI);
    };
    double worst = 0.0;
    for (double sigma : {0.2, 0.6, 1.0})
      for (double q : {0.5, 0.9, 1.2}) {
        worst = std::max(worst,
                         std::abs(quantum_hj_residual(f_cl, g_cl, v, 0.0, sigma, q)));
        worst = std::max(worst, std::abs(continuity_residual(f_cl, g_cl, sigma, q)));
      }
    CHECK(worst < 1e-6);
  }

  SUBCASE("vanishing density signals the quantum-potential singularity") {
    auto g_node = [](double, double q) { return q * q; };
    CHECK_THROWS_AS(
        quantum_hj_residual([](double, double) { return 0.0; }, g_node, v, 0.1,
                            0.5, 0.0),
        QuantumSingularityError);
  }
}

TEST_CASE("plane-wave wave-function values") {
  Vec4 n{1, 0, 0, 0};
  double lambda = 0.1;
  auto b = plane_wave_b(0.0, 0.49, n, lambda);
  CHECK(b.psi.real() == doctest::Approx(0.7));
  CHECK(b.psi.imag() == 0.0);
  for (int mu = 0; mu < 4; ++mu) CHECK(std::abs(b.psi_mu[mu]) == 0.0);

  b = plane_wave_b(0.5 * M_PI * lambda, 1.0, n, lambda);
  CHECK(std::abs(b.psi) < 1e-16);
  CHECK(b.psi_mu[0].imag() == doctest::Approx(1.0));

  // boosted direction lowers the index with the metric
  Vec4 nb = boosted_unit_timelike(0.4, {1, 0, 0});
  b = plane_wave_b(0.5 * M_PI * lambda, 1.0, nb, lambda);
  CHECK(b.psi_mu[1].imag() == doctest::Approx(-std::sinh(0.4)));
}

TEST_CASE("covariant system residuals on sampled fields") {
  SUBCASE("constant field with zero potential is exact") {
    auto field = [](const Vec4&, double) {
      clifford::BElement b;
      b.psi = complexd(0.3, 0.1);
      b.psi_mu = {complexd(0.0, 0.2), complexd(0.1, 0.0), complexd(0, 0), complexd(0, 0)};
      return b;
    };
    std::array<Grid1D, 4> axes{Grid1D{-0.05, 0.01, 11}, Grid1D{0, 1, 1},
                               Grid1D{0, 1, 1}, Grid1D{0, 1, 1}};
    auto grid = PsiGrid::sample(axes, Grid1D::from_range(-0.5, 0.5, 0.01), field);
    auto res = kanatchikov_residual(grid, Potential::zero(), 0.1);
    CHECK(res.max_all() == 0.0);
  }

  SUBCASE("coarse axes are rejected") {
    auto field = [](const Vec4&, double) { return clifford::BElement{}; };
    std::array<Grid1D, 4> axes{Grid1D{0, 0.01, 3}, Grid1D{0, 1, 1}, Grid1D{0, 1, 1},
                               Grid1D{0, 1, 1}};
    auto grid = PsiGrid::sample(axes, Grid1D::from_range(0.0, 1.0, 0.1), field);
    CHECK_THROWS_AS(kanatchikov_residual(grid, Potential::zero(), 0.1),
                    CoarseGridError);
  }

  SUBCASE("plane wave and two-wave superposition satisfy the system") {
    const double lambda = 0.5, q0 = 0.3;
    GaussianScenario sc{1.0, q0, lambda};
    Vec4 n1{1, 0, 0, 0};
    Vec4 n2 = boosted_unit_timelike(0.3, {1, 0, 0});
    auto wave = [&](const Vec4& x, double q, const Vec4& n) {
      double s = minkowski_dot(n, x);
      return plane_wave_b(analytic_gaussian_f(s, q, sc),
                          analytic_gaussian_g(s, q, sc), n, lambda);
    };
    const double delta = 1e-2;
    std::array<Grid1D, 4> axes{Grid1D{-4 * delta, delta, 9},
                               Grid1D{-4 * delta, delta, 9}, Grid1D{0, 1, 1},
                               Grid1D{0, 1, 1}};
    Grid1D qg{q0 - 0.5, delta, 101};

    auto single = PsiGrid::sample(axes, qg, [&](const Vec4& x, double q) {
      return wave(x, q, n1);
    });
    auto res1 = kanatchikov_residual(single, Potential::harmonic(1.0), lambda);
    CHECK(res1.max_all() < 1e-3);

    auto both = PsiGrid::sample(axes, qg, [&](const Vec4& x, double q) {
      return wave(x, q, n1) + wave(x, q, n2);
    });
    auto res2 = kanatchikov_residual(both, Potential::harmonic(1.0), lambda);
    CHECK(res2.max_all() < 1e-3);
  }
}

TEST_CASE("discrete spectrum of the harmonic Hamiltonian") {
  double lambda = 0.1, omega = 1.0;
  Grid1D qg = Grid1D::from_range(-3.0, 3.0, 0.01);
  auto modes = hamiltonian_eigenmodes(Potential::harmonic(omega), lambda, qg, 3);

  CHECK(modes[0].energy == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(std::abs(modes[0].energy - 0.05) < 1e-4);
  CHECK(std::abs(modes[1].energy - 0.15) < 1e-4);
  CHECK(std::abs(modes[2].energy - 0.25) < 1e-4);
  CHECK(modes[0].energy < modes[1].energy);

  // orthonormality in the discrete inner product
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < qg.count; ++j)
        dot += modes[a].profile[j] * modes[b].profile[j] * qg.step;
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
    }

  // ground state: variance lambda/(2 omega), no interior sign change
  std::vector<double> dens(qg.count);
  for (std::size_t j = 0; j < qg.count; ++j)
    dens[j] = modes[0].profile[j] * modes[0].profile[j];
  auto mom = stats::grid_moments(qg.values(), dens);
  CHECK(std::abs(mom.variance - 0.05) < 1e-4);
  // nodeless above the rounding floor of the far tail
  double peak = 0.0;
  for (double v : modes[0].profile) peak = std::max(peak, std::abs(v));
  int sign_changes = 0;
  for (std::size_t j = 1; j + 2 < qg.count; ++j) {
    if (std::abs(modes[0].profile[j]) < 1e-8 * peak ||
        std::abs(modes[0].profile[j + 1]) < 1e-8 * peak)
      continue;
    if (modes[0].profile[j] * modes[0].profile[j + 1] < 0.0) ++sign_changes;
  }
  CHECK(sign_changes == 0);

  CHECK_THROWS_AS(
      hamiltonian_eigenmodes(Potential::harmonic(omega), lambda,
                             Grid1D::from_range(-1.0, 1.0, 0.2), 20),
      Error);
}

TEST_CASE("separated single-mode solutions") {
  double lambda = 0.1;
  Grid1D qg = Grid1D::from_range(-3.0, 3.0, 0.01);
  auto modes = hamiltonian_eigenmodes(Potential::harmonic(1.0), lambda, qg, 1);
  double e0 = modes[0].energy;

  SUBCASE("dispersion violations are rejected") {
    Vec4 bad{1.1 * e0 / lambda, 0, 0, 0};
    std::array<Grid1D, 4> axes{Grid1D{-0.04, 0.01, 9}, Grid1D{0, 1, 1},
                               Grid1D{0, 1, 1}, Grid1D{0, 1, 1}};
    CHECK_THROWS_AS(mode_solution(modes[0], qg, bad, lambda, axes), DispersionError);
  }

  SUBCASE("residual is small and refines at second order") {
    Vec4 k{e0 / lambda, 0, 0, 0};
    auto residual_at = [&](double delta) {
      std::array<Grid1D, 4> axes{Grid1D{-4 * delta, delta, 9}, Grid1D{0, 1, 1},
                                 Grid1D{0, 1, 1}, Grid1D{0, 1, 1}};
      auto grid = mode_solution(modes[0], qg, k, lambda, axes);
      return kanatchikov_residual(grid, Potential::harmonic(1.0), lambda).max_all();
    };
    double coarse = residual_at(2e-2);
    double mid = residual_at(1e-2);
    double fine = residual_at(5e-3);
    CHECK(mid < 1e-3);
    double slope = std::log(coarse / fine) / std::log(4.0);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("variational residuals") {
  double lambda = 0.1;
  auto v = Potential::harmonic(1.0);

  SUBCASE("trivial configuration") {
    RhoZetaUField fields;
    fields.rho = [](const Vec4&, double) { return 2.0; };
    fields.zeta = [](const Vec4&, double) { return 0.0; };
    fields.u = [](const Vec4&, double) { return Vec4{1, 0, 0, 0}; };
    auto res = variational_residuals(fields, Potential::zero(), lambda,
                                     {0.1, 0.2, 0.3, 0.4}, 0.5);
    CHECK(res.max_abs() < 1e-12);
  }

  SUBCASE("plane-wave data solves all three equations") {
    GaussianScenario sc{1.0, 1.0, lambda};
    Vec4 n{1, 0, 0, 0};
    RhoZetaUField fields;
    fields.rho = [&sc, n](const Vec4& x, double q) {
      return analytic_gaussian_g(minkowski_dot(n, x), q, sc);
    };
    fields.zeta = [&sc, n](const Vec4& x, double q) {
      return analytic_gaussian_f(minkowski_dot(n, x), q, sc);
    };
    fields.u = [n](const Vec4&, double) { return n; };
    double worst = 0.0;
    for (double sigma : {0.0, 0.05, 0.1})
      for (double dq : {-0.3, 0.0, 0.4}) {
        double q = analytic_gaussian_mean(sigma, sc) + dq;
        auto res = variational_residuals(fields, v, lambda, scale(n, sigma), q);
        worst = std::max(worst, res.max_abs());
      }
    CHECK(worst < 1e-4);
  }

  SUBCASE("manufactured density defect is reported exactly") {
    RhoZetaUField fields;
    fields.rho = [](const Vec4& x, double q) {
      return std::exp(q) * (1.0 + x[0] * x[0]);
    };
    fields.zeta = [](const Vec4& x, double q) { return q * q * q + x[0] * q; };
    fields.u = [](const Vec4&, double) { return Vec4{1, 0, 0, 0}; };
    Vec4 x{0.4, 0, 0, 0};
    double q = 0.3;
    double expected = 2.0 * x[0] * std::exp(q) +
                      std::exp(q) * (1.0 + x[0] * x[0]) *
                          (3.0 * q * q + x[0] + 6.0 * q);
    auto res = variational_residuals(fields, Potential::zero(), lambda, x, q, 3e-5);
    CHECK(res.rho_eq == doctest::Approx(expected).epsilon(1e-8));
  }

  SUBCASE("spacelike direction is rejected") {
    RhoZetaUField fields;
    fields.rho = [](const Vec4&, double) { return 1.0; };
    fields.zeta = [](const Vec4&, double) { return 0.0; };
    fields.u = [](const Vec4&, double) { return Vec4{0.3, 1.0, 0, 0}; };
    CHECK_THROWS_AS(
        variational_residuals(fields, Potential::zero(), lambda, {0, 0, 0, 0}, 0.0),
        Error);
  }
}

TEST_CASE("Lagrangian density gap identity") {
  double lambda = 0.1;

  SUBCASE("random smooth fields satisfy the pointwise identity") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
      double a1 = rng::uniform(55, i, 0), a2 = rng::uniform(55, i, 1);
      double a3 = rng::uniform(55, i, 2), a4 = rng::uniform(55, i, 3);
      RhoZetaUField fields;
      fields.rho = [=](const Vec4& x, double q) {
        return 1.2 + 0.5 * std::sin(a1 * x[0] + a2 * q + x[2]);
      };
      fields.zeta = [=](const Vec4& x, double q) {
        return 0.3 * std::cos(a3 * x[1] + q) + 0.2 * a4 * q * q + 0.1 * x[3];
      };
      fields.u = [=](const Vec4& x, double q) {
        Vec4 w{2.0 + std::sin(a1 * x[3] + q), 0.3 * std::cos(a2 * x[0]),
               0.2 * std::sin(a3 * q), 0.25 * std::cos(a4 * x[1] + q)};
        double norm = std::sqrt(minkowski_dot(w, w));
        return scale(w, 1.0 / norm);
      };
      Vec4 x{rng::uniform(56, i, 0), rng::uniform(56, i, 1), rng::uniform(56, i, 2),
             rng::uniform(56, i, 3)};
      double q = rng::uniform(56, i, 4) - 0.5;
      auto gap = lagrangian_gap(fields, lambda, x, q);
      CHECK(std::abs(gap.l_c - gap.l_q - gap.gap1 - gap.gap2) < 1e-10);
    }
  }

  SUBCASE("constant direction leaves only the Fisher term") {
    RhoZetaUField fields;
    fields.rho = [](const Vec4& x, double q) {
      return 1.0 + 0.4 * std::sin(x[0] + q);
    };
    fields.zeta = [](const Vec4& x, double q) { return 0.2 * q + 0.1 * x[0]; };
    fields.u = [](const Vec4&, double) { return Vec4{1, 0, 0, 0}; };
    Vec4 x{0.3, 0.1, -0.4, 0.2};
    double q = 0.25, h = 1e-4;
    auto gap = lagrangian_gap(fields, lambda, x, q, Potential::zero(), h);
    CHECK(gap.gap1 == 0.0);
    auto sqrt_rho = [&](double qq) { return std::sqrt(fields.rho(x, qq)); };
    double dsr = (sqrt_rho(q + h) - sqrt_rho(q - h)) / (2.0 * h);
    CHECK(gap.gap2 ==
          doctest::Approx(-0.5 * lambda * lambda * dsr * dsr).epsilon(1e-12));
  }

  SUBCASE("vanishing phase magnitude reduces the gap to the Fisher term") {
    RhoZetaUField fields;
    fields.rho = [](const Vec4&, double q) { return 1.0 + 0.3 * q * q; };
    fields.zeta = [](const Vec4&, double) { return 0.0; };
    fields.u = [](const Vec4& x, double) {
      Vec4 w{2.0 + 0.1 * std::sin(x[0]), 0.2, 0.1, 0.0};
      return scale(w, 1.0 / std::sqrt(minkowski_dot(w, w)));
    };
    auto gap = lagrangian_gap(fields, lambda, {0.2, 0.4, 0.1, 0.0}, 0.3);
    CHECK(gap.gap1 == 0.0);
    CHECK(gap.gap2 < 0.0);  // pure Fisher contribution
    CHECK(std::abs(gap.l_c - gap.l_q - gap.gap1 - gap.gap2) < 1e-12);
  }
}

TEST_CASE("classical limit sweep") {
  auto rows = classical_limit_sweep({0.4, 0.2, 0.1, 0.05}, 1.0, 1.0, 2.0 * M_PI);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i].g_std - rows[i].g_std_predicted) /
              rows[i].g_std_predicted <
          1e-6);
    if (i > 0) {
      CHECK(rows[i].f_gap_sup < rows[i - 1].f_gap_sup);
      CHECK(rows[i].qp_center / rows[i - 1].qp_center ==
            doctest::Approx(rows[i].lambda / rows[i - 1].lambda).epsilon(0.02));
    }
    // quantum potential at the packet center is omega lambda / 2
    CHECK(rows[i].qp_center ==
          doctest::Approx(0.5 * rows[i].lambda).epsilon(1e-4));
  }
  CHECK_THROWS_AS(classical_limit_sweep({0.1, 0.2}, 1.0, 1.0, 1.0), Error);
}
