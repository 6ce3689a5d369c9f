#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bhlab/errors.hpp"
#include "bhlab/spectral.hpp"
#include "doctest.h"

using namespace bhlab;

namespace {

ScalarSampler power_weight(double a) {
  return [a](const XPoint&, double y) { return std::pow(std::fabs(y), a); };
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("polar mesh is nested under halving and symmetric") {
  PolarMesh c(1.0 / 16), f(1.0 / 32);
  CHECK(c.nr() == 16);
  CHECK(f.ntheta() == 2 * c.ntheta());
  for (int j = 0; j <= c.ntheta(); ++j) CHECK(f.theta(2 * j) == doctest::Approx(c.theta(j)).epsilon(1e-15));
  for (int j = 0; j <= c.ntheta(); ++j) {
    const Vec2 p = c.position(c.nr(), j), q = c.position(c.nr(), c.ntheta() - j);
    CHECK(p[1] == q[1]);
    CHECK(std::fabs(p[0] + q[0]) <= 1e-15);
  }
  // Cubic grading: first angle ~ (2 pi^3 / 3) / ntheta^3.
  const double n = c.ntheta();
  CHECK(c.theta(1) == doctest::Approx(2.0 * std::pow(M_PI, 3) / (3.0 * n * n * n)).epsilon(1e-3));
  CHECK_THROWS_AS(PolarMesh(0.3), InvalidSpacingError);
}

TEST_CASE("trace eigenvalue approaches 1 - b from above") {
  for (double b : {-0.5, 0.0, 0.5}) {
    double prev = INFINITY;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const auto r = trace_eigen(b, 0.0, h);
      CHECK(r.residual <= 1e-8);
      CHECK(r.lambda >= 1.0 - b - 1e-10);
      CHECK(r.lambda <= prev + 1e-8);
      prev = r.lambda;
    }
    CHECK(std::fabs(prev - (1.0 - b)) <= 0.01);
  }
}

TEST_CASE("super-singular exponents recover 3 - a") {
  for (double a : {0.5, -1.0}) {
    const auto r = trace_eigen(a - 2.0, 0.0, 1.0 / 32);
    CHECK(r.residual <= 1e-8);
    CHECK(std::fabs(r.lambda - (3.0 - a)) <= 0.05);
  }
}

TEST_CASE("eigenvector vanishes on Sigma and is proportional to y") {
  const auto r = trace_eigen(0.0, 0.0, 1.0 / 16);
  const PolarMesh& m = *r.mesh;
  CHECK(r.eigenvector.size() == m.num_nodes());
  CHECK(r.eigenvector[0] == 0.0);
  for (int i = 1; i <= m.nr(); ++i) {
    CHECK(r.eigenvector[m.node(i, 0)] == 0.0);
    CHECK(r.eigenvector[m.node(i, m.ntheta())] == 0.0);
  }
  // Eigenfunction y: nodal values proportional to y on a fine enough mesh.
  const int mid = m.ntheta() / 2;
  const double ratio = r.eigenvector[m.node(m.nr(), mid)] / m.position(m.nr(), mid)[1];
  const double ratio2 = r.eigenvector[m.node(m.nr() / 2, mid)] / m.position(m.nr() / 2, mid)[1];
  CHECK(ratio2 == doctest::Approx(ratio).epsilon(0.01));
}

TEST_CASE("Rayleigh quotients are scale invariant") {
  const auto w = SpectralWeight::power(0.5, 0.0);
  const auto r1 = trace_eigen(w, 1.0 / 16), r2 = trace_eigen(w.scaled(7.25), 1.0 / 16);
  CHECK(std::fabs(r1.lambda - r2.lambda) <= 1e-12 * r1.lambda);
  const auto s = SpectralWeight::power(-1.0, 0.1);
  const auto h1 = boundary_hardy_quotient(s, 1.0 / 16), h2 = boundary_hardy_quotient(s.scaled(0.03), 1.0 / 16);
  CHECK(std::fabs(h1.lambda - h2.lambda) <= 1e-12 * h1.lambda);
}

TEST_CASE("Hardy quotient for w = 1") {
  double prev = INFINITY;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const auto r = hardy_quotient(SpectralWeight::power(0.0, 0.0), h);
    CHECK(r.residual <= 1e-8);
    CHECK(r.lambda >= 0.25);
    CHECK(r.lambda <= prev + 1e-8);
    prev = r.lambda;
  }
  // One-dimensional logarithmic trial functions give about 0.28 at this resolution.
  CHECK(prev <= 0.40);
}

TEST_CASE("Hardy quotient for rho^a stays away from zero in eps") {
  std::vector<double> lam;
  for (double eps : {0.0, 0.1, 1.0}) {
    const auto r = hardy_quotient(SpectralWeight::power(0.5, eps), 1.0 / 32);
    CHECK(r.residual <= 1e-8);
    lam.push_back(r.lambda);
  }
  const auto [lo, hi] = std::minmax_element(lam.begin(), lam.end());
  CHECK(*lo > 0.05);
  CHECK(*hi / *lo <= 5.0);
}

TEST_CASE("boundary Hardy quotients are positive and stable") {
  const auto c = boundary_hardy_quotient(SpectralWeight::power(0.0, 0.0), 1.0 / 32);
  const auto f = boundary_hardy_quotient(SpectralWeight::power(0.0, 0.0), 1.0 / 64);
  CHECK(f.lambda > 0.0);
  CHECK(f.lambda <= c.lambda + 1e-8);
  CHECK(std::fabs(f.lambda - c.lambda) <= 0.1 * f.lambda);
  std::vector<double> lam;
  for (double eps : {0.0, 0.1, 1.0}) lam.push_back(boundary_hardy_quotient(SpectralWeight::power(-1.0, eps), 1.0 / 32).lambda);
  for (double l : lam) CHECK(l > 0.1);
  const auto om = boundary_hardy_quotient(SpectralWeight::omega_inverse(-1.0, 0.1), 1.0 / 32);
  CHECK(om.lambda > 0.0);
  CHECK(om.residual <= 1e-8);
}

TEST_CASE("sampler weights match the closed forms") {
  // rho_eps^a by sampler against the built-in weight: same quadrature, same lambda.
  const double a = 0.5, eps = 0.2;
  auto s = SpectralWeight::sampler([=](const XPoint&, double y) { return std::pow(eps * eps + y * y, 0.5 * a); },
                                   "sampled");
  const auto r1 = trace_eigen(s, 1.0 / 16), r2 = trace_eigen(SpectralWeight::power(a, eps), 1.0 / 16);
  CHECK(r1.lambda == doctest::Approx(r2.lambda).epsilon(1e-12));
  // Sampled y^0.5 against the closed-form integration: same limit, different quadrature.
  auto y05 = SpectralWeight::sampler(power_weight(0.5), "y^0.5", 0.5);
  const auto r3 = trace_eigen(y05, 1.0 / 32), r4 = trace_eigen(0.5, 0.0, 1.0 / 32);
  CHECK(std::fabs(r3.lambda - r4.lambda) <= 0.01);
}

TEST_CASE("stability sweep") {
  const std::vector<double> rs{1, 4, 16, 64};
  const auto flat = eigen_stability_sweep(0.0, rs, 1.0 / 16);
  for (const auto& row : flat) CHECK(row.lambda == doctest::Approx(flat.front().lambda).epsilon(1e-12));
  CHECK(std::fabs(flat.front().lambda - 1.0) <= 0.01);

  const auto half = eigen_stability_sweep(0.5, rs, 1.0 / 64);
  CHECK(std::fabs(half.back().lambda - 0.5) < std::fabs(half.front().lambda - 0.5));
  CHECK(std::fabs(half.back().lambda - 0.5) <= 0.05);
  for (const auto& row : half) CHECK(row.residual <= 1e-8);

  const std::vector<double> big{1, 64};
  const auto om = eigen_stability_sweep(-1.0, big, 1.0 / 32, SweepForm::omega);
  CHECK(std::fabs(om.back().lambda - 4.0) < std::fabs(om.front().lambda - 4.0));
  CHECK(std::fabs(om.back().lambda - 4.0) <= 0.1);

  const std::vector<double> bad{4, 1};
  CHECK_THROWS_AS(eigen_stability_sweep(0.5, bad, 1.0 / 16), std::invalid_argument);
  CHECK_THROWS_AS(eigen_stability_sweep(-1.5, rs, 1.0 / 16), std::invalid_argument);
}

TEST_CASE("eigen CSV") {
  std::vector<EigenResult> rows{trace_eigen(0.0, 0.0, 1.0 / 16)};
  std::ostringstream os;
  write_eigen_csv(os, rows);
  const std::string s = os.str();
  CHECK(s.rfind("quotient_id,a,eps_or_r,h,lambda,residual\n", 0) == 0);
  CHECK(s.find("trace:rho_0^0,0,0,0.0625,1.000") != std::string::npos);
}

TEST_CASE("growth monitor") {
  const double a = 0.5;
  auto grid = std::make_shared<const HalfGrid>(1, Shape::half_disk, 1.0 / 64, 1.25);
  const std::vector<double> rs{0.25, 0.5, 0.75, 1.0};

  auto exact = sample_field(grid, [a](const XPoint&, double y) { return y * std::pow(std::fabs(y), -a); }, Parity::odd);
  const auto rows = growth_monitor(exact, a, rs);
  for (const auto& row : rows) CHECK(row.normalized == doctest::Approx(rows.back().normalized).epsilon(0.02));
  // H(1) = int_0^pi sin^a sin^{2-2a} = int sin^{2-a}.
  CHECK(rows.back().normalized == doctest::Approx(std::sqrt(M_PI) * std::tgamma(1.25) / std::tgamma(1.75)).epsilon(0.02));

  auto zero = sample_field(grid, [](const XPoint&, double) { return 0.0; }, Parity::odd);
  for (const auto& row : growth_monitor(zero, a, rs)) CHECK(row.H == 0.0);

  AssemblyOptions o;
  o.parity = Parity::odd;
  o.dirichlet_trace = [a](const XPoint& x, double y) { return y * std::pow(std::fabs(y), -a) * (1.0 + 0.1 * x[0] * x[0]); };
  auto sys = assemble(grid, power_weight(a), OperatorSpec::identity(), o);
  const auto sol = solve_linear(sys, sys.boundary_rhs);
  const auto pert = growth_monitor(sol.field, a, rs);
  CHECK(growth_nondecreasing(pert, 0.02));
  CHECK(pert.back().normalized > pert.front().normalized);

  const std::vector<double> far{1.3};
  CHECK_THROWS_AS(growth_monitor(exact, a, far), std::out_of_range);
  auto even = exact;
  even.parity = Parity::even;
  CHECK_THROWS_AS(growth_monitor(even, a, rs), ParityError);
}

TEST_CASE("growth band rejects decreasing profiles") {
  std::vector<GrowthRow> rows(3);
  rows[0].normalized = 1.0;
  rows[1].normalized = 0.99;
  rows[2].normalized = 1.2;
  CHECK(growth_nondecreasing(rows, 0.02));
  rows[1].normalized = 0.95;
  CHECK_FALSE(growth_nondecreasing(rows, 0.02));
}

TEST_CASE("isometry transform") {
  auto grid = std::make_shared<const HalfGrid>(1, Shape::half_disk, 1.0 / 16);
  auto u = sample_field(grid, [](const XPoint& x, double y) { return std::exp(-x[0] * x[0]) * y; }, Parity::odd);
  const auto id = isometry_transform(u, WeightFamily{0.0, 0.3}, IsometryDirection::to_flat);
  for (std::size_t c = 0; c < u.values.size(); ++c) CHECK(id.values[c] == u.values[c]);

  for (auto kind : {PotentialKind::rho, PotentialKind::omega, PotentialKind::omega_inverse}) {
    const WeightFamily fam{-0.7, 0.0};
    const auto v = isometry_transform(u, fam, IsometryDirection::to_flat, kind);
    const auto back = isometry_transform(v, fam, IsometryDirection::from_flat, kind);
    double err = 0.0;
    for (std::size_t c = 0; c < u.values.size(); ++c)
      err = std::max(err, std::fabs(back.values[c] - u.values[c]) / std::max(1.0, std::fabs(u.values[c])));
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("energy identity of the flattening map") {
  auto bump = [](const XPoint& x, double y) { return std::exp(-(x[0] * x[0] + y * y)) * (1.0 + 0.5 * x[0]); };
  const auto e = isometry_energy_check(bump, WeightFamily{0.5, 1.0}, 1.0 / 64);
  CHECK(e.relative_gap <= 0.02);
  // a = 0: both sides are the Dirichlet energy.
  const auto z = isometry_energy_check(bump, WeightFamily{0.0, 1.0}, 1.0 / 16);
  CHECK(z.relative_gap <= 1e-12);
  CHECK_THROWS_AS(isometry_energy_check(bump, WeightFamily{0.5, 0.0}, 1.0 / 16), std::invalid_argument);
}

}  // TEST_SUITE
