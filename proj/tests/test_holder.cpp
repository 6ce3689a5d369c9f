#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <vector>

#include "bhlab/errors.hpp"
#include "bhlab/holder.hpp"
#include "doctest.h"

using namespace bhlab;

namespace {

std::shared_ptr<const HalfGrid> grid(double h, Shape s = Shape::half_rectangle) {
  return std::make_shared<const HalfGrid>(build_half_grid(1, s, h));
}

DiscreteField field(double h, ScalarSampler f, Parity p = Parity::odd) {
  return sample_field(grid(h), std::move(f), p);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_SUITE("holder_harness") {

TEST_CASE("seminorm of simple fields") {
  const auto c = field(1.0 / 32, [](const XPoint&, double) { return 2.0; }, Parity::even);
  CHECK(holder_seminorm(c, 0.5, {}) == 0.0);

  const auto lin = field(1.0 / 32, [](const XPoint&, double y) { return y; });
  CHECK(holder_seminorm(lin, 1.0, {}) == doctest::Approx(1.0).epsilon(1e-12));

  // |y1^0.5 - y2^0.5| <= |y1 - y2|^0.5; the near pair of centers y = h/2 and y = h/2 + 1/4 bounds it below.
  double prev = 0.0;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const auto s = field(h, [](const XPoint&, double y) { return std::sqrt(std::fabs(y)) * (y < 0 ? -1 : 1); });
    const double v = holder_seminorm(s, 0.5, {});
    const double lo = (std::sqrt(h / 2 + 0.25) - std::sqrt(h / 2)) / 0.5;
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v >= lo - 1e-12);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("seminorm is homogeneous and monotone in the region") {
  auto f = [](const XPoint& x, double y) { return y * std::cos(3 * x[0]) + y * y; };
  const auto u = field(1.0 / 64, f);
  const auto u3 = field(1.0 / 64, [f](const XPoint& x, double y) { return -3 * f(x, y); });
  const double s = holder_seminorm(u, 0.4, {});
  CHECK(holder_seminorm(u3, 0.4, {}) == doctest::Approx(3 * s).epsilon(1e-12));
  HolderRegion small{0.25, 0.0, 0.25};
  CHECK(holder_seminorm(u, 0.4, small) <= s);
}

TEST_CASE("doubling the far-pair budget moves the seminorm by at most 5%") {
  const auto u = field(1.0 / 64, [](const XPoint& x, double y) { return std::sin(5 * x[0]) * std::cbrt(y); });
  PairSampling p;
  const double s1 = holder_seminorm(u, 0.3, {}, p);
  p.far_budget *= 2;
  const double s2 = holder_seminorm(u, 0.3, {}, p);
  CHECK(s2 >= s1);
  CHECK(s2 <= 1.05 * s1);
}

TEST_CASE("region validation") {
  const auto u = field(1.0 / 16, [](const XPoint&, double y) { return y; });
  CHECK_THROWS_AS(holder_seminorm(u, 0.5, HolderRegion{0.95, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(holder_seminorm(u, 0.5, HolderRegion{0.5, 0.3, 0.301}), EmptyRegionError);
}

TEST_CASE("C^{1,alpha} seminorm") {
  const auto aff = field(1.0 / 32, [](const XPoint& x, double y) { return 2 * y + 0.5 * x[0] * y; });
  const auto a = c1alpha_seminorm(aff, 0.5, {});
  CHECK(a.grad_holder <= 1e-10 + 0.5 * 0.5 * 2);  // bilinear part has Lipschitz gradient 0.5

  const auto pure = field(1.0 / 32, [](const XPoint&, double y) { return 3 * y; });
  const auto p = c1alpha_seminorm(pure, 0.5, {});
  CHECK(p.grad_holder <= 1e-10);
  CHECK(p.sup_grad == doctest::Approx(3.0).epsilon(1e-12));

  // Even parabola: gradient y, Lipschitz constant 1.
  const auto par = field(1.0 / 64, [](const XPoint&, double y) { return 0.5 * y * y; }, Parity::even);
  const auto q = c1alpha_seminorm(par, 1.0, {});
  CHECK(q.sup_grad == doctest::Approx(0.5).epsilon(0.02));
  CHECK(q.grad_holder == doctest::Approx(1.0).epsilon(0.02));

  // y^{1.5}: gradient 1.5 y^{0.5}, so the 0.5 seminorm of the gradient tends to 1.5.
  const auto s = field(1.0 / 256, [](const XPoint&, double y) { return y * std::sqrt(std::fabs(y)); });
  CHECK(c1alpha_seminorm(s, 0.5, {}).grad_holder == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("exponent estimate") {
  const XPoint o{0.0, 0.0};
  const auto r = field(1.0 / 256, [](const XPoint&, double y) { return std::sqrt(std::fabs(y)) * (y < 0 ? -1 : 1); });
  const auto e = exponent_estimate(r, o);
  CHECK(e.alpha_hat == doctest::Approx(0.5).epsilon(0.1));
  CHECK(e.radii.size() == 4);

  const auto lin = field(1.0 / 128, [](const XPoint&, double y) { return y; });
  CHECK(exponent_estimate(lin, o).alpha_hat == doctest::Approx(1.0).epsilon(1e-9));

  const auto c = field(1.0 / 64, [](const XPoint&, double) { return 1.0; }, Parity::even);
  const auto ec = exponent_estimate(c, o);
  CHECK(ec.smooth);
  CHECK(ec.alpha_hat == 1.0);
}

TEST_CASE("alpha windows") {
  CHECK(alpha_window(SweepMode::ratio_c0, 1, 0.5, {}) == 1.0);
  CHECK(alpha_window(SweepMode::ratio_c0, 1, 0.5, {10, kInf, kInf}) == 1.0);
  // d = n + 3 + (-a)^+ = 5.5 for a = -1.5.
  CHECK(alpha_window(SweepMode::ratio_c0, 1, -1.5, {kInf, 11, kInf}) == doctest::Approx(0.5));
  CHECK(alpha_window(SweepMode::ratio_c1, 1, 0.5, {8, kInf, kInf}) == doctest::Approx(0.5));
  CHECK(alpha_window(SweepMode::odd_direct_c0, 1, 0.5, {}) == doctest::Approx(0.5));
  // d = n + 1 + a^+ = 2.2, so 1 - d/p2 = 0.78 with p2 = 10; 1 - a = 0.8 is larger.
  CHECK(alpha_window(SweepMode::odd_direct_c0, 1, 0.2, {kInf, 10, kInf}) == doctest::Approx(0.78));
}

TEST_CASE("sweep mode names round-trip") {
  for (auto m : {SweepMode::ratio_c0, SweepMode::ratio_c1, SweepMode::odd_direct_c0})
    CHECK(parse_sweep_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_sweep_mode("ratio"), ConfigError);
}

TEST_CASE("a = 0 sweep gives identical rows") {
  SweepOptions o;
  o.h = 1.0 / 16;
  const auto eps = default_eps_list();
  const auto r = epsilon_sweep(SweepFamily::standard(0.0, false), eps, SweepMode::ratio_c0, o);
  REQUIRE(r.per_eps.size() == eps.size());
  for (const auto& row : r.per_eps) CHECK(row.seminorm == r.per_eps.front().seminorm);
  CHECK(r.uniformity_ratio == 1.0);
  CHECK(r.pass);
}

TEST_CASE("standard family is uniform in eps") {
  SweepOptions o;
  o.h = 1.0 / 32;
  const auto eps = default_eps_list();
  for (double a : {0.5, -1.5}) {
    const auto r = epsilon_sweep(SweepFamily::standard(a, true), eps, SweepMode::ratio_c0, o);
    CHECK(r.uniformity_ratio <= 1.5);
    CHECK(r.trend_slope <= 0.1);
    CHECK(r.pass);
    for (const auto& row : r.per_eps) CHECK(row.solver_residual <= 1e-8);
  }
}

TEST_CASE("odd direct mode flags alphas outside the window") {
  SweepOptions o;
  o.h = 1.0 / 64;
  o.alpha = 0.7;
  const std::vector<double> eps{1, 0.1, 0.01, 0};
  const auto r = epsilon_sweep(SweepFamily::standard(0.5, false), eps, SweepMode::odd_direct_c0, o);
  CHECK_FALSE(r.alpha_admissible);
  CHECK_FALSE(r.pass);
  CHECK(r.alpha_max == doctest::Approx(0.5));
  CHECK(r.exponent_hat == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("sweep argument checks") {
  const auto fam = SweepFamily::standard(0.5, false);
  const std::vector<double> no_zero{1, 0.1, 0.01};
  const std::vector<double> narrow{0.1, 0.05, 0};
  CHECK_THROWS_AS(epsilon_sweep(fam, no_zero, SweepMode::ratio_c0), std::invalid_argument);
  CHECK_THROWS_AS(epsilon_sweep(fam, narrow, SweepMode::ratio_c0), std::invalid_argument);
  const std::vector<double> ok{1, 0.01, 0};
  CHECK_THROWS(epsilon_sweep(SweepFamily::standard(-1.5, false), ok, SweepMode::odd_direct_c0));
}

TEST_CASE("sweep writers") {
  SweepOptions o;
  o.h = 1.0 / 16;
  const std::vector<double> eps{1, 0.01, 0};
  const auto r = epsilon_sweep(SweepFamily::standard(0.5, false), eps, SweepMode::ratio_c0, o);
  std::ostringstream csv, plot, verdict;
  write_sweep_csv(csv, r);
  write_sweep_plot(plot, r);
  write_sweep_verdict(verdict, r);
  CHECK(csv.str().rfind("eps,seminorm,sup_norm,sup_grad,f_norm,F_norm,solver_method,solver_residual\n", 0) == 0);
  int lines = 0;
  for (char ch : plot.str()) lines += ch == '\n';
  CHECK(lines == 4);  // header plus one row per eps
  CHECK(verdict.str().find(r.pass ? "# verdict=pass" : "# verdict=fail") != std::string::npos);
}

TEST_CASE("Fermi demo on a circle") {
  FermiDemoOptions o;
  o.h = 1.0 / 32;
  const auto r = fermi_demo(o);
  CHECK(r.jacobian_error <= 1e-6);
  CHECK(r.c0.pass);
  CHECK(r.c1_restricted.pass);
  REQUIRE(r.c1_unrestricted.per_eps.size() == o.eps_list.size());
  // At eps = 0 the restriction y >= sqrt(eps) is void, so both tables agree.
  CHECK(r.c1_restricted.per_eps.back().seminorm == r.c1_unrestricted.per_eps.back().seminorm);
  CHECK(r.c1_restricted.per_eps.front().seminorm <= r.c1_unrestricted.per_eps.front().seminorm);

  const auto fam = fermi_family(2.0, 0.5);
  // mu = 1 - y/2 for the unit-speed circle of radius 2 with inward normal.
  CHECK(fam.spec.mu_at(XPoint{0.3, 0.0}, 0.4) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(fam.spec.B_at(XPoint{0.3, 0.0}, 0.4)(0, 0) == doctest::Approx(1.0 / 0.64).epsilon(1e-14));
}

TEST_CASE("Moser bound ratio") {
  const auto g = grid(1.0 / 32);
  const auto w = [](const XPoint&, double y) { return std::pow(std::fabs(y), 0.5); };
  const auto f = [](const XPoint&, double) { return 1.0; };
  const auto dn = data_norms(*g, w, f, {}, kInf, kInf);
  CHECK(dn.f == doctest::Approx(1.0));
  CHECK(dn.F == 0.0);

  const auto u = sample_field(g, [](const XPoint&, double y) { return y; }, Parity::odd);
  const double r1 = moser_bound_check(u, w, 2.0, dn, {});
  CHECK(r1 > 0.0);
  // Scaling data and field together leaves the ratio unchanged.
  auto u2 = u;
  for (double& v : u2.values) v *= 4;
  CHECK(moser_bound_check(u2, w, 2.0, DataNorms{4 * dn.f, 0}, {}) == doctest::Approx(r1).epsilon(1e-12));

  auto z = u;
  for (double& v : z.values) v = 0;
  CHECK_THROWS_AS(moser_bound_check(z, w, 2.0, DataNorms{}, {}), std::domain_error);

  const std::vector<double> tight{1.0, 1.2, 0.9}, loose{1.0, 1.1, 4.0};
  CHECK(moser_spread_ok(tight));
  CHECK_FALSE(moser_spread_ok(loose));
}

}  // TEST_SUITE
