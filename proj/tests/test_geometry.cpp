#include <cmath>
#include <random>
#include <set>

#include "bhlab/errors.hpp"
#include "bhlab/geometry.hpp"
#include "doctest.h"

using namespace bhlab;

TEST_SUITE("geometry") {

TEST_CASE("grid counts") {
  auto g = build_half_grid(1, Shape::half_rectangle, 0.25);
  CHECK(g.size() == 32);
  CHECK(g.count_faces(FaceKind::sigma) == 8);
  auto d = build_half_grid(1, Shape::half_disk, 0.25);
  for (std::size_t c = 0; c < d.size(); ++c) {
    const auto z = d.center(c);
    CHECK(z[0] * z[0] + z[2] * z[2] <= 1.0);
  }
  CHECK(d.size() < 32);
  auto g3 = build_half_grid(2, Shape::half_rectangle, 0.125);
  CHECK(g3.size() == 16 * 16 * 8);
  CHECK_THROWS_AS(build_half_grid(1, Shape::half_rectangle, 0.3), InvalidSpacingError);
  CHECK_THROWS_AS(build_half_grid(1, Shape::half_rectangle, 0.5), InvalidSpacingError);
}

TEST_CASE("grid invariants") {
  for (auto shape : {Shape::half_rectangle, Shape::half_disk}) {
    for (int n : {1, 2}) {
      auto g = build_half_grid(n, shape, 0.125);
      double ymin = 1e9;
      for (std::size_t c = 0; c < g.size(); ++c) ymin = std::min(ymin, g.y(c));
      CHECK(ymin == 0.0625);
      std::set<std::tuple<std::size_t, int, int>> seen;
      for (const auto& f : g.boundary_faces()) {
        CHECK(seen.insert({f.cell, f.axis, f.side}).second);
        if (f.kind == FaceKind::sigma) CHECK(f.midpoint[2] == 0.0);
      }
    }
  }
}

TEST_CASE("refinement quadruples and sigma faces nest") {
  auto c = build_half_grid(1, Shape::half_rectangle, 1.0 / 8);
  auto f = build_half_grid(1, Shape::half_rectangle, 1.0 / 16);
  CHECK(f.size() == 4 * c.size());
  // Every fine sigma face lies inside exactly one coarse sigma face.
  for (const auto& ff : f.boundary_faces()) {
    if (ff.kind != FaceKind::sigma) continue;
    int hits = 0;
    for (const auto& cf : c.boundary_faces())
      if (cf.kind == FaceKind::sigma && std::fabs(ff.midpoint[0] - cf.midpoint[0]) < c.h() / 2) ++hits;
    CHECK(hits == 1);
  }
}

TEST_CASE("fermi_mu") {
  auto L = EmbeddedCurve::line({0, 0}, {1, 0});
  CHECK(fermi_mu(L, 0.3, 0.7) == 1.0);
  auto C = EmbeddedCurve::circle({0, 0}, 2.0, true);
  CHECK(fermi_mu(C, 1.0, 0.5) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK_THROWS_AS(fermi_mu(C, 1.0, 2.0), ChartViolationError);
  // Jacobian of Z(t,y) by finite differences
  for (double t : {0.0, 1.3, 4.0}) {
    const double h = 1e-6, y = 0.5;
    auto Zt = [&](double s) { return C.fermi_map(s, y); };
    auto Zy = [&](double s) { return C.fermi_map(t, s); };
    const Vec2 a = Zt(t + h), b = Zt(t - h), c = Zy(y + h), d = Zy(y - h);
    const double j11 = (a[0] - b[0]) / (2 * h), j21 = (a[1] - b[1]) / (2 * h);
    const double j12 = (c[0] - d[0]) / (2 * h), j22 = (c[1] - d[1]) / (2 * h);
    CHECK(std::fabs(std::fabs(j11 * j22 - j12 * j21) - fermi_mu(C, t, y)) < 1e-6);
  }
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto E = EmbeddedCurve::circle({0.5, -1}, 3.0, false, false);
  for (int i = 0; i < 50; ++i) {
    const double t = E.t_max * u(gen);
    CHECK(fermi_mu(E, t, 0.0) == doctest::Approx(E.speed(t)).epsilon(1e-15));
  }
}

TEST_CASE("mean curvature") {
  auto L = EmbeddedCurve::line({0, 0}, {1, 0});
  auto mL = mean_curvature_check(L, 0.2, 0.3);
  CHECK(mL.analytic == 0.0);
  CHECK(mL.residual == 0.0);
  auto C = EmbeddedCurve::circle({0, 0}, 2.0, true);
  CHECK(mean_curvature_check(C, 0.5, 0.0).analytic == doctest::Approx(0.5));
  auto m = mean_curvature_check(C, 0.5, 0.5);
  CHECK(m.analytic == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(m.residual <= 1e-6);
  for (double R : {1.0, 2.0, 5.0}) {
    auto c = EmbeddedCurve::circle({0, 0}, R, true);
    CHECK(mean_curvature_check(c, 0.1, 0.4 * R).residual <= 1e-6);
  }
}

TEST_CASE("signed distance") {
  auto C = EmbeddedCurve::circle({0, 0}, 1.0, true);
  auto s = signed_distance(C, {0, 0.5});
  CHECK(s.d == doctest::Approx(0.5).epsilon(1e-12));
  auto on = signed_distance(C, {std::cos(0.7), std::sin(0.7)});
  CHECK(std::fabs(on.d) < 1e-12);
  auto L = EmbeddedCurve::line({0, 0}, {1, 0});
  auto l = signed_distance(L, {0.3, 0.2});
  CHECK(l.d == doctest::Approx(0.2));
  CHECK(l.foot == doctest::Approx(0.3));
  CHECK(signed_distance(L, {0.3, -0.2}).d == doctest::Approx(-0.2));
  CHECK_THROWS_AS(signed_distance(C, {0, 0}), AmbiguousProjectionError);
  // |grad d| = 1 in the tube
  auto C2 = EmbeddedCurve::circle({0, 0}, 2.0, true);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> ut(0.0, 6.28), ur(1.4, 2.6);
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const double th = ut(gen), r = ur(gen);
    const Vec2 X{r * std::cos(th), r * std::sin(th)};
    const double gx = (signed_distance(C2, {X[0] + h, X[1]}).d - signed_distance(C2, {X[0] - h, X[1]}).d) / (2 * h);
    const double gy = (signed_distance(C2, {X[0], X[1] + h}).d - signed_distance(C2, {X[0], X[1] - h}).d) / (2 * h);
    CHECK(std::hypot(gx, gy) == doctest::Approx(1.0).epsilon(1e-4));
  }
}

}  // TEST_SUITE
