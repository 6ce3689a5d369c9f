#include <cmath>
#include <numbers>
#include <sstream>

#include "bhlab/assembly.hpp"
#include "bhlab/errors.hpp"
#include "bhlab/special_functions.hpp"
#include "doctest.h"

using namespace bhlab;
using std::numbers::pi;

namespace {

std::shared_ptr<const HalfGrid> rect(double h, int n = 1) {
  return std::make_shared<const HalfGrid>(n, Shape::half_rectangle, h);
}

ScalarSampler power_weight(double a) {
  return [a](const XPoint&, double y) { return std::pow(std::fabs(y), a); };
}

ScalarSampler one() {
  return [](const XPoint&, double) { return 1.0; };
}

}  // namespace

TEST_SUITE("assembly_solve") {

TEST_CASE("operator spec checks") {
  auto r = check_operator_spec(OperatorSpec::identity(2));
  CHECK(r.lambda_min == doctest::Approx(1.0));
  CHECK(r.lambda_max == doctest::Approx(1.0));
  CHECK(r.symmetric);
  CHECK(r.j_symmetric);
  OperatorSpec s;
  s.mu = [](const XPoint& x, double y) { return 1.0 + 0.1 * x[0] * x[0] + y * y; };
  s.T = [](const XPoint& x, double y) { return Vec2{0.2 * y * x[0], 0.0}; };
  auto r2 = check_operator_spec(s);
  CHECK(r2.lambda_min > 0.5);
  CHECK(r2.j_symmetric);
  CHECK(r2.sigma_defect == 0.0);
  OperatorSpec bad;
  bad.mu = [](const XPoint&, double) { return -1.0; };
  CHECK_THROWS_AS(check_operator_spec(bad), EllipticityError);
  OperatorSpec shifted;
  shifted.T = [](const XPoint&, double) { return Vec2{0.3, 0.0}; };
  auto r3 = check_operator_spec(shifted);
  CHECK(r3.sigma_defect == doctest::Approx(0.3));
  CHECK_FALSE(r3.j_symmetric);
}

TEST_CASE("u = y is reproduced to rounding") {
  auto g = rect(1.0 / 16);
  AssemblyOptions o;
  o.parity = Parity::odd;
  o.dirichlet_trace = [](const XPoint&, double y) { return y; };
  auto sys = assemble(g, one(), OperatorSpec::identity(), o);
  auto rep = solve_linear(sys, sys.boundary_rhs);
  for (std::size_t c = 0; c < g->size(); ++c) CHECK(std::fabs(rep.field.values[c] - g->y(c)) < 1e-9);
  CHECK(rep.relative_residual <= 1e-10);
  CHECK(rep.method == "cg+jacobi");
}

TEST_CASE("y^{1-a} is discretely harmonic in the interior") {
  const double a = 0.5;
  auto u = [a](const XPoint&, double y) { return y * std::pow(std::fabs(y), -a); };
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    auto g = rect(h);
    AssemblyOptions o;
    o.dirichlet_trace = u;
    auto sys = assemble(g, power_weight(a), OperatorSpec::identity(), o);
    auto f = sample_field(g, u, Parity::odd);
    Eigen::Map<const Eigen::VectorXd> uv(f.values.data(), long(f.values.size()));
    Eigen::VectorXd r = sys.K * uv - sys.boundary_rhs;
    double m = 0.0;
    for (std::size_t c = 0; c < g->size(); ++c)
      if (g->y(c) > 0.25 && g->y(c) < 0.75 && std::fabs(g->x(c)[0]) < 0.5) m = std::max(m, std::fabs(r[long(c)]));
    // The y-averaged weights make this profile exact, well inside the O(h^2) allowance.
    CHECK(m <= std::max(0.1 * h * h, 1e-8));
  }
}

TEST_CASE("even parity annihilates constants") {
  for (double a : {0.5, -1.5}) {
    auto g = std::make_shared<const HalfGrid>(1, Shape::half_disk, 1.0 / 16);
    AssemblyOptions o;
    o.parity = Parity::even;
    o.outer = OuterBoundary::neumann;
    auto sys = assemble(g, power_weight(a), OperatorSpec::identity(), o);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(long(g->size()));
    CHECK((sys.K * ones).cwiseAbs().maxCoeff() <= 1e-12 * Eigen::MatrixXd(sys.K).cwiseAbs().maxCoeff());
    CHECK(sys.boundary_rhs.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("symmetry and drift consistency") {
  auto g = rect(1.0 / 16, 2);
  OperatorSpec s;
  s.n = 2;
  s.mu = [](const XPoint& x, double y) { return 1.0 + 0.1 * x[0] * x[0] + 0.2 * y; };
  s.B_tilde = [](const XPoint& x, double) {
    Eigen::Matrix2d B;
    B << 1.0, 0.1 * x[1], 0.1 * x[1], 1.2;
    return B;
  };
  AssemblyOptions o;
  auto a0 = assemble(g, power_weight(0.3), s, o);
  CHECK(is_symmetric(a0.K));
  o.drift = [](const XPoint&, double) { return Vec3{0.0, 0.0, 0.0}; };
  auto a1 = assemble(g, power_weight(0.3), s, o);
  CHECK((a0.K - a1.K).norm() == 0.0);
  o.drift = [](const XPoint& x, double) { return Vec3{0.5 + x[0], 0.0, 0.1}; };
  auto a2 = assemble(g, power_weight(0.3), s, o);
  CHECK_FALSE(is_symmetric(a2.K));
}

TEST_CASE("solve_linear basics") {
  SparseMatrix I(5, 5);
  I.setIdentity();
  Eigen::VectorXd b(5);
  b << 1, -2, 3, 0.5, 7;
  auto r = solve_linear(I, b);
  CHECK((r.x - b).norm() == 0.0);
  // 1D Poisson -u'' = 1 on (0,1), u(0)=u(1)=0, h = 1/64 (vertex grid)
  const int m = 63;
  const double h = 1.0 / 64;
  SparseMatrix K(m, m);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < m; ++i) {
    t.emplace_back(i, i, 2.0 / (h * h));
    if (i > 0) t.emplace_back(i, i - 1, -1.0 / (h * h));
    if (i + 1 < m) t.emplace_back(i, i + 1, -1.0 / (h * h));
  }
  K.setFromTriplets(t.begin(), t.end());
  auto p = solve_linear(K, Eigen::VectorXd::Ones(m));
  double err = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = (i + 1) * h;
    err = std::max(err, std::fabs(p.x[i] - x * (1 - x) / 2));
  }
  CHECK(err <= 1e-4);
}

TEST_CASE("manufactured problems") {
  auto g = rect(1.0 / 32);
  SUBCASE("u = y(1-x^2), a = 0") {
    auto u = [](const XPoint& x, double y) { return y * (1 - x[0] * x[0]); };
    auto mp = manufactured_problem(g, u, one(), OperatorSpec::identity(), {}, ManufacturedMode::discrete);
    auto rep = solve_linear(mp.system, mp.rhs);
    CHECK(rep.relative_residual <= 1e-10);
    for (std::size_t c = 0; c < g->size(); ++c) CHECK(std::fabs(rep.field.values[c] - mp.exact.values[c]) < 1e-8);
    auto mc = manufactured_problem(g, u, one(), OperatorSpec::identity(), {}, ManufacturedMode::continuum,
                                   [](const XPoint&, double y) { return 2 * y; });
    // Away from the outer boundary the quadratic profile is differenced exactly.
    for (std::size_t c = 0; c < g->size(); ++c)
      if (std::fabs(g->x(c)[0]) < 0.9 && g->y(c) < 0.9)
        CHECK(std::fabs(mc.rhs[long(c)] - mp.rhs[long(c)]) < 1e-9);
  }
  SUBCASE("u = sin(pi x) y^{1-a} with w = y^a") {
    const double a = 0.5;
    auto u = [a](const XPoint& x, double y) { return std::sin(pi * x[0]) * y * std::pow(std::fabs(y), -a); };
    auto mp = manufactured_problem(g, u, power_weight(a), OperatorSpec::identity(), {}, ManufacturedMode::discrete);
    auto rep = solve_linear(mp.system, mp.rhs);
    CHECK(rep.relative_residual <= 1e-10);
    double err = 0;
    for (std::size_t c = 0; c < g->size(); ++c) err = std::max(err, std::fabs(rep.field.values[c] - mp.exact.values[c]));
    CHECK(err < 1e-8);
  }
  SUBCASE("zero solution") {
    auto mp = manufactured_problem(g, [](const XPoint&, double) { return 0.0; }, one(),
                                   OperatorSpec::identity(), {}, ManufacturedMode::continuum);
    CHECK(mp.rhs.norm() == 0.0);
  }
  SUBCASE("parity mismatch") {
    CHECK_THROWS_AS(manufactured_problem(g, [](const XPoint&, double y) { return y * y; }, one(),
                                         OperatorSpec::identity(), {}, ManufacturedMode::discrete),
                    ParityError);
  }
}

TEST_CASE("convergence studies") {
  const double hs[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  SUBCASE("smooth a = 0") {
    ConvergenceProblem p;
    p.u_exact = [](const XPoint& x, double y) { return std::sin(y) * std::cos(x[0]); };
    p.f = [](const XPoint& x, double y) { return 2 * std::sin(y) * std::cos(x[0]); };
    p.weight = one();
    auto rows = convergence_study(p, hs);
    CHECK(std::isnan(rows[0].order));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].order == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("a = 0.5 odd problem, interior norm") {
    const double a = 0.5;
    ConvergenceProblem p;
    p.u_exact = [a](const XPoint& x, double y) { return std::sin(pi * x[0]) * y * std::pow(std::fabs(y), -a); };
    p.f = [a](const XPoint& x, double y) { return pi * pi * std::sin(pi * x[0]) * std::pow(y, 1 - a); };
    p.weight = power_weight(a);
    p.error_y_min = 0.1;
    auto rows = convergence_study(p, hs);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].order >= 1.5);
  }
  SUBCASE("off-diagonal coefficients") {
    ConvergenceProblem p;
    p.spec.T = [](const XPoint&, double y) { return Vec2{0.3 * y, 0.0}; };
    p.u_exact = [](const XPoint& x, double y) { return std::sin(y) * std::cos(x[0]); };
    p.f = [](const XPoint& x, double y) {
      return 2 * std::sin(y) * std::cos(x[0]) + 0.6 * y * std::cos(y) * std::sin(x[0]) +
             0.3 * std::sin(y) * std::sin(x[0]);
    };
    p.weight = one();
    p.error_y_min = 0.1;
    auto rows = convergence_study(p, hs);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].order >= 1.5);
  }
  SUBCASE("u = y is exact") {
    ConvergenceProblem p;
    p.u_exact = [](const XPoint&, double y) { return y; };
    p.weight = one();
    auto rows = convergence_study(p, hs);
    for (const auto& r : rows) CHECK(r.exact);
  }
  SUBCASE("homogeneous odd problem converges to y^{1-a}") {
    for (double a : {0.5, -0.5}) {
      ConvergenceProblem p;
      p.u_exact = [a](const XPoint&, double y) { return y * std::pow(std::fabs(y), -a); };
      p.weight = power_weight(a);
      auto rows = convergence_study(p, hs);
      for (std::size_t i = 1; i < rows.size(); ++i) CHECK((rows[i].exact || rows[i].max_error < rows[i - 1].max_error));
      CHECK(rows.back().max_error < 1e-6);
    }
  }
  SUBCASE("homogeneous odd problem on the half disk") {
    for (double a : {0.5, -0.5}) {
      ConvergenceProblem p;
      p.shape = Shape::half_disk;
      p.u_exact = [a](const XPoint&, double y) { return y * std::pow(std::fabs(y), -a); };
      p.weight = power_weight(a);
      auto rows = convergence_study(p, hs);
      for (std::size_t i = 1; i < rows.size(); ++i) CHECK((rows[i].exact || rows[i].max_error < rows[i - 1].max_error));
    }
  }
  SUBCASE("bad h lists") {
    ConvergenceProblem p;
    const double two[] = {0.125, 0.0625};
    const double up[] = {0.0625, 0.125, 0.03125};
    CHECK_THROWS_AS(convergence_study(p, two), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(p, up), std::invalid_argument);
  }
}

TEST_CASE("weight equivalence for constant mu") {
  const double a = -0.5, eps = 0.1, m = 2.0;
  CharacteristicSolution sol{{a, eps}, [m](const XPoint&, double) { return 1.0 / m; }, 1e-12};
  ScalarSampler w1 = [&](const XPoint& x, double y) {
    const double v = v_char(sol, x, y);
    return rho({a, eps}, y) * v * v;
  };
  ScalarSampler w2 = [&](const XPoint&, double y) { return omega({a, eps}, y) / (m * m); };
  auto g = rect(1.0 / 32);
  OperatorSpec s;
  s.mu = [m](const XPoint&, double) { return m; };
  AssemblyOptions o;
  o.parity = Parity::even;
  o.dirichlet_trace = [](const XPoint& x, double) { return x[0] * x[0]; };
  auto f = [](const XPoint& x, double) { return std::cos(x[0]); };
  auto s1 = assemble(g, w1, s, o);
  auto s2 = assemble(g, w2, s, o);
  auto r1 = solve_linear(s1, s1.boundary_rhs + source_vector(s1, f, {}));
  auto r2 = solve_linear(s2, s2.boundary_rhs + source_vector(s2, f, {}));
  double d = 0;
  for (std::size_t c = 0; c < g->size(); ++c) d = std::max(d, std::fabs(r1.field.values[c] - r2.field.values[c]));
  CHECK(d <= 1e-10);
}

TEST_CASE("field csv") {
  auto g = rect(0.25);
  auto f = sample_field(g, [](const XPoint& x, double y) { return x[0] + y; }, Parity::none);
  std::ostringstream os;
  write_field_csv(os, f, {"grid " + g->describe()});
  CHECK(os.str().rfind("# grid n=1", 0) == 0);
  CHECK(os.str().find("x,y,value\n") != std::string::npos);
}

}  // TEST_SUITE
