#include "bhlab/transform.hpp"

#include <cmath>
#include <limits>

#include "bhlab/errors.hpp"

namespace bhlab {

namespace {

double safe_v(const CharacteristicSolution& sol, const XPoint& x, double y) {
  const double v = v_char(sol, x, y);
  if (!(std::fabs(v) >= 1e-14)) throw SingularPointError("v_char vanishes at a sample point");
  return v;
}

Vec3 lift(const Vec2& b) { return {b[0], b[1], 0.0}; }

}  // namespace

DiscreteField ratio_field(const DiscreteField& u, const CharacteristicSolution& sol) {
  if (u.parity != Parity::odd) throw ParityError("ratio_field expects an odd field");
  DiscreteField w = u;
  w.parity = Parity::even;
  const HalfGrid& g = *u.grid;
  for (std::size_t c = 0; c < g.size(); ++c) w.values[c] = u.values[c] / safe_v(sol, g.x(c), g.y(c));
  return w;
}

DiscreteField reconstruct(const DiscreteField& w, const CharacteristicSolution& sol) {
  DiscreteField u = w;
  u.parity = Parity::odd;
  const HalfGrid& g = *w.grid;
  for (std::size_t c = 0; c < g.size(); ++c) u.values[c] = w.values[c] * v_char(sol, g.x(c), g.y(c));
  return u;
}

double dv_dy(const CharacteristicSolution& sol, const XPoint& x, double y) {
  const WeightFamily& f = sol.family;
  const double r = rho(WeightFamily{-f.a, f.eps, f.normalized}, y);
  return (1.0 - f.a) * r * (sol.mu_inverse ? sol.mu_inverse(x, y) : 1.0);
}

Vec2 grad_x_v(const CharacteristicSolution& sol, const XPoint& x, double y, int n,
              const MuInverseGradient& mu_inverse_grad) {
  Vec2 g{0.0, 0.0};
  if (!sol.mu_inverse) return g;
  for (int k = 0; k < n; ++k) {
    ScalarSampler d;
    if (mu_inverse_grad) {
      d = [&, k](const XPoint& z, double s) { return mu_inverse_grad(z, s)[k]; };
    } else {
      d = [&, k](const XPoint& z, double s) {
        const double step = 1e-5 * std::max(1.0, std::fabs(z[k]));
        XPoint p = z, m = z;
        p[k] += step;
        m[k] -= step;
        return (sol.mu_inverse(p, s) - sol.mu_inverse(m, s)) / (2.0 * step);
      };
    }
    g[k] = weighted_primitive(sol.family, d, x, y, sol.quadrature_tol);
  }
  return g;
}

AuxiliaryRhs auxiliary_rhs(const OperatorSpec& spec, const CharacteristicSolution& sol,
                           const ScalarSampler& f, const VecSampler& F,
                           const MuInverseGradient& mu_inverse_grad) {
  if (!(sol.family.a < 1.0)) throw std::invalid_argument("auxiliary_rhs requires a < 1");
  if (spec.T) {
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const XPoint x{0.1 * i, spec.n == 2 ? 0.1 * j : 0.0};
        const Vec2 t = spec.T_at(x, 0.0);
        if (std::fabs(t[0]) + std::fabs(t[1]) > 1e-12)
          throw AssumptionError("T(x,0) != 0: T/(rho v) is singular at Sigma");
        if (spec.n == 1) break;
      }
  }
  const int n = spec.n;
  AuxiliaryRhs b;
  b.has_drift = bool(sol.mu_inverse) || bool(spec.T);
  b.weight = [sol](const XPoint& x, double y) {
    const double v = v_char(sol, x, y);
    return rho(sol.family, y) * v * v;
  };
  b.f_bar = [sol, f](const XPoint& x, double y) { return f ? f(x, y) / safe_v(sol, x, y) : 0.0; };
  if (F)
    b.F_bar = [sol, F](const XPoint& x, double y) {
      const double v = safe_v(sol, x, y);
      Vec3 r = F(x, y);
      for (double& c : r) c /= v;
      return r;
    };
  b.b_identity = [sol, n, mu_inverse_grad](const XPoint& x, double y) {
    const Vec2 g = grad_x_v(sol, x, y, n, mu_inverse_grad);
    const double v = safe_v(sol, x, y);
    return lift({g[0] / v, g[1] / v});
  };
  b.b_tildeA = [sol, n, spec, mu_inverse_grad](const XPoint& x, double y) {
    const Vec2 g = grad_x_v(sol, x, y, n, mu_inverse_grad);
    const double v = safe_v(sol, x, y);
    const Eigen::Matrix2d M = spec.mu_at(x, y) * spec.B_at(x, y);
    Vec2 r{0.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] += M(i, j) * g[j] / v;
    return lift(r);
  };
  b.T_bar = [sol, spec](const XPoint& x, double y) {
    const Vec2 t = spec.T_at(x, y);
    const double d = rho(sol.family, y) * safe_v(sol, x, y);
    return lift({t[0] / d, t[1] / d});
  };
  b.V_term = [sol, n, spec, mu_inverse_grad](const XPoint& x, double y) {
    // div_x of mu B~ grad_x v and of T by central differences; reporting only.
    const double v = safe_v(sol, x, y);
    const double step = 1e-4;
    double dflux = 0.0, dT = 0.0;
    for (int k = 0; k < n; ++k) {
      XPoint p = x, m = x;
      p[k] += step;
      m[k] -= step;
      auto flux = [&](const XPoint& z) {
        const Vec2 g = grad_x_v(sol, z, y, n, mu_inverse_grad);
        const Eigen::Matrix2d M = spec.mu_at(z, y) * spec.B_at(z, y);
        double r = 0.0;
        for (int j = 0; j < n; ++j) r += M(k, j) * g[j];
        return r;
      };
      dflux += (flux(p) - flux(m)) / (2.0 * step);
      dT += (spec.T_at(p, y)[k] - spec.T_at(m, y)[k]) / (2.0 * step);
    }
    return dflux / v + dT / (rho(sol.family, y) * v);
  };
  b.forcing = [sol, n, f, F, mu_inverse_grad](const XPoint& x, double y) {
    const double v = safe_v(sol, x, y);
    double r = f ? f(x, y) / v : 0.0;
    if (F) {
      const Vec3 Fv = F(x, y);
      const Vec2 gx = grad_x_v(sol, x, y, n, mu_inverse_grad);
      const double dot = Fv[0] * gx[0] + Fv[1] * gx[1] + Fv[2] * dv_dy(sol, x, y);
      r -= dot / (v * v);
    }
    return r;
  };
  return b;
}

LinearSystem assemble_auxiliary(std::shared_ptr<const HalfGrid> grid, const OperatorSpec& spec,
                                const AuxiliaryRhs& bundle, const ScalarSampler& w_trace) {
  AssemblyOptions o;
  o.parity = Parity::even;
  o.outer = OuterBoundary::dirichlet;
  o.dirichlet_trace = w_trace;
  o.weight_id = "rho*v^2";
  if (bundle.has_drift) {
    // beta = b^A~ + T_bar enters as div_x(W beta w) - W beta . grad_x w - W (beta . b^I) w.
    auto beta = [bundle](const XPoint& x, double y) {
      const Vec3 b = bundle.b_tildeA(x, y), t = bundle.T_bar(x, y);
      return Vec3{b[0] + t[0], b[1] + t[1], 0.0};
    };
    o.conservative_drift = beta;
    o.drift = [beta](const XPoint& x, double y) {
      const Vec3 b = beta(x, y);
      return Vec3{-b[0], -b[1], 0.0};
    };
    o.reaction = [beta, bundle](const XPoint& x, double y) {
      const Vec3 b = beta(x, y), bi = bundle.b_identity(x, y);
      return b[0] * bi[0] + b[1] * bi[1];
    };
  }
  return assemble(grid, bundle.weight, spec, o);
}

Eigen::VectorXd auxiliary_rhs_vector(const LinearSystem& sys, const AuxiliaryRhs& bundle) {
  return sys.boundary_rhs + source_vector(sys, bundle.forcing, bundle.F_bar);
}

namespace {

bool touches_outer(const HalfGrid& g, std::size_t c) {
  auto idx = g.index(c);
  const int axes = g.n() == 2 ? 3 : 2;
  for (int k = 0; k < axes; ++k) {
    const int axis = k == axes - 1 ? kAxisY : k;
    for (int s : {-1, 1}) {
      if (axis == kAxisY && s < 0 && idx[2] == 0) continue;
      auto j = idx;
      j[axis] += s;
      if (g.find(j) < 0) return true;
    }
  }
  return false;
}

double weighted_norm(const HalfGrid& g, const Eigen::VectorXd& r, const std::vector<double>& w,
                     std::size_t* rows) {
  const double vol = std::pow(g.h(), g.n() + 1);
  double s = 0.0;
  std::size_t used = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (touches_outer(g, c)) continue;
    s += vol * r[long(c)] * r[long(c)] / w[c];
    ++used;
  }
  if (rows) *rows = used;
  return std::sqrt(s);
}

}  // namespace

RatioReport verify_ratio_equation(const RatioProblem& p, std::shared_ptr<const HalfGrid> grid,
                                  double tol) {
  const HalfGrid& g = *grid;
  RatioReport rep;
  rep.h = g.h();
  const auto bundle = auxiliary_rhs(p.spec, p.sol, p.f, p.F, p.mu_inverse_grad);
  const CharacteristicSolution sol = p.sol;
  const ScalarSampler u = p.u_exact;
  ScalarSampler w_exact = [sol, u](const XPoint& x, double y) { return u(x, y) / safe_v(sol, x, y); };
  auto sys = assemble_auxiliary(grid, p.spec, bundle, w_exact);
  const auto w = sample_field(grid, w_exact, Parity::even);
  const Eigen::Map<const Eigen::VectorXd> wv(w.values.data(), long(w.values.size()));
  const Eigen::VectorXd r = sys.K * wv - auxiliary_rhs_vector(sys, bundle);
  rep.residual_norm = weighted_norm(g, r, sys.cell_weight, &rep.rows_used);

  const WeightFamily fam = p.sol.family;
  if (fam.eps > 0.0 || fam.a > -1.0) {
    AssemblyOptions o;
    o.parity = Parity::odd;
    o.dirichlet_trace = u;
    ScalarSampler weight = [fam](const XPoint&, double y) { return rho(fam, y); };
    auto odd = assemble(grid, weight, p.spec, o);
    const auto uf = sample_field(grid, u, Parity::odd);
    const Eigen::Map<const Eigen::VectorXd> uv(uf.values.data(), long(uf.values.size()));
    const Eigen::VectorXd ro = odd.K * uv - odd.boundary_rhs - source_vector(odd, p.f, p.F);
    rep.odd_residual_norm = weighted_norm(g, ro, odd.cell_weight, nullptr);
  } else {
    // rho is not locally integrable: only the ratio form is meaningful.
    rep.odd_residual_norm = std::numeric_limits<double>::quiet_NaN();
  }
  rep.pass = rep.residual_norm <= 10.0 * (tol + p.truncation_constant * rep.h * rep.h);
  return rep;
}

double effective_dimension(int n, double a) { return n + 1 + std::max(a, 0.0); }

double effective_dimension_auxiliary(int n, double a) { return n + 3 + std::max(-a, 0.0); }

double superdegeneracy_ratio(const WeightFamily& fam, double y) {
  const double c = (1.0 - fam.a) * chi(fam, y);
  const double W = rho(fam, y) * c * c;
  return fam.eps > 0.0 ? W / (y * y) : W / std::pow(std::fabs(y), 2.0 - fam.a);
}

}  // namespace bhlab
