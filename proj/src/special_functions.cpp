#include "bhlab/special_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "bhlab/errors.hpp"
#include "bhlab/quadrature.hpp"

namespace bhlab {
namespace {

double sgn(double y) { return y < 0.0 ? -1.0 : 1.0; }

void require_odd_theory(double a, double eps) {
  if (a >= 1.0 && eps == 0.0)
    throw DivergenceError("rho^{-a} is not integrable at y=0 for a >= 1, eps = 0");
}

// (1+s^2)^{-a/2} written to avoid overflow for large s.
double unit_kernel(double a, double s) { return std::exp(-0.5 * a * std::log1p(s * s)); }

}  // namespace

double normalization_factor(const WeightFamily& fam) {
  if (!fam.normalized || fam.eps == 0.0) return 1.0;
  const double e = std::pow(fam.eps, -fam.a);
  return fam.a >= 0.0 ? std::min(e, 1.0) : std::max(e, 1.0);
}

double rho(const WeightFamily& fam, double y) {
  if (fam.eps == 0.0) {
    if (y == 0.0) {
      if (fam.a < 0.0) throw SingularPointError("rho_0^a(0) is infinite for a < 0");
      return fam.a == 0.0 ? 1.0 : 0.0;
    }
    return std::pow(std::fabs(y), fam.a);
  }
  return std::pow(fam.eps * fam.eps + y * y, 0.5 * fam.a) * normalization_factor(fam);
}

double profile_integral(double a, double t, double rel_tol) {
  const double s = sgn(t);
  t = std::fabs(t);
  if (t == 0.0) return 0.0;
  if (a == 0.0) return s * t;
  if (a == -2.0) return s * (t + t * t * t / 3.0);
  auto k = [a](double x) { return unit_kernel(a, x); };
  if (t <= 1.0) return s * integrate_or_throw(k, 0.0, t, rel_tol);
  // Past s = 1 integrate in log s, which keeps the integrand smooth on long ranges.
  const double head = integrate_or_throw(k, 0.0, 1.0, rel_tol);
  auto klog = [a](double u) {
    return std::exp(u - 0.5 * a * std::log1p(std::exp(2.0 * u)));
  };
  return s * (head + integrate_or_throw(klog, 0.0, std::log(t), rel_tol));
}

double chi(const WeightFamily& fam, double y, double rel_tol) {
  const double a = fam.a;
  require_odd_theory(a, fam.eps);
  const double s = sgn(y);
  const double Y = std::fabs(y);
  if (a == 0.0) return y;
  const double norm = normalization_factor(WeightFamily{-a, fam.eps, fam.normalized});
  if (fam.eps == 0.0) return s * std::pow(Y, 1.0 - a) / (1.0 - a);
  const double e = fam.eps;
  if (a == -2.0) return norm * s * (e * e * Y + Y * Y * Y / 3.0);
  return norm * s * std::pow(e, 1.0 - a) * profile_integral(a, Y / e, rel_tol);
}

double weighted_primitive(const WeightFamily& fam, const ScalarSampler& g,
                          const XPoint& x, double y, double rel_tol) {
  const double a = fam.a;
  require_odd_theory(a, fam.eps);
  const double s = sgn(y);
  const double Y = std::fabs(y);
  if (Y == 0.0) return 0.0;
  double val = 0.0;
  if (a == 0.0) {
    val = integrate_or_throw([&](double t) { return g(x, t); }, 0.0, Y, rel_tol);
  } else if (fam.eps == 0.0) {
    // s = Y u^{1/(1-a)} removes the endpoint singularity of s^{-a}.
    const double p = 1.0 / (1.0 - a);
    val = std::pow(Y, 1.0 - a) *
          integrate_or_throw([&](double u) { return g(x, Y * std::pow(u, p)); }, 0.0, 1.0,
                             rel_tol);
  } else {
    const double e = fam.eps;
    auto k = [&](double t) { return std::pow(e * e + t * t, -0.5 * a) * g(x, t); };
    if (Y <= 4.0 * e) {
      val = integrate_or_throw(k, 0.0, Y, rel_tol);
    } else {
      val = integrate_or_throw(k, 0.0, e, rel_tol) +
            integrate_or_throw([&](double u) { const double t = std::exp(u); return k(t) * t; },
                               std::log(e), std::log(Y), rel_tol);
    }
    val *= (1.0 - a) * normalization_factor(WeightFamily{-a, fam.eps, fam.normalized});
  }
  return s * val;
}

double v_char(const CharacteristicSolution& sol, const XPoint& x, double y) {
  if (!sol.mu_inverse) return (1.0 - sol.family.a) * chi(sol.family, y, sol.quadrature_tol);
  return weighted_primitive(sol.family, sol.mu_inverse, x, y, sol.quadrature_tol);
}

double psi(double a, double eps, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("psi requires y > 0");
  require_odd_theory(a, eps);
  if (eps == 0.0) return 1.0 - a;
  const double t = y / eps;
  if (t < 1e-5) return 1.0 - a * t * t / 3.0;
  return t * unit_kernel(a, t) / profile_integral(a, t);
}

double xi(double a, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("xi requires t > 0");
  if (t < 1e-5) return 0.5 * t * (1.0 - a * t * t / 12.0);
  const double num = std::expm1((1.0 - 0.5 * a) * std::log1p(t * t)) / (2.0 - a);
  return num / profile_integral(a, t);
}

double omega(const WeightFamily& fam, double y) {
  require_odd_theory(fam.a, fam.eps);
  if (y == 0.0) return 0.0;
  if (fam.eps == 0.0) return std::pow(std::fabs(y), 2.0 - fam.a);
  const double c = (1.0 - fam.a) * chi(fam, y);
  return rho(fam, y) * c * c;
}

std::pair<double, double> potentials(PotentialKind kind, double a, double eps, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("potentials require y > 0");
  const double e2 = eps * eps;
  const double r2 = e2 + y * y;
  if (kind == PotentialKind::rho) {
    return {a * ((a - 2.0) * y * y + 2.0 * e2) / (4.0 * r2 * r2), -a * y * y / (2.0 * r2)};
  }
  require_odd_theory(a, eps);
  const double lp = a * y / r2;                // rho'/rho
  const double lpp = a * (e2 - y * y) / (r2 * r2);  // (rho'/rho)'
  double rc = 0.0;                             // rho * chi, unnormalized
  if (eps == 0.0) {
    rc = y / (1.0 - a);
  } else {
    rc = std::pow(r2, 0.5 * a) * chi(WeightFamily{a, eps, false}, y);
  }
  const double q = 1.0 / rc;
  const double L1 = lp + 2.0 * q;
  const double L2 = lpp - 2.0 * (lp * rc + 1.0) * q * q;
  if (kind == PotentialKind::omega_inverse) return {0.25 * L1 * L1 - 0.5 * L2, 0.5 * L1 * y};
  return {0.25 * L1 * L1 + 0.5 * L2, -0.5 * L1 * y};
}

double phi_big(double a, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("phi_big requires t > 0");
  const double t2 = t * t;
  const double b = std::sqrt(2.0) * psi(a, 1.0, t) + a * t2 / (std::sqrt(2.0) * (1.0 + t2));
  return b * b + a * t2 * ((2.0 - a) * t2 - 2.0) / (4.0 * (1.0 + t2) * (1.0 + t2));
}

double phi_big_limit_zero(double) { return 2.0; }

double phi_big_limit_infinity(double a) { return (2.0 - a) * (4.0 - a) / 4.0; }

double w_a(double a, double t) {
  if (!(a < 0.0)) throw std::invalid_argument("w_a requires a < 0");
  if (!(t > 0.0)) throw std::invalid_argument("w_a requires t > 0");
  const double c = -a;
  const double rc = std::sqrt(c);
  const double num = std::exp((1.0 - 0.5 * a) * std::log1p(t * t / c));
  return num / (t * rc * profile_integral(a, t / rc));
}

namespace {
double gamma_from(double a, double t, double w) {
  const double t2 = t * t;
  const double q = (-a + t2) / t2;
  return 2.0 * a * a * (w - 0.5) * (w - 0.5) + a * (2.0 - a) / 4.0 + a * a / (2.0 * t2) +
         (0.999 / 4.0) * q * q;
}
}  // namespace

double gamma_small(double a, double t) { return gamma_from(a, t, w_a(a, t)); }

double gamma_lower_bound_v(double a, double t) { return gamma_from(a, t, v_limit(t)); }

double v_limit(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("v_limit requires t > 0");
  if (t > kVLimitSafeBound) throw OverflowError("v_limit: t beyond the safe bound 60");
  // exp((s^2 - t^2)/2) <= 1 on [0, t]; below t - 80/t it is under e^{-40}.
  const double lo = t >= 1.0 ? std::max(0.0, t - 80.0 / t) : 0.0;
  const double J = integrate_or_throw(
      [t](double s) { return std::exp(0.5 * (s - t) * (s + t)); }, lo, t, 1e-13);
  return 1.0 / (t * J);
}

double v_limit_derivative(double t) {
  const double v = v_limit(t);
  return (t * t - 1.0) / t * v - t * v * v;
}

double gamma_ratio(double a, double eps, const ScalarSampler& mu_inverse, const XPoint& x,
                   double y) {
  if (!(y > 0.0)) throw std::invalid_argument("gamma_ratio requires y > 0");
  CharacteristicSolution sol{WeightFamily{a, eps, false}, mu_inverse, 1e-11};
  return v_char(sol, x, y) / ((1.0 - a) * chi(sol.family, y, 1e-11));
}

}  // namespace bhlab
