#pragma once

#include <utility>

#include "bhlab/types.hpp"

namespace bhlab {

/// The pair (a, eps) defining rho = (eps^2 + y^2)^{a/2}.
struct WeightFamily {
  double a = 0.0;
  double eps = 0.0;
  /// Apply the min/max{eps^{-a}, 1} factor. It is 1 for eps in [0, 1].
  bool normalized = false;
};

/// Normalization factor (1 unless normalized and eps > 1).
double normalization_factor(const WeightFamily& fam);

/// rho_eps^a(y). Throws SingularPointError at eps = 0, y = 0, a < 0.
double rho(const WeightFamily& fam, double y);

/// chi_eps^a(y) = int_0^y rho_eps^{-a}. Odd in y.
double chi(const WeightFamily& fam, double y, double rel_tol = 1e-10);

/// int_0^t (1+s^2)^{-a/2} ds, odd in t.
double profile_integral(double a, double t, double rel_tol = 1e-10);

struct CharacteristicSolution {
  WeightFamily family;
  /// mu(x,s)^{-1}; empty means identically 1.
  ScalarSampler mu_inverse;
  double quadrature_tol = 1e-10;
};

/// v = (1-a) int_0^y rho^{-a}(s) mu(x,s)^{-1} ds. Odd in y.
double v_char(const CharacteristicSolution& sol, const XPoint& x, double y);

/// (1-a) int_0^y rho^{-a}(s) g(x,s) ds for an arbitrary sampler g.
/// Used for x-derivatives of v (g = d_x mu^{-1}).
double weighted_primitive(const WeightFamily& fam, const ScalarSampler& g,
                          const XPoint& x, double y, double rel_tol = 1e-10);

/// psi_eps^a(y) = y rho^{-a}(y) / chi(y), y > 0. Computed in t = y/eps.
double psi(double a, double eps, double y);

/// xi_1^a(t) = int_0^t (1+s^2)^{-a/2} s ds / int_0^t (1+s^2)^{-a/2} ds.
double xi(double a, double t);

/// omega_eps^a(y) = rho (1-a)^2 chi^2. Even in y.
double omega(const WeightFamily& fam, double y);

enum class PotentialKind { rho, omega_inverse, omega };

/// Potentials (V, W) of the flattened quadratic forms, y > 0.
std::pair<double, double> potentials(PotentialKind kind, double a, double eps,
                                     double y);

/// Phi_a(t), t > 0.
double phi_big(double a, double t);
double phi_big_limit_zero(double a);
double phi_big_limit_infinity(double a);

/// w_a(t) entering gamma_a; a < 0.
double w_a(double a, double t);

/// gamma_a(t) built from w_a; a < 0.
double gamma_small(double a, double t);

/// The lower bound of gamma_a obtained by replacing w_a with v.
double gamma_lower_bound_v(double a, double t);

/// Largest t accepted by v_limit.
inline constexpr double kVLimitSafeBound = 60.0;

/// v(t) = e^{t^2/2} / (t int_0^t e^{s^2/2}); throws OverflowError past the safe bound.
double v_limit(double t);

/// v'(t) from the Riccati identity v' = (t^2-1)/t v - t v^2.
double v_limit_derivative(double t);

/// v_char / ((1-a) chi).
double gamma_ratio(double a, double eps, const ScalarSampler& mu_inverse,
                   const XPoint& x, double y);

}  // namespace bhlab
