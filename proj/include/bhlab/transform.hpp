#pragma once

#include <functional>
#include <memory>

#include "bhlab/assembly.hpp"
#include "bhlab/special_functions.hpp"

namespace bhlab {

/// w = u / v_char, cellwise. Parity becomes even.
DiscreteField ratio_field(const DiscreteField& u, const CharacteristicSolution& sol);

/// u = w * v_char, cellwise. Parity becomes odd.
DiscreteField reconstruct(const DiscreteField& w, const CharacteristicSolution& sol);

/// d_y v = (1-a) rho^{-a}(y) / mu(x,y).
double dv_dy(const CharacteristicSolution& sol, const XPoint& x, double y);

/// grad_x mu^{-1}; FD of sol.mu_inverse when not supplied.
using MuInverseGradient = std::function<Vec2(const XPoint&, double)>;

/// grad_x v by differentiating under the integral sign; components beyond n are 0.
Vec2 grad_x_v(const CharacteristicSolution& sol, const XPoint& x, double y, int n,
              const MuInverseGradient& mu_inverse_grad = {});

/// Coefficients of the equation satisfied by w = u/v. All vector samplers use the
/// (x1, x2, y) layout; b and T_bar have zero y-component.
struct AuxiliaryRhs {
  ScalarSampler weight;  ///< rho v^2
  ScalarSampler f_bar;
  VecSampler F_bar;
  VecSampler b_tildeA;    ///< mu B~ grad_x v / v
  VecSampler b_identity;  ///< grad_x v / v
  VecSampler T_bar;       ///< T / (rho v)
  ScalarSampler V_term;   ///< zero-order coefficient before integrating by parts (reporting)
  /// f_bar - F_bar . grad v / v, the cell forcing of the conservative form.
  ScalarSampler forcing;
  /// False when v does not depend on x and T = 0: no drift terms.
  bool has_drift = false;
};

/// Throws AssumptionError if T(x,0) != 0 on a probe set (T_bar would be singular).
AuxiliaryRhs auxiliary_rhs(const OperatorSpec& spec, const CharacteristicSolution& sol,
                           const ScalarSampler& f, const VecSampler& F,
                           const MuInverseGradient& mu_inverse_grad = {});

/// Even-parity system for w with drift, conservative drift and reaction folded in.
LinearSystem assemble_auxiliary(std::shared_ptr<const HalfGrid> grid, const OperatorSpec& spec,
                                const AuxiliaryRhs& bundle, const ScalarSampler& w_trace);

/// Right-hand side of the auxiliary system (boundary part included).
Eigen::VectorXd auxiliary_rhs_vector(const LinearSystem& sys, const AuxiliaryRhs& bundle);

struct RatioProblem {
  OperatorSpec spec;
  CharacteristicSolution sol;
  ScalarSampler u_exact;  ///< odd
  ScalarSampler f;
  VecSampler F;
  MuInverseGradient mu_inverse_grad;
  double truncation_constant = 1.0;
};

struct RatioReport {
  double h = 0.0;
  /// sqrt(sum h^d r^2 / W) over rows away from the outer boundary.
  double residual_norm = 0.0;
  /// Same norm for u in the odd operator (weight rho); truncation only.
  double odd_residual_norm = 0.0;
  std::size_t rows_used = 0;
  bool pass = false;
};

/// Residual of the sampled ratio u/v in the auxiliary scheme. pass if
/// residual <= 10 (tol + C h^2), C = truncation_constant.
RatioReport verify_ratio_equation(const RatioProblem& p, std::shared_ptr<const HalfGrid> grid,
                                  double tol = 1e-10);

/// d = n + 1 + a^+.
double effective_dimension(int n, double a);
/// d_bar = n + 3 + (-a)^+.
double effective_dimension_auxiliary(int n, double a);

/// rho v^2 / y^2 (eps > 0) or / |y|^{2-a} (eps = 0), with mu = 1.
double superdegeneracy_ratio(const WeightFamily& fam, double y);

}  // namespace bhlab
