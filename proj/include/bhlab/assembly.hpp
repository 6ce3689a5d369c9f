#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bhlab/geometry.hpp"
#include "bhlab/types.hpp"

namespace bhlab {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using MatrixSampler = std::function<Eigen::Matrix2d(const XPoint&, double)>;
using Vec2Sampler = std::function<Vec2(const XPoint&, double)>;

/// A = mu [[B, T], [T^t, 1]] in (x1, x2, y) layout.
struct OperatorSpec {
  int n = 1;
  ScalarSampler mu;       ///< empty means 1
  MatrixSampler B_tilde;  ///< empty means identity; top-left n x n block used
  Vec2Sampler T;          ///< empty means 0; must vanish at y = 0
  /// Optional analytic grad_x mu; finite differences are used when empty.
  Vec2Sampler mu_grad_x;

  double mu_at(const XPoint& x, double y) const { return mu ? mu(x, y) : 1.0; }
  Eigen::Matrix2d B_at(const XPoint& x, double y) const;
  Vec2 T_at(const XPoint& x, double y) const;
  Vec2 mu_grad_at(const XPoint& x, double y) const;
  /// 3x3 matrix; row and column 1 are zero when n = 1.
  Eigen::Matrix3d A(const XPoint& x, double y) const;

  static OperatorSpec identity(int n = 1);
};

struct EllipticityReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool symmetric = true;
  /// Samplers respect mu, B even and T odd in y.
  bool j_symmetric = true;
  /// max |T(x, 0)|
  double sigma_defect = 0.0;
};

/// Sampled check of symmetry and uniform ellipticity over [-1,1]^n x (0,1].
/// Throws EllipticityError if some A xi . xi <= 0.
EllipticityReport check_operator_spec(const OperatorSpec& spec, int samples = 1000,
                                      int directions = 10);

struct DiscreteField {
  std::shared_ptr<const HalfGrid> grid;
  std::vector<double> values;
  Parity parity = Parity::none;

  double max_abs() const;
};

/// Cell-center samples of f.
DiscreteField sample_field(std::shared_ptr<const HalfGrid> grid, const ScalarSampler& f,
                           Parity parity);

/// CSV rows "x[,x2],y,value" preceded by '#' header lines.
void write_field_csv(std::ostream& os, const DiscreteField& f,
                     const std::vector<std::string>& header);

enum class OuterBoundary { dirichlet, neumann };

struct AssemblyOptions {
  Parity parity = Parity::odd;
  OuterBoundary outer = OuterBoundary::dirichlet;
  /// Dirichlet data on outer faces (and on Sigma when parity is none). Empty means 0.
  ScalarSampler dirichlet_trace;
  /// Adds -w b . grad u (centered differences).
  VecSampler drift;
  /// Adds -div_x(w beta u); only the x components of beta are used.
  VecSampler conservative_drift;
  /// Adds + w c u.
  ScalarSampler reaction;
  std::string weight_id = "w";
};

/// Discrete operator K and the constant boundary contribution: the scheme reads
/// K u = boundary_rhs + source.
struct LinearSystem {
  std::shared_ptr<const HalfGrid> grid;
  SparseMatrix K;
  Eigen::VectorXd boundary_rhs;
  std::vector<double> cell_weight;
  /// Indexed 6*cell + 2*axis + (side > 0); NaN on faces without flux.
  std::vector<double> face_weight;
  AssemblyOptions options;
};

/// Flux-form finite volumes for -div(w A grad u) with harmonically averaged face weights.
LinearSystem assemble(std::shared_ptr<const HalfGrid> grid, const ScalarSampler& weight,
                      const OperatorSpec& spec, const AssemblyOptions& options);

/// Cell values of w f + div(w F) consistent with assemble().
Eigen::VectorXd source_vector(const LinearSystem& sys, const ScalarSampler& f, const VecSampler& F);

bool is_symmetric(const SparseMatrix& K, double rel_tol = 1e-13);

struct SolverOptions {
  double tol = 1e-10;
  int max_iterations = 100000;
};

struct LinearSolveResult {
  Eigen::VectorXd x;
  double relative_residual = 0.0;
  int iterations = 0;
  std::string method;
};

/// CG with Jacobi preconditioning for symmetric K, BiCGSTAB otherwise; sparse LU
/// when the iteration misses the tolerance. Throws SolverError on failure.
LinearSolveResult solve_linear(const SparseMatrix& K, const Eigen::VectorXd& rhs,
                               const SolverOptions& opt = {});

struct SolveReport {
  DiscreteField field;
  double relative_residual = 0.0;
  int iterations = 0;
  std::string method;
  std::string assembly_weight_id;
  double tolerance = 0.0;
  int iteration_cap = 0;
};

SolveReport solve_linear(const LinearSystem& sys, const Eigen::VectorXd& rhs,
                         const SolverOptions& opt = {});

enum class ManufacturedMode { discrete, continuum };

struct ManufacturedProblem {
  LinearSystem system;
  Eigen::VectorXd rhs;
  DiscreteField exact;
};

/// Throws ParityError when u_exact does not have the requested parity.
/// Outer Dirichlet data default to u_exact itself.
ManufacturedProblem manufactured_problem(std::shared_ptr<const HalfGrid> grid,
                                         const ScalarSampler& u_exact,
                                         const ScalarSampler& weight, const OperatorSpec& spec,
                                         AssemblyOptions options, ManufacturedMode mode,
                                         const ScalarSampler& f = {}, const VecSampler& F = {});

struct ConvergenceProblem {
  int n = 1;
  Shape shape = Shape::half_rectangle;
  double extent = 1.0;
  ScalarSampler u_exact;
  ScalarSampler weight;
  ScalarSampler f;
  VecSampler F;
  OperatorSpec spec;
  AssemblyOptions options;
  ManufacturedMode mode = ManufacturedMode::continuum;
  /// Max-norm error is measured over cells with y >= error_y_min.
  double error_y_min = 0.0;
};

struct ConvergenceRow {
  double h = 0.0;
  double max_error = 0.0;
  double order = 0.0;  ///< NaN on the first row or when exact
  bool exact = false;  ///< error at rounding level
};

/// Requires a strictly decreasing h_list with at least 3 entries.
std::vector<ConvergenceRow> convergence_study(const ConvergenceProblem& p,
                                              std::span<const double> h_list,
                                              const SolverOptions& opt = {});

}  // namespace bhlab
