#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bhlab/assembly.hpp"
#include "bhlab/special_functions.hpp"

namespace bhlab {

/// Nodal mesh of the unit half-disk in polar coordinates, Q1 in (r, theta).
/// Radial spacing h; angles graded cubically toward Sigma (theta = 0, pi).
/// Halving h gives a nested mesh whenever 1/(4h) is an integer.
class PolarMesh {
 public:
  explicit PolarMesh(double h, double radius = 1.0);

  int nr() const { return nr_; }
  int ntheta() const { return nth_; }
  double h() const { return h_; }
  double radius() const { return radius_; }
  double r(int i) const { return radius_ * i / nr_; }
  double theta(int j) const { return theta_[std::size_t(j)]; }
  /// Node index; i = 0 is the origin for every j.
  std::size_t node(int i, int j) const;
  std::size_t num_nodes() const { return 1 + std::size_t(nr_) * std::size_t(nth_ + 1); }
  /// (x, y) of a node.
  Vec2 position(int i, int j) const;
  std::string describe() const;

 private:
  double h_, radius_;
  int nr_, nth_;
  std::vector<double> theta_;
};

/// Weight entering the quadratic forms, as a function of y (and x for samplers).
struct SpectralWeight {
  enum class Kind { power, omega_inverse, sampler };
  Kind kind = Kind::power;
  double exponent = 0.0;  ///< b for power, a for omega_inverse
  double eps = 0.0;
  double scale = 1.0;
  /// Behaviour y^q at Sigma, for sampler weights.
  double sigma_order = 0.0;
  ScalarSampler f;
  std::string id;

  /// scale * rho_eps^b.
  static SpectralWeight power(double b, double eps = 0.0);
  /// (omega_eps^a)^{-1}.
  static SpectralWeight omega_inverse(double a, double eps = 0.0);
  static SpectralWeight sampler(ScalarSampler f, std::string id, double sigma_order = 0.0);

  double operator()(const XPoint& x, double y) const;
  /// Exponent q with w ~ y^q at Sigma.
  double order_at_sigma() const;
  /// w = c y^q exactly (eps = 0 closed forms).
  bool separable() const;
  SpectralWeight scaled(double c) const;
};

struct EigenResult {
  double lambda = 0.0;
  double a = 0.0;
  double eps_or_r = 0.0;
  double grid_h = 0.0;
  std::shared_ptr<const PolarMesh> mesh;
  /// Nodal values, zero on constrained nodes; normalized to unit denominator.
  std::vector<double> eigenvector;
  std::string quotient_id;
  /// ||K v - lambda M v|| / ||K v||.
  double residual = 0.0;
  int iterations = 0;
  std::size_t free_dofs = 0;
};

struct EigenOptions {
  double tol = 1e-10;
  int krylov_dim = 60;
  int max_restarts = 60;
};

/// min int rho_eps^b |grad u|^2 / int_{S+} rho_eps^b u^2 over u = 0 on Sigma.
EigenResult trace_eigen(double b, double eps, double h, const EigenOptions& opt = {});
/// Same quotient for an arbitrary weight.
EigenResult trace_eigen(const SpectralWeight& w, double h, const EigenOptions& opt = {});

/// min int w |grad u|^2 / int (w / y^2) u^2 over u = 0 on Sigma.
EigenResult hardy_quotient(const SpectralWeight& w, double h, const EigenOptions& opt = {});

/// min int w |grad u|^2 / int_{S+} (w / y) u^2 over u = 0 on Sigma.
EigenResult boundary_hardy_quotient(const SpectralWeight& w, double h, const EigenOptions& opt = {});

enum class SweepForm { rho, omega };

struct SweepRow {
  double r = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
};

/// lambda_r for the weight rho_{1/r}^a (limit 1 - a) or (omega_{1/r}^a)^{-1} (limit 3 - a).
std::vector<SweepRow> eigen_stability_sweep(double a, std::span<const double> r_list, double h,
                                            SweepForm form = SweepForm::rho,
                                            const EigenOptions& opt = {});

/// CSV: quotient_id,a,eps_or_r,h,lambda,residual.
void write_eigen_csv(std::ostream& os, std::span<const EigenResult> rows);

struct GrowthRow {
  double r = 0.0;
  double H = 0.0;
  double normalized = 0.0;  ///< H / r^{2(1-a)}
};

/// H(r) = r^{-(n+a)} int_{arc r} y^a u^2 from bilinear interpolation of an odd cell field.
/// Throws std::out_of_range if an arc leaves the grid.
std::vector<GrowthRow> growth_monitor(const DiscreteField& u, double a, std::span<const double> r_list);

/// True if the normalized column never drops by more than rel_tol of its running maximum.
bool growth_nondecreasing(std::span<const GrowthRow> rows, double rel_tol);

enum class IsometryDirection { to_flat, from_flat };

/// v = rho^{1/2} u (to_flat) and its inverse; PotentialKind::omega uses omega^{1/2}.
DiscreteField isometry_transform(const DiscreteField& u, const WeightFamily& fam, IsometryDirection dir,
                                 PotentialKind kind = PotentialKind::rho);

struct EnergyIdentity {
  double weighted_energy = 0.0;  ///< int rho |grad u|^2
  double flat_form = 0.0;        ///< Q_rho(rho^{1/2} u)
  double relative_gap = 0.0;
};

/// Both sides of int rho |grad u|^2 = Q_rho(v) on the polar mesh, eps > 0.
EnergyIdentity isometry_energy_check(const ScalarSampler& u, const WeightFamily& fam, double h);

}  // namespace bhlab
