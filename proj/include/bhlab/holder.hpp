#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bhlab/assembly.hpp"
#include "bhlab/errors.hpp"
#include "bhlab/transform.hpp"

namespace bhlab {

/// Interior box |x_i| <= x_half, y_min <= y <= y_max of cell centers.
struct HolderRegion {
  double x_half = 0.5;
  double y_min = 0.0;
  double y_max = 0.5;
};

/// Throws std::invalid_argument unless the region keeps 2h from the outer boundary.
void check_region(const HalfGrid& g, const HolderRegion& r);

/// Indices of cells whose centers lie in the region; EmptyRegionError if none.
std::vector<std::size_t> region_cells(const HalfGrid& g, const HolderRegion& r);

struct PairSampling {
  double near_radius = 0.25;
  /// Far pairs drawn per call, deterministically.
  std::size_t far_budget = 20000;
  unsigned long long seed = 0x5eed2024ULL;
};

/// max |u(z1) - u(z2)| / |z1 - z2|^alpha over sampled pairs of region cells.
double holder_seminorm(const DiscreteField& u, double alpha, const HolderRegion& region,
                       const PairSampling& pairs = {});

struct C1AlphaResult {
  double sup_grad = 0.0;
  double grad_holder = 0.0;
};

/// Centered-difference gradient (parity ghost in the bottom layer), then the seminorm
/// of each component. EmptyRegionError if the region is too thin for the stencil.
C1AlphaResult c1alpha_seminorm(const DiscreteField& u, double alpha, const HolderRegion& region,
                               const PairSampling& pairs = {});

struct ExponentEstimate {
  double alpha_hat = 0.0;  ///< slope capped at 1
  double raw_slope = 0.0;
  bool smooth = false;     ///< oscillation below 1e-12 at some radius
  std::vector<double> radii, oscillations;
};

/// Slope of log osc vs log r over dyadic annuli r/2 <= |z - c| <= r, r = 2^-2 .. 2^-5.
/// Odd and even fields are extended across Sigma before taking max - min.
ExponentEstimate exponent_estimate(const DiscreteField& u, const XPoint& center);

enum class SweepMode { ratio_c0, ratio_c1, odd_direct_c0 };
const char* to_string(SweepMode m);
SweepMode parse_sweep_mode(const std::string& s);

/// Integrability exponents of the data; infinity for bounded data.
struct DataExponents {
  double p1 = std::numeric_limits<double>::infinity();
  double p2 = std::numeric_limits<double>::infinity();
  double p3 = std::numeric_limits<double>::infinity();
};

/// Largest admissible alpha (clipped to 1) for the given estimate.
/// ratio_c0: min(2 - d/p1, 1 - d/p2, 1 - d/p3) with d = n + 3 + (-a)^+.
/// ratio_c1: min(1 - d/p1, 1 - d/p2).
/// odd_direct_c0: min(1 - a, 2 - d/p1, 1 - d/p2) with d = n + 1 + a^+.
double alpha_window(SweepMode mode, int n, double a, const DataExponents& p);

/// A problem family: -div(rho_eps^a A grad u) = rho_eps^a f + div(rho_eps^a F), u odd,
/// u = outer_trace on the outer boundary.
struct SweepFamily {
  std::string id;
  double a = 0.5;
  OperatorSpec spec;
  ScalarSampler f;
  VecSampler F;
  ScalarSampler outer_trace;  ///< empty means 0
  MuInverseGradient mu_inverse_grad;
  /// f is the ratio datum: the odd problem uses v_eps^a f (chi_eps^a f with ratio_by_chi),
  /// so data norms do not move with eps.
  bool f_scaled_by_v = false;
  /// Divide by chi_eps^a(y) instead of v_eps^a (curved Sigma in Fermi coordinates).
  bool ratio_by_chi = false;
  Shape shape = Shape::half_rectangle;
  double extent = 1.0;

  /// mu = 1 or 1 + 0.1 x^2, f = v_eps^a cos(pi x) (= y|y|^{-a} cos(pi x) when eps = 0, mu = 1), F = 0.
  static SweepFamily standard(double a, bool variable_mu);
};

struct SweepOptions {
  double h = 1.0 / 64;
  double alpha = 0.4;
  HolderRegion region;
  PairSampling pairs;
  double tau = 3.0;
  double slope_tol = 0.1;
  DataExponents exponents;
  SolverOptions solver;
};

struct EpsilonRow {
  double eps = 0.0;
  double seminorm = 0.0;
  double sup_norm = 0.0;
  double sup_grad = std::numeric_limits<double>::quiet_NaN();
  /// sup |f / denominator| and sup |F / denominator| over the grid.
  double f_norm = 0.0;
  double F_norm = 0.0;
  std::string solver_method;
  double solver_residual = 0.0;
};

struct StabilityReport {
  std::string family_id;
  SweepMode mode = SweepMode::ratio_c0;
  double a = 0.0;
  double alpha = 0.0;
  double h = 0.0;
  HolderRegion region;
  std::vector<EpsilonRow> per_eps;
  double uniformity_ratio = 0.0;
  /// Growth of seminorm/median per decade of decreasing eps (eps > 0 rows).
  double trend_slope = 0.0;
  double tau = 3.0;
  double slope_tol = 0.1;
  double alpha_max = 1.0;
  bool alpha_admissible = true;
  /// exponent_estimate of the eps = 0 field (odd_direct_c0 only).
  double exponent_hat = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

/// Raised when a solve fails; carries the rows computed so far.
class SweepAbortedError : public Error {
 public:
  SweepAbortedError(const std::string& what, StabilityReport partial)
      : Error(what), partial_(std::move(partial)) {}
  const StabilityReport& partial() const { return partial_; }

 private:
  StabilityReport partial_;
};

/// Fields produced for one eps (exposed for the Fermi demo and tests).
struct SweepFields {
  DiscreteField solution;  ///< u (odd) or w (even) as solved
  DiscreteField measured;  ///< field whose seminorm is taken
  SolveReport solve;
};

SweepFields sweep_fields(const SweepFamily& fam, double eps, SweepMode mode, const SweepOptions& opt);

std::vector<double> default_eps_list();

StabilityReport epsilon_sweep(const SweepFamily& fam, std::span<const double> eps_list, SweepMode mode,
                              const SweepOptions& opt = {});

/// Ratio and trend from a filled per_eps table; sets pass.
void finalize_report(StabilityReport& r);

void write_sweep_csv(std::ostream& os, const StabilityReport& r);
/// Two columns "eps seminorm" for plotting.
void write_sweep_plot(std::ostream& os, const StabilityReport& r);
/// Human-readable verdict block.
void write_sweep_verdict(std::ostream& os, const StabilityReport& r);

struct FermiDemoOptions {
  double radius = 2.0;
  double a = 0.5;
  double h = 1.0 / 64;
  double alpha = 0.4;
  std::vector<double> eps_list{0.1, 0.03, 0.01, 0.003, 0.001, 0.0};
  HolderRegion region;
  PairSampling pairs;
  double tau = 3.0;
  double slope_tol = 0.1;
  SolverOptions solver;
};

struct FermiDemoReport {
  /// max |fermi_mu - det D(fermi_map)| over sample points, Jacobian by central differences.
  double jacobian_error = 0.0;
  StabilityReport c0;
  /// C^{1,alpha} of the ratio on {y >= sqrt(eps)} and on the full region.
  StabilityReport c1_restricted;
  StabilityReport c1_unrestricted;
};

/// Circle Sigma of the given radius in Fermi coordinates (t, y), y toward the center:
/// mu = 1 - kappa y, B = (1 - kappa y)^{-2}, ratio u / chi_eps^a(y), data f/chi = cos(pi t).
SweepFamily fermi_family(double radius, double a);

FermiDemoReport fermi_demo(const FermiDemoOptions& opt = {});

struct DataNorms {
  double f = 0.0;
  double F = 0.0;
};

/// ||f||_{L^p1(w)} and ||F||_{L^p2(w)} on the grid cells (p = inf gives sup norms).
DataNorms data_norms(const HalfGrid& g, const ScalarSampler& weight, const ScalarSampler& f,
                     const VecSampler& F, double p1, double p2);

/// sup_region |u| / (||u||_{L^beta(w)} + data.f + data.F). Throws std::domain_error on a zero denominator.
double moser_bound_check(const DiscreteField& u, const ScalarSampler& weight, double beta,
                         const DataNorms& data, const HolderRegion& region);

/// True if every ratio is at most spread times the median.
bool moser_spread_ok(std::span<const double> ratios, double spread = 3.0);

}  // namespace bhlab
