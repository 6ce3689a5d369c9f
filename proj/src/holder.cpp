#include "bhlab/holder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "bhlab/geometry.hpp"
#include "bhlab/special_functions.hpp"

namespace bhlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<double, 3> pos3(const HalfGrid& g, std::size_t c) {
  const Vec3 z = g.center(c);
  return {z[0], z[1], z[2]};
}

// Seminorm over a set of cells with one value per cell.
double seminorm_over(const HalfGrid& g, const std::vector<std::size_t>& cells, const std::vector<double>& val,
                     double alpha, const PairSampling& ps) {
  const std::size_t N = cells.size();
  if (N < 2) return 0.0;
  const double h = g.h();
  std::vector<long> local(g.size(), -1);
  for (std::size_t k = 0; k < N; ++k) local[cells[k]] = long(k);

  // Near pairs: every offset inside the near ball, with d^alpha tabulated per offset.
  const int K = int(std::floor(ps.near_radius / h + 1e-9));
  const int KZ = g.n() == 2 ? K : 0;
  const int W = 2 * K + 1;
  std::vector<double> table(std::size_t(W) * std::size_t(2 * KZ + 1) * std::size_t(W), 0.0);
  auto slot = [&](int dx, int dz, int dy) {
    return (std::size_t(dx + K) * std::size_t(2 * KZ + 1) + std::size_t(dz + KZ)) * std::size_t(W) + std::size_t(dy + K);
  };
  for (int dx = -K; dx <= K; ++dx)
    for (int dz = -KZ; dz <= KZ; ++dz)
      for (int dy = -K; dy <= K; ++dy) {
        const double d = h * std::sqrt(double(dx * dx + dz * dz + dy * dy));
        table[slot(dx, dz, dy)] = d <= ps.near_radius + 1e-12 ? std::pow(d, alpha) : 0.0;
      }
  double best = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const auto& ik = g.index(cells[k]);
    for (int dx = -K; dx <= K; ++dx)
      for (int dz = -KZ; dz <= KZ; ++dz)
        for (int dy = -K; dy <= K; ++dy) {
          const double den = table[slot(dx, dz, dy)];
          if (den == 0.0) continue;
          const long c = g.find(ik[0] + dx, ik[1] + dz, ik[2] + dy);
          if (c < 0) continue;
          const long j = local[std::size_t(c)];
          if (j <= long(k)) continue;
          best = std::max(best, std::fabs(val[k] - val[std::size_t(j)]) / den);
        }
  }
  // Far pairs: fixed-seed draws; raw engine output keeps them platform independent.
  std::mt19937_64 rng(ps.seed);
  for (std::size_t s = 0; s < ps.far_budget; ++s) {
    const std::size_t i = std::size_t(rng() % N), j = std::size_t(rng() % N);
    const auto a = pos3(g, cells[i]), b = pos3(g, cells[j]);
    const double d = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
    if (d <= ps.near_radius) continue;
    best = std::max(best, std::fabs(val[i] - val[j]) / std::pow(d, alpha));
  }
  return best;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
}

double ghost_sign(Parity p) { return p == Parity::odd ? -1.0 : 1.0; }

}  // namespace

void check_region(const HalfGrid& g, const HolderRegion& r) {
  const double lim = g.extent() - 2.0 * g.h();
  if (!(r.x_half > 0.0) || !(r.y_max > r.y_min)) throw std::invalid_argument("degenerate region");
  bool ok;
  if (g.shape() == Shape::half_rectangle) {
    ok = r.x_half <= lim + 1e-12 && r.y_max <= lim + 1e-12;
  } else {
    const double corner = g.n() == 2 ? std::sqrt(2.0 * r.x_half * r.x_half + r.y_max * r.y_max)
                                     : std::hypot(r.x_half, r.y_max);
    ok = corner <= lim + 1e-12;
  }
  if (!ok) throw std::invalid_argument("region must keep a margin of 2h from the outer boundary");
}

std::vector<std::size_t> region_cells(const HalfGrid& g, const HolderRegion& r) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const XPoint x = g.x(c);
    const double y = g.y(c);
    if (std::fabs(x[0]) > r.x_half + 1e-12) continue;
    if (g.n() == 2 && std::fabs(x[1]) > r.x_half + 1e-12) continue;
    if (y < r.y_min - 1e-12 || y > r.y_max + 1e-12) continue;
    out.push_back(c);
  }
  if (out.empty()) throw EmptyRegionError("no cell centers in the region");
  return out;
}

double holder_seminorm(const DiscreteField& u, double alpha, const HolderRegion& region, const PairSampling& pairs) {
  require_alpha(alpha);
  const HalfGrid& g = *u.grid;
  check_region(g, region);
  const auto cells = region_cells(g, region);
  std::vector<double> val(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) val[k] = u.values[cells[k]];
  return seminorm_over(g, cells, val, alpha, pairs);
}

C1AlphaResult c1alpha_seminorm(const DiscreteField& u, double alpha, const HolderRegion& region,
                               const PairSampling& pairs) {
  require_alpha(alpha);
  const HalfGrid& g = *u.grid;
  check_region(g, region);
  const double h = g.h();
  const int axes = g.n() + 1;
  std::vector<std::size_t> cells;
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(axes));
  for (std::size_t c : region_cells(g, region)) {
    const auto& ix = g.index(c);
    std::array<double, 3> d{};
    bool ok = true;
    for (int k = 0; k < g.n() && ok; ++k) {
      auto lo = ix, hi = ix;
      lo[std::size_t(k)] -= 1;
      hi[std::size_t(k)] += 1;
      const long a = g.find(lo), b = g.find(hi);
      if (a < 0 || b < 0) ok = false;
      else d[std::size_t(k)] = (u.values[std::size_t(b)] - u.values[std::size_t(a)]) / (2.0 * h);
    }
    if (!ok) continue;
    auto up = ix;
    up[2] += 1;
    const long b = g.find(up);
    if (b < 0) continue;
    const double ub = u.values[std::size_t(b)];
    if (ix[2] == 0) {
      d[2] = u.parity == Parity::none ? (ub - u.values[c]) / h : (ub - ghost_sign(u.parity) * u.values[c]) / (2.0 * h);
    } else {
      auto dn = ix;
      dn[2] -= 1;
      const long a = g.find(dn);
      if (a < 0) continue;
      d[2] = (ub - u.values[std::size_t(a)]) / (2.0 * h);
    }
    cells.push_back(c);
    grad[0].push_back(d[0]);
    if (g.n() == 2) grad[1].push_back(d[1]);
    grad[std::size_t(axes - 1)].push_back(d[2]);
  }
  if (cells.size() < 4) throw EmptyRegionError("region too thin for the gradient stencil");
  C1AlphaResult r;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    double s = 0.0;
    for (const auto& comp : grad) s += comp[k] * comp[k];
    r.sup_grad = std::max(r.sup_grad, std::sqrt(s));
  }
  for (const auto& comp : grad) r.grad_holder = std::max(r.grad_holder, seminorm_over(g, cells, comp, alpha, pairs));
  return r;
}

ExponentEstimate exponent_estimate(const DiscreteField& u, const XPoint& center) {
  const HalfGrid& g = *u.grid;
  ExponentEstimate e;
  const bool mirror = u.parity != Parity::none;
  const double sign = ghost_sign(u.parity);
  for (int k = 2; k <= 5; ++k) {
    const double r = std::ldexp(1.0, -k);
    double hi = -kInf, lo = kInf;
    for (std::size_t c = 0; c < g.size(); ++c) {
      const XPoint x = g.x(c);
      const double dx = x[0] - center[0], dz = g.n() == 2 ? x[1] - center[1] : 0.0;
      const double d = std::sqrt(dx * dx + dz * dz + g.y(c) * g.y(c));
      if (d < 0.5 * r || d > r) continue;
      const double v = u.values[c];
      hi = std::max(hi, v);
      lo = std::min(lo, v);
      if (mirror) {
        hi = std::max(hi, sign * v);
        lo = std::min(lo, sign * v);
      }
    }
    if (hi < lo) throw EmptyRegionError("annulus contains no cell centers; refine the grid");
    e.radii.push_back(r);
    e.oscillations.push_back(hi - lo);
    if (hi - lo < 1e-12) e.smooth = true;
  }
  if (e.smooth) {
    e.alpha_hat = 1.0;
    e.raw_slope = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(e.radii.size());
  for (std::size_t k = 0; k < e.radii.size(); ++k) {
    const double X = std::log(e.radii[k]), Y = std::log(e.oscillations[k]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  e.raw_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  e.alpha_hat = std::min(e.raw_slope, 1.0);
  return e;
}

const char* to_string(SweepMode m) {
  switch (m) {
    case SweepMode::ratio_c0: return "ratio_c0";
    case SweepMode::ratio_c1: return "ratio_c1";
    case SweepMode::odd_direct_c0: return "odd_direct_c0";
  }
  return "?";
}

SweepMode parse_sweep_mode(const std::string& s) {
  if (s == "ratio_c0") return SweepMode::ratio_c0;
  if (s == "ratio_c1") return SweepMode::ratio_c1;
  if (s == "odd_direct_c0") return SweepMode::odd_direct_c0;
  throw ConfigError("unknown sweep mode '" + s + "'");
}

double alpha_window(SweepMode mode, int n, double a, const DataExponents& p) {
  auto term = [](double c, double d, double q) { return std::isinf(q) ? c : c - d / q; };
  double w;
  switch (mode) {
    case SweepMode::ratio_c0: {
      const double d = effective_dimension_auxiliary(n, a);
      w = std::min({term(2.0, d, p.p1), term(1.0, d, p.p2), term(1.0, d, p.p3)});
      break;
    }
    case SweepMode::ratio_c1: {
      const double d = effective_dimension_auxiliary(n, a);
      w = std::min(term(1.0, d, p.p1), term(1.0, d, p.p2));
      break;
    }
    default: {
      const double d = effective_dimension(n, a);
      w = std::min({1.0 - a, term(2.0, d, p.p1), term(1.0, d, p.p2)});
      break;
    }
  }
  return std::min(w, 1.0);
}

SweepFamily SweepFamily::standard(double a, bool variable_mu) {
  SweepFamily f;
  f.a = a;
  f.id = std::string("standard_a=") + std::to_string(a) + (variable_mu ? "_mu=1+0.1x^2" : "_mu=1");
  f.spec = OperatorSpec::identity(1);
  if (variable_mu) {
    f.spec.mu = [](const XPoint& x, double) { return 1.0 + 0.1 * x[0] * x[0]; };
    f.spec.mu_grad_x = [](const XPoint& x, double) { return Vec2{0.2 * x[0], 0.0}; };
    f.mu_inverse_grad = [](const XPoint& x, double) {
      const double m = 1.0 + 0.1 * x[0] * x[0];
      return Vec2{-0.2 * x[0] / (m * m), 0.0};
    };
  }
  f.f = [](const XPoint& x, double) { return std::cos(std::numbers::pi * x[0]); };
  f.f_scaled_by_v = true;
  return f;
}

std::vector<double> default_eps_list() { return {1.0, 0.3, 0.1, 0.03, 0.01, 0.0}; }

SweepFields sweep_fields(const SweepFamily& fam, double eps, SweepMode mode, const SweepOptions& opt) {
  auto grid = std::make_shared<const HalfGrid>(build_half_grid(fam.spec.n, fam.shape, opt.h, fam.extent));
  // rho_eps^0 = 1 for every eps: use one family so a = 0 sweeps are identical bit for bit.
  const WeightFamily wf{fam.a, fam.a == 0.0 ? 0.0 : eps, false};
  CharacteristicSolution sol;
  sol.family = wf;
  if (fam.spec.mu) {
    const auto mu = fam.spec.mu;
    sol.mu_inverse = [mu](const XPoint& x, double y) { return 1.0 / mu(x, y); };
  }
  ScalarSampler f = fam.f;
  if (fam.f_scaled_by_v && f) {
    const auto g = fam.f;
    if (fam.ratio_by_chi) f = [g, wf](const XPoint& x, double y) { return g(x, y) * chi(wf, std::fabs(y)); };
    else f = [g, sol](const XPoint& x, double y) { return g(x, y) * v_char(sol, x, y); };
  }
  SweepFields out;
  const bool odd_solve = mode == SweepMode::odd_direct_c0 || fam.ratio_by_chi;
  if (odd_solve) {
    if (!(fam.a > -1.0 && fam.a < 1.0) && wf.eps == 0.0)
      throw std::invalid_argument("direct odd solves need a in (-1, 1)");
    AssemblyOptions o;
    o.parity = Parity::odd;
    o.dirichlet_trace = fam.outer_trace;
    o.weight_id = "rho";
    ScalarSampler weight = [wf](const XPoint&, double y) { return rho(wf, y); };
    const auto sys = assemble(grid, weight, fam.spec, o);
    out.solve = solve_linear(sys, Eigen::VectorXd(sys.boundary_rhs + source_vector(sys, f, fam.F)), opt.solver);
    out.solution = out.solve.field;
    out.measured = out.solution;
    if (mode != SweepMode::odd_direct_c0) {
      out.measured.parity = Parity::even;
      for (std::size_t c = 0; c < grid->size(); ++c) out.measured.values[c] /= chi(wf, grid->y(c));
    }
    return out;
  }
  const auto bundle = auxiliary_rhs(fam.spec, sol, f, fam.F, fam.mu_inverse_grad);
  ScalarSampler w_trace;
  if (fam.outer_trace) {
    const auto tr = fam.outer_trace;
    w_trace = [tr, sol](const XPoint& x, double y) { return tr(x, y) / v_char(sol, x, y); };
  }
  const auto sys = assemble_auxiliary(grid, fam.spec, bundle, w_trace);
  out.solve = solve_linear(sys, auxiliary_rhs_vector(sys, bundle), opt.solver);
  out.solution = out.solve.field;
  out.measured = out.solution;
  return out;
}

void finalize_report(StabilityReport& r) {
  std::vector<double> s;
  for (const auto& row : r.per_eps) s.push_back(row.seminorm);
  if (s.empty()) return;
  const double mx = *std::max_element(s.begin(), s.end()), mn = *std::min_element(s.begin(), s.end());
  r.uniformity_ratio = mx == 0.0 ? 1.0 : (mn == 0.0 ? kInf : mx / mn);
  std::vector<double> sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& row : r.per_eps) {
    if (!(row.eps > 0.0)) continue;
    const double X = std::log10(row.eps), Y = median > 0.0 ? row.seminorm / median : 0.0;
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    n += 1;
  }
  const double den = n * sxx - sx * sx;
  r.trend_slope = n >= 2 && den > 0.0 ? -(n * sxy - sx * sy) / den : 0.0;
  if (r.trend_slope == 0.0) r.trend_slope = 0.0;  // no "-0" in reports
  r.pass = r.uniformity_ratio <= r.tau && r.trend_slope <= r.slope_tol;
}

StabilityReport epsilon_sweep(const SweepFamily& fam, std::span<const double> eps_list, SweepMode mode,
                              const SweepOptions& opt) {
  require_alpha(opt.alpha);
  if (std::find(eps_list.begin(), eps_list.end(), 0.0) == eps_list.end())
    throw std::invalid_argument("eps list must include 0");
  double lo = kInf, hi = 0.0;
  for (double e : eps_list) {
    if (e < 0.0) throw std::invalid_argument("eps must be nonnegative");
    if (e > 0.0) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
  }
  if (!(hi / lo >= 100.0 - 1e-9)) throw std::invalid_argument("eps list must span at least two decades");
  if (mode == SweepMode::odd_direct_c0 && !(fam.a > -1.0 && fam.a < 1.0))
    throw std::invalid_argument("odd_direct_c0 needs a in (-1, 1)");
  if (fam.ratio_by_chi && !(fam.a > -1.0 && fam.a < 1.0))
    throw std::invalid_argument("chi ratios are solved through the odd problem: a in (-1, 1)");

  StabilityReport rep;
  rep.family_id = fam.id;
  rep.mode = mode;
  rep.a = fam.a;
  rep.alpha = opt.alpha;
  rep.h = opt.h;
  rep.region = opt.region;
  rep.tau = opt.tau;
  rep.slope_tol = opt.slope_tol;
  rep.alpha_max = alpha_window(mode, fam.spec.n, fam.a, opt.exponents);
  rep.alpha_admissible = opt.alpha <= rep.alpha_max && opt.alpha < 1.0;

  for (double eps : eps_list) {
    SweepFields sf;
    try {
      sf = sweep_fields(fam, eps, mode, opt);
    } catch (const Error& err) {
      finalize_report(rep);
      rep.pass = false;
      throw SweepAbortedError(std::string("solve failed at eps=") + std::to_string(eps) + ": " + err.what(), rep);
    }
    const HalfGrid& g = *sf.measured.grid;
    check_region(g, opt.region);
    EpsilonRow row;
    row.eps = eps;
    row.solver_method = sf.solve.method;
    row.solver_residual = sf.solve.relative_residual;
    if (mode == SweepMode::ratio_c1) {
      const auto c1 = c1alpha_seminorm(sf.measured, opt.alpha, opt.region, opt.pairs);
      row.seminorm = c1.grad_holder;
      row.sup_grad = c1.sup_grad;
    } else {
      row.seminorm = holder_seminorm(sf.measured, opt.alpha, opt.region, opt.pairs);
    }
    for (std::size_t c : region_cells(g, opt.region)) row.sup_norm = std::max(row.sup_norm, std::fabs(sf.measured.values[c]));
    // Data seen by the measured equation: divided by the ratio denominator.
    const WeightFamily wf{fam.a, fam.a == 0.0 ? 0.0 : eps, false};
    CharacteristicSolution sol;
    sol.family = wf;
    if (fam.spec.mu) {
      const auto mu = fam.spec.mu;
      sol.mu_inverse = [mu](const XPoint& x, double y) { return 1.0 / mu(x, y); };
    }
    for (std::size_t c = 0; c < g.size(); ++c) {
      const XPoint x = g.x(c);
      const double y = g.y(c);
      double den = 1.0;
      if (mode != SweepMode::odd_direct_c0) den = fam.ratio_by_chi ? chi(wf, y) : v_char(sol, x, y);
      if (fam.f) {
        const double fv = !fam.f_scaled_by_v ? fam.f(x, y)
                          : fam.f(x, y) * (fam.ratio_by_chi ? chi(wf, y) : v_char(sol, x, y));
        row.f_norm = std::max(row.f_norm, std::fabs(fv / den));
      }
      if (fam.F) {
        const Vec3 F = fam.F(x, y);
        row.F_norm = std::max(row.F_norm, std::sqrt(F[0] * F[0] + F[1] * F[1] + F[2] * F[2]) / std::fabs(den));
      }
    }
    rep.per_eps.push_back(row);
    if (mode == SweepMode::odd_direct_c0 && eps == 0.0) {
      rep.exponent_hat = exponent_estimate(sf.measured, XPoint{0.0, 0.0}).alpha_hat;
    }
  }
  finalize_report(rep);
  return rep;
}

void write_sweep_csv(std::ostream& os, const StabilityReport& r) {
  const auto old = os.precision(12);
  os << "eps,seminorm,sup_norm,sup_grad,f_norm,F_norm,solver_method,solver_residual\n";
  for (const auto& row : r.per_eps) {
    os << row.eps << ',' << row.seminorm << ',' << row.sup_norm << ',';
    if (std::isnan(row.sup_grad)) os << "nan";
    else os << row.sup_grad;
    os << ',' << row.f_norm << ',' << row.F_norm << ',' << row.solver_method << ',' << row.solver_residual << '\n';
  }
  os.precision(old);
}

void write_sweep_plot(std::ostream& os, const StabilityReport& r) {
  const auto old = os.precision(12);
  os << "# eps seminorm\n";
  for (const auto& row : r.per_eps) os << row.eps << ' ' << row.seminorm << '\n';
  os.precision(old);
}

void write_sweep_verdict(std::ostream& os, const StabilityReport& r) {
  const auto old = os.precision(12);
  os << "# family=" << r.family_id << " mode=" << to_string(r.mode) << " a=" << r.a << " alpha=" << r.alpha
     << " h=" << r.h << '\n';
  os << "# region=|x|<=" << r.region.x_half << " " << r.region.y_min << "<=y<=" << r.region.y_max << '\n';
  os << "# uniformity_ratio=" << r.uniformity_ratio << " (tau=" << r.tau << ")\n";
  os << "# trend_slope=" << r.trend_slope << " (tol=" << r.slope_tol << ")\n";
  os << "# alpha_max=" << r.alpha_max << " alpha_admissible=" << (r.alpha_admissible ? "yes" : "no") << '\n';
  if (!std::isnan(r.exponent_hat)) os << "# exponent_hat=" << r.exponent_hat << '\n';
  os << "# verdict=" << (r.pass ? "pass" : "fail") << '\n';
  os.precision(old);
}

DataNorms data_norms(const HalfGrid& g, const ScalarSampler& weight, const ScalarSampler& f, const VecSampler& F,
                     double p1, double p2) {
  const double vol = std::pow(g.h(), g.n() + 1);
  double sf = 0.0, sF = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const XPoint x = g.x(c);
    const double y = g.y(c);
    const double w = weight ? weight(x, y) : 1.0;
    const double fv = f ? std::fabs(f(x, y)) : 0.0;
    double Fv = 0.0;
    if (F) {
      const Vec3 v = F(x, y);
      Fv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    if (std::isinf(p1)) sf = std::max(sf, fv);
    else sf += vol * w * std::pow(fv, p1);
    if (std::isinf(p2)) sF = std::max(sF, Fv);
    else sF += vol * w * std::pow(Fv, p2);
  }
  return {std::isinf(p1) ? sf : std::pow(sf, 1.0 / p1), std::isinf(p2) ? sF : std::pow(sF, 1.0 / p2)};
}

double moser_bound_check(const DiscreteField& u, const ScalarSampler& weight, double beta, const DataNorms& data,
                         const HolderRegion& region) {
  if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  const HalfGrid& g = *u.grid;
  check_region(g, region);
  double sup = 0.0;
  for (std::size_t c : region_cells(g, region)) sup = std::max(sup, std::fabs(u.values[c]));
  const double vol = std::pow(g.h(), g.n() + 1);
  double s = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double w = weight ? weight(g.x(c), g.y(c)) : 1.0;
    s += vol * w * std::pow(std::fabs(u.values[c]), beta);
  }
  const double den = std::pow(s, 1.0 / beta) + data.f + data.F;
  if (!(den > 0.0)) throw std::domain_error("Moser ratio has a zero denominator");
  return sup / den;
}

bool moser_spread_ok(std::span<const double> ratios, double spread) {
  if (ratios.empty()) return true;
  std::vector<double> s(ratios.begin(), ratios.end());
  std::sort(s.begin(), s.end());
  const std::size_t m = s.size();
  const double median = m % 2 ? s[m / 2] : 0.5 * (s[m / 2 - 1] + s[m / 2]);
  return s.back() <= spread * median;
}

SweepFamily fermi_family(double radius, double a) {
  const auto curve = EmbeddedCurve::circle(Vec2{0.0, 0.0}, radius, true);
  SweepFamily f;
  f.id = "fermi_circle_R=" + std::to_string(radius);
  f.a = a;
  f.extent = 1.0;
  check_tubular_radius(curve, f.extent);
  // Odd problem on y > 0: coefficients are read at |y| so the ghost layer sees the same values.
  f.spec.mu = [curve](const XPoint& x, double y) { return fermi_mu(curve, x[0], std::fabs(y)); };
  f.spec.mu_grad_x = [](const XPoint&, double) { return Vec2{0.0, 0.0}; };
  f.spec.B_tilde = [curve](const XPoint& x, double y) {
    const double s = 1.0 - curve.curvature(x[0]) * std::fabs(y);
    Eigen::Matrix2d B = Eigen::Matrix2d::Identity();
    B(0, 0) = 1.0 / (s * s);
    return B;
  };
  f.f = [](const XPoint& x, double) { return std::cos(std::numbers::pi * x[0]); };
  f.f_scaled_by_v = true;
  f.ratio_by_chi = true;
  return f;
}

namespace {

double fermi_jacobian_error(const EmbeddedCurve& c, double y_max) {
  const double step = 1e-5;
  double err = 0.0;
  for (int i = 0; i < 24; ++i) {
    const double t = c.t_min + (c.t_max - c.t_min) * i / 24.0;
    for (int j = 0; j <= 10; ++j) {
      const double y = y_max * j / 10.0;
      const Vec2 tp = c.fermi_map(t + step, y), tm = c.fermi_map(t - step, y);
      const Vec2 yp = c.fermi_map(t, y + step), ym = c.fermi_map(t, y - step);
      const double J00 = (tp[0] - tm[0]) / (2 * step), J10 = (tp[1] - tm[1]) / (2 * step);
      const double J01 = (yp[0] - ym[0]) / (2 * step), J11 = (yp[1] - ym[1]) / (2 * step);
      err = std::max(err, std::fabs(std::fabs(J00 * J11 - J01 * J10) - fermi_mu(c, t, y)));
    }
  }
  return err;
}

}  // namespace

FermiDemoReport fermi_demo(const FermiDemoOptions& opt) {
  FermiDemoReport rep;
  const auto curve = EmbeddedCurve::circle(Vec2{0.0, 0.0}, opt.radius, true);
  const auto fam = fermi_family(opt.radius, opt.a);
  rep.jacobian_error = fermi_jacobian_error(curve, fam.extent);

  SweepOptions so;
  so.h = opt.h;
  so.alpha = opt.alpha;
  so.region = opt.region;
  so.pairs = opt.pairs;
  so.tau = opt.tau;
  so.slope_tol = opt.slope_tol;
  so.solver = opt.solver;
  rep.c0 = epsilon_sweep(fam, opt.eps_list, SweepMode::ratio_c0, so);

  for (StabilityReport* r : {&rep.c1_restricted, &rep.c1_unrestricted}) {
    r->family_id = fam.id + (r == &rep.c1_restricted ? "_restricted" : "_unrestricted");
    r->mode = SweepMode::ratio_c1;
    r->a = opt.a;
    r->alpha = opt.alpha;
    r->h = opt.h;
    r->region = opt.region;
    r->tau = opt.tau;
    r->slope_tol = opt.slope_tol;
    r->alpha_max = alpha_window(SweepMode::ratio_c1, 1, opt.a, {});
    r->alpha_admissible = opt.alpha <= r->alpha_max && opt.alpha < 1.0;
  }
  for (std::size_t k = 0; k < opt.eps_list.size(); ++k) {
    const double eps = opt.eps_list[k];
    const auto sf = sweep_fields(fam, eps, SweepMode::ratio_c1, so);
    HolderRegion restricted = opt.region;
    restricted.y_min = std::max(restricted.y_min, std::sqrt(eps));
    for (StabilityReport* r : {&rep.c1_restricted, &rep.c1_unrestricted}) {
      const HolderRegion& reg = r == &rep.c1_restricted ? restricted : opt.region;
      const auto c1 = c1alpha_seminorm(sf.measured, opt.alpha, reg, opt.pairs);
      EpsilonRow row = rep.c0.per_eps[k];
      row.seminorm = c1.grad_holder;
      row.sup_grad = c1.sup_grad;
      row.sup_norm = 0.0;
      for (std::size_t c : region_cells(*sf.measured.grid, reg))
        row.sup_norm = std::max(row.sup_norm, std::fabs(sf.measured.values[c]));
      r->per_eps.push_back(row);
    }
  }
  finalize_report(rep.c1_restricted);
  finalize_report(rep.c1_unrestricted);
  return rep;
}

}  // namespace bhlab
