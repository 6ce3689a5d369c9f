#include "bhlab/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include "bhlab/errors.hpp"

namespace bhlab {

Eigen::Matrix2d OperatorSpec::B_at(const XPoint& x, double y) const {
  if (B_tilde) return B_tilde(x, y);
  return Eigen::Matrix2d::Identity();
}

Vec2 OperatorSpec::T_at(const XPoint& x, double y) const {
  if (T) return T(x, y);
  return {0.0, 0.0};
}

Vec2 OperatorSpec::mu_grad_at(const XPoint& x, double y) const {
  if (mu_grad_x) return mu_grad_x(x, y);
  if (!mu) return {0.0, 0.0};
  const double d = 1e-6;
  Vec2 g{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    XPoint p = x, m = x;
    p[k] += d;
    m[k] -= d;
    g[k] = (mu(p, y) - mu(m, y)) / (2.0 * d);
  }
  return g;
}

Eigen::Matrix3d OperatorSpec::A(const XPoint& x, double y) const {
  const double m = mu_at(x, y);
  const Eigen::Matrix2d B = B_at(x, y);
  const Vec2 t = T_at(x, y);
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = m * B(i, j);
    A(i, 2) = A(2, i) = m * t[i];
  }
  A(2, 2) = m;
  return A;
}

OperatorSpec OperatorSpec::identity(int n) {
  OperatorSpec s;
  s.n = n;
  return s;
}

EllipticityReport check_operator_spec(const OperatorSpec& spec, int samples, int directions) {
  EllipticityReport r;
  r.lambda_min = std::numeric_limits<double>::infinity();
  r.lambda_max = 0.0;
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(0.0, 1.0);
  std::normal_distribution<double> nd;
  const int d = spec.n + 1;
  auto idx = [&](int i) { return i < spec.n ? i : 2; };
  for (int s = 0; s < samples; ++s) {
    XPoint x{ux(gen), spec.n == 2 ? ux(gen) : 0.0};
    const double y = 1.0 - uy(gen);  // (0, 1]
    const Eigen::Matrix3d A = spec.A(x, y);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (std::fabs(A(idx(i), idx(j)) - A(idx(j), idx(i))) > 1e-14 * (1 + std::fabs(A(idx(i), idx(j)))))
          r.symmetric = false;
    for (int k = 0; k < directions; ++k) {
      Eigen::Vector3d xi = Eigen::Vector3d::Zero();
      for (int i = 0; i < d; ++i) xi(idx(i)) = nd(gen);
      xi.normalize();
      const double q = xi.dot(A * xi);
      r.lambda_min = std::min(r.lambda_min, q);
      r.lambda_max = std::max(r.lambda_max, q);
    }
    // Parity of the samplers under y -> -y.
    const Eigen::Matrix3d Am = spec.A(x, -y);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double sign = ((i == 2) != (j == 2)) ? -1.0 : 1.0;
        if (std::fabs(Am(i, j) - sign * A(i, j)) > 1e-12 * (1 + std::fabs(A(i, j)))) r.j_symmetric = false;
      }
    const Vec2 t0 = spec.T_at(x, 0.0);
    r.sigma_defect = std::max({r.sigma_defect, std::fabs(t0[0]), std::fabs(t0[1])});
  }
  if (!(r.lambda_min > 0.0)) throw EllipticityError("operator is not uniformly elliptic");
  return r;
}

double DiscreteField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

DiscreteField sample_field(std::shared_ptr<const HalfGrid> grid, const ScalarSampler& f,
                           Parity parity) {
  DiscreteField d;
  d.values.resize(grid->size());
  for (std::size_t c = 0; c < grid->size(); ++c) d.values[c] = f(grid->x(c), grid->y(c));
  d.grid = std::move(grid);
  d.parity = parity;
  return d;
}

void write_field_csv(std::ostream& os, const DiscreteField& f,
                     const std::vector<std::string>& header) {
  for (const auto& h : header) os << "# " << h << '\n';
  const auto& g = *f.grid;
  os << (g.n() == 2 ? "x,x2,y,value\n" : "x,y,value\n");
  char buf[128];
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Vec3 z = g.center(c);
    if (g.n() == 2)
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", z[0], z[1], z[2], f.values[c]);
    else
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", z[0], z[2], f.values[c]);
    os << buf;
  }
}

namespace {

/// Linear form sum coef_i u_{col_i} + constant: the value of u at a cell or ghost.
struct LinearForm {
  long col[2] = {-1, -1};
  double coef[2] = {0.0, 0.0};
  double constant = 0.0;
};

class Stencil {
 public:
  Stencil(const HalfGrid& g, const AssemblyOptions& o) : g_(g), o_(o) {}

  bool is_ghost(std::size_t P, int axis, int side) const {
    auto idx = g_.index(P);
    idx[axis] += side;
    return g_.find(idx) < 0;
  }

  bool sigma_face(std::size_t P, int axis, int side) const {
    return axis == kAxisY && side < 0 && g_.index(P)[2] == 0;
  }

  Vec3 face_mid(std::size_t P, int axis, int side) const {
    Vec3 z = g_.center(P);
    z[axis] += 0.5 * side * g_.h();
    if (sigma_face(P, axis, side)) z[2] = 0.0;
    return z;
  }

  double trace(const Vec3& z) const {
    return o_.dirichlet_trace ? o_.dirichlet_trace({z[0], z[1]}, z[2]) : 0.0;
  }

  /// Value of u in the cell adjacent to P across (axis, side).
  LinearForm neighbor(std::size_t P, int axis, int side) const {
    LinearForm L;
    auto idx = g_.index(P);
    idx[axis] += side;
    const long Q = g_.find(idx);
    if (Q >= 0) {
      L.col[0] = Q;
      L.coef[0] = 1.0;
      return L;
    }
    L.col[0] = long(P);
    const bool sigma = sigma_face(P, axis, side);
    if (sigma && o_.parity == Parity::odd) {
      L.coef[0] = -1.0;
    } else if (sigma && o_.parity == Parity::even) {
      L.coef[0] = 1.0;
    } else if (!sigma && o_.outer == OuterBoundary::neumann) {
      L.coef[0] = 1.0;
    } else {
      // Dirichlet: linear extrapolation through the face.
      L.coef[0] = -1.0;
      L.constant = 2.0 * trace(face_mid(P, axis, side));
    }
    return L;
  }

  /// Centered derivative of u along axis at cell P, as a linear form (3 terms max).
  void derivative(std::size_t P, int axis, double scale, std::map<long, double>& row,
                  double& constant) const {
    const double h = g_.h();
    LinearForm p = neighbor(P, axis, +1), m = neighbor(P, axis, -1);
    add(row, constant, p, scale / (2.0 * h));
    add(row, constant, m, -scale / (2.0 * h));
  }

  static void add(std::map<long, double>& row, double& constant, const LinearForm& L, double s) {
    for (int i = 0; i < 2; ++i)
      if (L.col[i] >= 0 && L.coef[i] * s != 0.0) row[L.col[i]] += L.coef[i] * s;
    constant += L.constant * s;
  }

  /// Natural (zero total flux) face: even Sigma or Neumann outer.
  bool natural_face(std::size_t P, int axis, int side) const {
    if (!is_ghost(P, axis, side)) return false;
    if (sigma_face(P, axis, side)) return o_.parity == Parity::even;
    return o_.outer == OuterBoundary::neumann;
  }

 private:
  const HalfGrid& g_;
  const AssemblyOptions& o_;
};

std::vector<int> active_axes(int n) { return n == 2 ? std::vector<int>{0, 1, 2} : std::vector<int>{0, 2}; }

double checked(double w, const char* where) {
  if (!std::isfinite(w) || !(w > 0.0))
    throw NonFiniteWeightError(std::string("weight not finite and positive at ") + where);
  return w;
}

// Weights enter through y-averages over the cell and its faces: arithmetic across faces
// normal to x, harmonic along the segment joining centers in y. For smooth weights this is
// the two-point harmonic mean up to O(h^2); near Sigma it gives y^{1-a} its exact flux.

std::size_t face_slot(std::size_t P, int axis, int side) { return P * 6 + std::size_t(axis) * 2 + (side > 0); }

class WeightAverager {
 public:
  explicit WeightAverager(const ScalarSampler& w) : w_(w) {}

  double mean(const XPoint& x, double y0, double y1) const {
    return integral([&](double y) { return w_(x, y); }, y0, y1, w_(x, 0.5 * (y0 + y1))) / (y1 - y0);
  }

  /// (y1 - y0) / int 1/w.
  double harmonic(const XPoint& x, double y0, double y1) const {
    const double mid = 1.0 / w_(x, 0.5 * (y0 + y1));
    return (y1 - y0) / integral([&](double y) { return 1.0 / w_(x, y); }, y0, y1, mid);
  }

 private:
  template <class G>
  static double integral(const G& g, double y0, double y1, double fallback_value) {
    double r;
    if (y0 > 0.0) {
      r = boost::math::quadrature::gauss<double, 10>::integrate(g, y0, y1);
    } else {
      thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
      try {
        r = ts.integrate([&](double y) { return g(y); }, y0, y1, 1e-9);
      } catch (const std::exception&) {
        r = std::numeric_limits<double>::quiet_NaN();
      }
    }
    // Non-integrable weights (a <= -1 at Sigma) keep the midpoint value.
    return std::isfinite(r) && r > 0.0 ? r : fallback_value * (y1 - y0);
  }

  const ScalarSampler& w_;
};

}  // namespace

LinearSystem assemble(std::shared_ptr<const HalfGrid> grid, const ScalarSampler& weight,
                      const OperatorSpec& spec, const AssemblyOptions& options) {
  const HalfGrid& g = *grid;
  if (spec.n != g.n()) throw std::invalid_argument("assemble: spec and grid dimensions differ");
  LinearSystem sys;
  sys.grid = grid;
  sys.options = options;
  const std::size_t N = g.size();
  const double h = g.h();
  const WeightAverager avg(weight);
  sys.cell_weight.resize(N);
  for (std::size_t c = 0; c < N; ++c) {
    const double y = g.y(c);
    sys.cell_weight[c] = checked(avg.mean(g.x(c), y - 0.5 * h, y + 0.5 * h), "cell");
  }
  sys.boundary_rhs = Eigen::VectorXd::Zero(long(N));
  Stencil st(g, sys.options);
  const auto axes = active_axes(g.n());

  // Face weights; NaN on natural faces, which carry no flux.
  sys.face_weight.assign(N * 6, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t P = 0; P < N; ++P) {
    const double yP = g.y(P);
    for (int k : axes)
      for (int s : {-1, 1}) {
        if (st.natural_face(P, k, s)) continue;
        const Vec3 zf = st.face_mid(P, k, s);
        double wf;
        if (k != kAxisY) {
          wf = avg.mean({zf[0], zf[1]}, yP - 0.5 * h, yP + 0.5 * h);
        } else if (st.sigma_face(P, k, s)) {
          wf = avg.harmonic(g.x(P), 0.0, yP);
        } else if (st.is_ghost(P, k, s)) {
          wf = avg.harmonic(g.x(P), yP, yP + 0.5 * h);
        } else {
          wf = avg.harmonic(g.x(P), std::min(yP, yP + s * h), std::max(yP, yP + s * h));
        }
        sys.face_weight[face_slot(P, k, s)] = checked(wf, "face");
      }
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(N * 9);
  for (std::size_t P = 0; P < N; ++P) {
    std::map<long, double> row;
    double constant = 0.0;
    const double wP = sys.cell_weight[P];
    for (int k : axes) {
      for (int s : {-1, 1}) {
        if (st.natural_face(P, k, s)) continue;
        const Vec3 zf = st.face_mid(P, k, s);
        const double wf = sys.face_weight[face_slot(P, k, s)];
        const double Akk = spec.A({zf[0], zf[1]}, zf[2])(k, k);
        if (!(Akk > 0.0)) throw EllipticityError("non-positive diagonal coefficient at a face");
        // -(1/h) * outward flux; normal part (u_N - u_P)/h
        const double c = -wf * Akk / (h * h);
        Stencil::add(row, constant, st.neighbor(P, k, s), c);
        row[long(P)] -= c;
      }
    }
    const XPoint xP = g.x(P);
    const double yP = g.y(P);
    if (options.drift) {
      const Vec3 b = options.drift(xP, yP);
      for (int k : axes)
        if (b[k] != 0.0) st.derivative(P, k, -wP * b[k], row, constant);
    }
    if (options.conservative_drift) {
      for (int k : axes) {
        if (k == kAxisY) continue;
        for (int s : {-1, 1}) {
          const Vec3 zf = st.face_mid(P, k, s);
          const double beta = options.conservative_drift({zf[0], zf[1]}, zf[2])[k];
          if (beta == 0.0) continue;
          double wf = sys.face_weight[face_slot(P, k, s)];
          if (std::isnan(wf)) wf = checked(weight({zf[0], zf[1]}, zf[2]), "outer face");
          // -(1/h) * s * W beta (u_P + u_N)/2
          const double c = -s * wf * beta / (2.0 * h);
          row[long(P)] += c;
          Stencil::add(row, constant, st.neighbor(P, k, s), c);
        }
      }
    }
    if (options.reaction) {
      const double c = options.reaction(xP, yP);
      if (c != 0.0) row[long(P)] += wP * c;
    }
    for (const auto& [col, v] : row)
      if (v != 0.0) trip.emplace_back(long(P), col, v);
    sys.boundary_rhs(long(P)) = -constant;
  }

  // Off-diagonal entries of A: energy form on cell corners, symmetric by construction.
  // Ghost cells enter through their linear forms; a corner with a single active cell is dropped.
  // With Dirichlet ghosts the boundary-parallel difference is data, so these corners only feed
  // the right-hand side and keep the flux through boundary faces.
  for (std::size_t ia = 0; ia < axes.size(); ++ia)
    for (std::size_t ib = ia + 1; ib < axes.size(); ++ib) {
      const int j = axes[ia], k = axes[ib];
      for (std::size_t P = 0; P < N; ++P)
        for (int corner = 0; corner < 4; ++corner) {
          auto base = g.index(P);
          base[j] -= corner & 1;
          base[k] -= corner >> 1;
          long cell[4];
          int first = -1;
          for (int q = 0; q < 4; ++q) {
            auto idx = base;
            idx[j] += q & 1;
            idx[k] += q >> 1;
            cell[q] = g.find(idx);
            if (first < 0 && cell[q] >= 0) first = q;
          }
          if (cell[first] != long(P)) continue;  // each corner is visited once
          LinearForm u[4];
          bool ok = true;
          double wc = 0.0;
          int active = 0;
          for (int q = 0; q < 4 && ok; ++q) {
            if (cell[q] >= 0) {
              u[q].col[0] = cell[q];
              u[q].coef[0] = 1.0;
              wc += sys.cell_weight[std::size_t(cell[q])];
              ++active;
            } else if (cell[q ^ 1] >= 0) {
              u[q] = st.neighbor(std::size_t(cell[q ^ 1]), j, (q & 1) ? 1 : -1);
            } else if (cell[q ^ 2] >= 0) {
              u[q] = st.neighbor(std::size_t(cell[q ^ 2]), k, (q & 2) ? 1 : -1);
            } else {
              ok = false;
            }
          }
          if (!ok) continue;
          Vec3 z = g.center(std::size_t(cell[first]));
          z[j] += (0.5 - (first & 1)) * h;
          z[k] += (0.5 - (first >> 1)) * h;
          const double Ajk = spec.A({z[0], z[1]}, z[2])(j, k);
          if (Ajk == 0.0) continue;
          wc /= active;
          // Dj, Dk as linear forms: coefficients per column plus a constant.
          std::map<long, double> aj, ak;
          double bj = 0.0, bk = 0.0;
          const double dj[4] = {-1, 1, -1, 1}, dk[4] = {-1, -1, 1, 1};
          for (int q = 0; q < 4; ++q) {
            Stencil::add(aj, bj, u[q], dj[q] / (2.0 * h));
            Stencil::add(ak, bk, u[q], dk[q] / (2.0 * h));
          }
          // Only the part of the corner's dual cell inside the domain carries energy.
          const double s = wc * Ajk * active / 4.0;
          for (const auto& [m, am] : aj) {
            for (const auto& [l, al] : ak) {
              trip.emplace_back(m, l, s * am * al);
              trip.emplace_back(l, m, s * am * al);
            }
            sys.boundary_rhs(m) -= s * am * bk;
          }
          for (const auto& [m, am] : ak) sys.boundary_rhs(m) -= s * am * bj;
        }
    }
  sys.K.resize(long(N), long(N));
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.K.prune(0.0);
  return sys;
}

Eigen::VectorXd source_vector(const LinearSystem& sys, const ScalarSampler& f, const VecSampler& F) {
  const HalfGrid& g = *sys.grid;
  const std::size_t N = g.size();
  Eigen::VectorXd src = Eigen::VectorXd::Zero(long(N));
  Stencil st(g, sys.options);
  const auto axes = active_axes(g.n());
  for (std::size_t P = 0; P < N; ++P) {
    double v = f ? sys.cell_weight[P] * f(g.x(P), g.y(P)) : 0.0;
    if (F) {
      for (int k : axes)
        for (int s : {-1, 1}) {
          if (st.natural_face(P, k, s)) continue;
          const Vec3 zf = st.face_mid(P, k, s);
          v += s * sys.face_weight[face_slot(P, k, s)] * F({zf[0], zf[1]}, zf[2])[k] / g.h();
        }
    }
    src(long(P)) = v;
  }
  return src;
}

bool is_symmetric(const SparseMatrix& K, double rel_tol) {
  SparseMatrix Kt = K.transpose();
  const double n = K.norm();
  return (K - Kt).norm() <= rel_tol * std::max(n, 1e-300);
}

LinearSolveResult solve_linear(const SparseMatrix& K, const Eigen::VectorXd& rhs,
                               const SolverOptions& opt) {
  if (K.rows() != K.cols() || K.rows() != rhs.size())
    throw std::invalid_argument("solve_linear: dimension mismatch");
  if (!rhs.allFinite()) throw std::invalid_argument("solve_linear: non-finite rhs");
  LinearSolveResult r;
  const double bn = rhs.norm();
  if (bn == 0.0) {
    r.x = Eigen::VectorXd::Zero(rhs.size());
    r.method = "trivial";
    return r;
  }
  auto resid = [&](const Eigen::VectorXd& x) { return (rhs - K * x).norm() / bn; };
  // Eigen's column-major copy is used by the iterative solvers.
  const Eigen::SparseMatrix<double> Kc = K;
  double best = std::numeric_limits<double>::infinity();
  if (is_symmetric(K)) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opt.tol * 0.5);
    cg.setMaxIterations(opt.max_iterations);
    cg.compute(Kc);
    r.x = cg.solve(rhs);
    r.iterations = int(cg.iterations());
    r.method = "cg+jacobi";
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> bi;
    bi.setTolerance(opt.tol * 0.5);
    bi.setMaxIterations(opt.max_iterations);
    bi.compute(Kc);
    r.x = bi.solve(rhs);
    r.iterations = int(bi.iterations());
    r.method = "bicgstab+jacobi";
  }
  r.relative_residual = r.x.allFinite() ? resid(r.x) : std::numeric_limits<double>::infinity();
  best = r.relative_residual;
  if (r.relative_residual <= opt.tol) return r;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(Kc);
  if (lu.info() == Eigen::Success) {
    Eigen::VectorXd x = lu.solve(rhs);
    const double res = x.allFinite() ? resid(x) : std::numeric_limits<double>::infinity();
    if (res < best) {
      best = res;
      r.x = x;
      r.relative_residual = res;
      r.method += "->sparse_lu";
    }
  }
  if (r.relative_residual > opt.tol)
    throw SolverError("solve_linear: tolerance not reached", best);
  return r;
}

SolveReport solve_linear(const LinearSystem& sys, const Eigen::VectorXd& rhs,
                         const SolverOptions& opt) {
  auto r = solve_linear(sys.K, rhs, opt);
  SolveReport rep;
  rep.field.grid = sys.grid;
  rep.field.parity = sys.options.parity;
  rep.field.values.assign(r.x.data(), r.x.data() + r.x.size());
  rep.relative_residual = r.relative_residual;
  rep.iterations = r.iterations;
  rep.method = r.method;
  rep.assembly_weight_id = sys.options.weight_id;
  rep.tolerance = opt.tol;
  rep.iteration_cap = opt.max_iterations;
  return rep;
}

ManufacturedProblem manufactured_problem(std::shared_ptr<const HalfGrid> grid,
                                         const ScalarSampler& u_exact,
                                         const ScalarSampler& weight, const OperatorSpec& spec,
                                         AssemblyOptions options, ManufacturedMode mode,
                                         const ScalarSampler& f, const VecSampler& F) {
  const HalfGrid& g = *grid;
  if (options.parity != Parity::none) {
    const double sign = options.parity == Parity::odd ? -1.0 : 1.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double up = u_exact(g.x(c), g.y(c)), um = u_exact(g.x(c), -g.y(c));
      if (std::fabs(um - sign * up) > 1e-10 * (1.0 + std::fabs(up)))
        throw ParityError("manufactured solution does not have the requested parity");
    }
  }
  if (!options.dirichlet_trace) options.dirichlet_trace = u_exact;
  ManufacturedProblem p;
  p.system = assemble(grid, weight, spec, options);
  p.exact = sample_field(grid, u_exact, options.parity);
  const Eigen::Map<const Eigen::VectorXd> ue(p.exact.values.data(), long(g.size()));
  if (mode == ManufacturedMode::discrete) {
    p.rhs = p.system.K * ue;
  } else {
    p.rhs = p.system.boundary_rhs + source_vector(p.system, f, F);
  }
  return p;
}

std::vector<ConvergenceRow> convergence_study(const ConvergenceProblem& p,
                                              std::span<const double> h_list,
                                              const SolverOptions& opt) {
  if (h_list.size() < 3) throw std::invalid_argument("convergence_study: need >= 3 spacings");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    if (!(h_list[i] < h_list[i - 1]))
      throw std::invalid_argument("convergence_study: h_list must be strictly decreasing");
  std::vector<ConvergenceRow> rows;
  for (double h : h_list) {
    auto grid = std::make_shared<const HalfGrid>(p.n, p.shape, h, p.extent);
    auto mp = manufactured_problem(grid, p.u_exact, p.weight, p.spec, p.options, p.mode, p.f, p.F);
    auto rep = solve_linear(mp.system, mp.rhs, opt);
    double err = 0.0, scale = 0.0;
    for (std::size_t c = 0; c < grid->size(); ++c) {
      if (grid->y(c) < p.error_y_min) continue;
      err = std::max(err, std::fabs(rep.field.values[c] - mp.exact.values[c]));
      scale = std::max(scale, std::fabs(mp.exact.values[c]));
    }
    ConvergenceRow row;
    row.h = h;
    row.max_error = err;
    row.exact = err <= 1e-9 * std::max(scale, 1.0);
    row.order = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty() && !row.exact && !rows.back().exact && rows.back().max_error > 0.0)
      row.order = std::log(rows.back().max_error / err) / std::log(rows.back().h / h);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bhlab
