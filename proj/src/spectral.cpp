#include "bhlab/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bhlab/errors.hpp"

namespace bhlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Cubic grading toward both ends of [0, 1].
double grade(double s) { return s - std::sin(2.0 * kPi * s) / (2.0 * kPi); }

bool is_integer(double v) { return std::fabs(v - std::round(v)) < 1e-9 * std::max(1.0, std::fabs(v)); }

}  // namespace

PolarMesh::PolarMesh(double h, double radius) : h_(h), radius_(radius) {
  if (!(h > 0.0) || !(radius > 0.0)) throw InvalidSpacingError("polar mesh needs h > 0 and radius > 0");
  const double cells = radius / h;
  if (!is_integer(cells) || std::round(cells) < 4)
    throw InvalidSpacingError("polar mesh needs radius/h to be an integer >= 4");
  nr_ = int(std::round(cells));
  const double q = 1.0 / (4.0 * h);
  nth_ = is_integer(q) ? 13 * int(std::round(q)) : int(std::ceil(kPi / h));
  theta_.resize(std::size_t(nth_) + 1);
  for (int j = 0; j <= nth_; ++j) theta_[std::size_t(j)] = kPi * grade(double(j) / nth_);
  theta_.back() = kPi;
}

std::size_t PolarMesh::node(int i, int j) const {
  if (i == 0) return 0;
  return 1 + std::size_t(i - 1) * std::size_t(nth_ + 1) + std::size_t(j);
}

Vec2 PolarMesh::position(int i, int j) const {
  // Angles near pi are measured from pi to keep y accurate.
  const bool upper = 2 * j > nth_;
  const double d = kPi * grade(double(upper ? nth_ - j : j) / nth_);
  const double c = std::cos(d);
  return {r(i) * (upper ? -c : c), r(i) * std::sin(d)};
}

std::string PolarMesh::describe() const {
  std::ostringstream os;
  os << "polar half-disk R=" << radius_ << " h=" << h_ << " nr=" << nr_ << " ntheta=" << nth_;
  return os.str();
}

// ---------------------------------------------------------------------------

SpectralWeight SpectralWeight::power(double b, double eps) {
  SpectralWeight w;
  w.kind = Kind::power;
  w.exponent = b;
  w.eps = eps;
  std::ostringstream os;
  os << "rho_" << eps << "^" << b;
  w.id = os.str();
  return w;
}

SpectralWeight SpectralWeight::omega_inverse(double a, double eps) {
  if (!(a < 1.0)) throw std::invalid_argument("omega weights need a < 1");
  SpectralWeight w;
  w.kind = Kind::omega_inverse;
  w.exponent = a;
  w.eps = eps;
  std::ostringstream os;
  os << "omega_" << eps << "^" << a << "^-1";
  w.id = os.str();
  return w;
}

SpectralWeight SpectralWeight::sampler(ScalarSampler f, std::string id, double sigma_order) {
  SpectralWeight w;
  w.kind = Kind::sampler;
  w.f = std::move(f);
  w.id = std::move(id);
  w.sigma_order = sigma_order;
  return w;
}

double SpectralWeight::operator()(const XPoint& x, double y) const {
  switch (kind) {
    case Kind::power:
      return scale * std::pow(eps * eps + y * y, 0.5 * exponent);
    case Kind::omega_inverse:
      return scale / omega(WeightFamily{exponent, eps, false}, y);
    case Kind::sampler:
      return scale * f(x, y);
  }
  return 0.0;
}

double SpectralWeight::order_at_sigma() const {
  switch (kind) {
    case Kind::power: return eps > 0.0 ? 0.0 : exponent;
    case Kind::omega_inverse: return eps > 0.0 ? -2.0 : exponent - 2.0;
    case Kind::sampler: return sigma_order;
  }
  return 0.0;
}

bool SpectralWeight::separable() const { return kind != Kind::sampler && eps == 0.0; }

SpectralWeight SpectralWeight::scaled(double c) const {
  SpectralWeight w = *this;
  w.scale *= c;
  return w;
}

// ---------------------------------------------------------------------------

namespace {

using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Triplets = std::vector<Eigen::Triplet<double>>;

// Angular geometry of element j, parametrized by t in [0, 1].
struct AngularElement {
  bool upper = false;
  double d0 = 0.0;  // distance to the nearer Sigma end at t = 0 (lower) or t = 1 (upper)
  double width = 0.0;
  double dist(double t) const { return upper ? d0 + (1.0 - t) * width : d0 + t * width; }
  double sin_at(double t) const { return std::sin(dist(t)); }
  double cos_at(double t) const { return upper ? -std::cos(dist(t)) : std::cos(dist(t)); }
};

AngularElement angular_element(const PolarMesh& m, int j) {
  const int n = m.ntheta();
  auto dist = [&](int k) { return kPi * grade(double(std::min(k, n - k)) / n); };
  AngularElement e;
  if (2 * (j + 1) <= n) {
    e.d0 = dist(j);
    e.width = dist(j + 1) - dist(j);
  } else if (2 * j >= n) {
    e.upper = true;
    e.d0 = dist(j + 1);
    e.width = dist(j) - dist(j + 1);
  } else {
    e.d0 = dist(j);
    e.width = m.theta(j + 1) - m.theta(j);
  }
  return e;
}

// Integrals over element j of sin^p times (1-t)^2, t(1-t), t^2 and 1, in theta measure.
// The element is parametrized from its end nearer to Sigma; divergent moments come back NaN.
std::array<double, 4> angular_moments(const PolarMesh& m, int j, double p) {
  const AngularElement e = angular_element(m, j);
  const bool near_sigma = j <= 1 || j >= m.ntheta() - 2;
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    auto g = [&](double u) {
      const double t = e.upper ? 1.0 - u : u;
      double f = 1.0;
      switch (k) {
        case 0: f = (1.0 - t) * (1.0 - t); break;
        case 1: f = t * (1.0 - t); break;
        case 2: f = t * t; break;
        default: break;
      }
      if (p == 0.0 || f == 0.0) return f;
      // Logarithms keep f * sin^p finite where sin^p alone overflows.
      return std::exp(p * std::log(std::sin(e.d0 + u * e.width)) + std::log(f));
    };
    double v;
    try {
      if (near_sigma) {
        static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
        v = ts.integrate(g, 0.0, 1.0, 1e-14);
      } else {
        v = boost::math::quadrature::gauss<double, 20>::integrate(g, 0.0, 1.0);
      }
    } catch (const std::exception&) {
      v = NAN;
    }
    out[std::size_t(k)] = v * e.width;
  }
  return out;
}

// 2x2 local angular mass / derivative matrices from the moments.
struct Local2 {
  double m[2][2];
};

Local2 angular_mass(const std::array<double, 4>& mo) {
  return Local2{{{mo[0], mo[1]}, {mo[1], mo[2]}}};
}

Local2 angular_stiff(const std::array<double, 4>& mo, double width) {
  const double s = mo[3] / (width * width);
  return Local2{{{s, -s}, {-s, s}}};
}

// int_{r0}^{r1} r^p phi_a phi_c dr for the hat pieces of [r0, r1].
Local2 radial_mass(double r0, double r1, double p) {
  const double d = r1 - r0;
  Local2 out{};
  if (r0 > 0.0) {
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        auto g = [&](double r) {
          const double pa = a == 0 ? (r1 - r) / d : (r - r0) / d;
          const double pc = c == 0 ? (r1 - r) / d : (r - r0) / d;
          return std::pow(r, p) * pa * pc;
        };
        out.m[a][c] = boost::math::quadrature::gauss<double, 12>::integrate(g, r0, r1);
      }
    return out;
  }
  // Origin element: only the outer hat r/d can be free.
  const double e = p + 3.0;
  out.m[1][1] = e > 0.0 ? std::pow(r1, e) / (e * d * d) : INFINITY;
  out.m[0][0] = out.m[0][1] = out.m[1][0] = NAN;
  return out;
}

// int_{r0}^{r1} r^p phi_a' phi_c' dr.
Local2 radial_stiff(double r0, double r1, double p) {
  const double d = r1 - r0;
  double mom;
  if (r0 > 0.0) {
    mom = (p == -1.0) ? std::log(r1 / r0) : (std::pow(r1, p + 1.0) - std::pow(r0, p + 1.0)) / (p + 1.0);
  } else {
    mom = p > -1.0 ? std::pow(r1, p + 1.0) / (p + 1.0) : INFINITY;
  }
  const double s = mom / (d * d);
  return Local2{{{s, -s}, {-s, s}}};
}

struct TermSpec {
  bool separable = false;
  double c = 1.0;
  double q = 0.0;  // w = c r^q sin^q theta when separable
  // Batch evaluation at (x, y) points otherwise.
  std::function<void(const std::vector<Vec2>&, std::vector<double>&)> eval;
};

struct FormSpec {
  TermSpec stiff;
  TermSpec mass;
  bool mass_on_arc = false;
  double stiff_order = 0.0;
  double mass_order = 0.0;
  bool constrain_sigma = true;
};

struct Forms {
  std::shared_ptr<const PolarMesh> mesh;
  std::vector<long> dof;
  long n = 0;
  Eigen::SparseMatrix<double> K, M;
};

std::vector<long> free_dofs(const PolarMesh& m, const FormSpec& spec, long& count) {
  std::vector<long> dof(m.num_nodes(), 0);
  if (spec.constrain_sigma) {
    const int nt = m.ntheta();
    const bool ring = spec.stiff_order <= -1.0 || spec.mass_order <= -3.0;
    const bool inner = spec.stiff_order <= -2.0 || (!spec.mass_on_arc && spec.mass_order <= -4.0);
    dof[0] = -1;
    for (int i = 1; i <= m.nr(); ++i) {
      for (int j = 0; j <= nt; ++j) {
        bool fixed = j == 0 || j == nt;
        if (ring && (j == 1 || j == nt - 1)) fixed = true;
        if (inner && i == 1) fixed = true;
        if (fixed) dof[m.node(i, j)] = -1;
      }
    }
  }
  count = 0;
  for (auto& d : dof)
    if (d >= 0) d = count++;
  return dof;
}

// Local node order: (i, j), (i+1, j), (i, j+1), (i+1, j+1); radial index k & 1, angular k >> 1.
std::array<long, 4> element_dofs(const PolarMesh& m, const std::vector<long>& dof, int i, int j) {
  return {dof[m.node(i, j)], dof[m.node(i + 1, j)], dof[m.node(i, j + 1)], dof[m.node(i + 1, j + 1)]};
}

void push_local(Triplets& t, const std::array<long, 4>& d, const double loc[4][4], const char* what) {
  for (int a = 0; a < 4; ++a) {
    if (d[std::size_t(a)] < 0) continue;
    for (int b = 0; b < 4; ++b) {
      if (d[std::size_t(b)] < 0) continue;
      const double v = loc[a][b];
      if (!std::isfinite(v)) throw NonFiniteWeightError(std::string("non-finite ") + what + " entry");
      t.emplace_back(int(d[std::size_t(a)]), int(d[std::size_t(b)]), v);
    }
  }
}

bool any_free(const std::array<long, 4>& d) {
  return std::any_of(d.begin(), d.end(), [](long v) { return v >= 0; });
}

// Separable volume integrals: stiffness and (optionally) mass.
void separable_volume(const PolarMesh& m, const std::vector<long>& dof, const TermSpec& term, bool stiffness,
                      Triplets& out) {
  const int nt = m.ntheta();
  // Angular factors once per element column.
  std::vector<std::array<double, 4>> ang_s(static_cast<std::size_t>(nt)), ang_m(static_cast<std::size_t>(nt));
  std::vector<double> widths(static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) {
    bool used = false;
    for (int i = 0; i < m.nr() && !used; ++i) used = any_free(element_dofs(m, dof, i, j));
    if (!used) continue;
    widths[std::size_t(j)] = angular_element(m, j).width;
    if (stiffness) {
      ang_s[std::size_t(j)] = angular_moments(m, j, term.q);
    } else {
      ang_m[std::size_t(j)] = angular_moments(m, j, term.q);
    }
  }
  for (int i = 0; i < m.nr(); ++i) {
    const double r0 = m.r(i), r1 = m.r(i + 1);
    Local2 rs{}, rm{};
    bool have_radial = false;
    for (int j = 0; j < nt; ++j) {
      const auto d = element_dofs(m, dof, i, j);
      if (!any_free(d)) continue;
      if (!have_radial) {
        if (stiffness) {
          rs = radial_stiff(r0, r1, term.q + 1.0);
          rm = radial_mass(r0, r1, term.q - 1.0);
        } else {
          rm = radial_mass(r0, r1, term.q + 1.0);
        }
        have_radial = true;
      }
      double loc[4][4];
      const auto& mo = stiffness ? ang_s[std::size_t(j)] : ang_m[std::size_t(j)];
      const Local2 am = angular_mass(mo);
      const Local2 ad = angular_stiff(mo, widths[std::size_t(j)]);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if (d[std::size_t(a)] < 0 || d[std::size_t(b)] < 0) {
            loc[a][b] = 0.0;
            continue;
          }
          const int ra = a & 1, rb = b & 1, ta = a >> 1, tb = b >> 1;
          loc[a][b] = stiffness ? term.c * (rs.m[ra][rb] * am.m[ta][tb] + rm.m[ra][rb] * ad.m[ta][tb])
                                : term.c * rm.m[ra][rb] * am.m[ta][tb];
        }
      }
      push_local(out, d, loc, stiffness ? "stiffness" : "mass");
    }
  }
}

// Tensor Gauss rule on each element for weights without closed forms.
struct GaussRule {
  std::vector<double> x, w;  // on [0, 1]
};

GaussRule gauss_rule(int n) {
  GaussRule g;
  auto add = [&](const auto& abscissa, const auto& weight) {
    for (std::size_t k = 0; k < abscissa.size(); ++k) {
      const double a = abscissa[k], wt = weight[k];
      if (a == 0.0) {
        g.x.push_back(0.5);
        g.w.push_back(0.5 * wt);
      } else {
        g.x.push_back(0.5 - 0.5 * a);
        g.w.push_back(0.5 * wt);
        g.x.push_back(0.5 + 0.5 * a);
        g.w.push_back(0.5 * wt);
      }
    }
  };
  if (n == 8) {
    using G = boost::math::quadrature::gauss<double, 8>;
    add(G::abscissa(), G::weights());
  } else {
    using G = boost::math::quadrature::gauss<double, 16>;
    add(G::abscissa(), G::weights());
  }
  return g;
}

void sampled_volume(const PolarMesh& m, const std::vector<long>& dof, const TermSpec& term, bool stiffness,
                    Triplets& out) {
  const int nt = m.ntheta();
  const GaussRule g8 = gauss_rule(8), g16 = gauss_rule(16);
  struct Elem {
    int i, j;
    std::size_t first;
  };
  std::vector<Elem> elems;
  std::vector<Vec2> pts;
  for (int i = 0; i < m.nr(); ++i) {
    for (int j = 0; j < nt; ++j) {
      if (!any_free(element_dofs(m, dof, i, j))) continue;
      const GaussRule& gt = (j <= 2 || j >= nt - 3) ? g16 : g8;
      const AngularElement e = angular_element(m, j);
      elems.push_back({i, j, pts.size()});
      for (double tr : g8.x) {
        const double r = m.r(i) + tr * (m.r(i + 1) - m.r(i));
        for (double tt : gt.x) pts.push_back({r * e.cos_at(tt), r * e.sin_at(tt)});
      }
    }
  }
  std::vector<double> wv;
  term.eval(pts, wv);
  for (const Elem& el : elems) {
    const GaussRule& gt = (el.j <= 2 || el.j >= nt - 3) ? g16 : g8;
    const AngularElement e = angular_element(m, el.j);
    const double r0 = m.r(el.i), dr = m.r(el.i + 1) - r0, dt = e.width;
    double loc[4][4] = {};
    std::size_t q = el.first;
    for (std::size_t a = 0; a < g8.x.size(); ++a) {
      const double tr = g8.x[a], r = r0 + tr * dr;
      const double phi[2] = {1.0 - tr, tr}, dphi[2] = {-1.0 / dr, 1.0 / dr};
      for (std::size_t b = 0; b < gt.x.size(); ++b, ++q) {
        const double tt = gt.x[b];
        const double psi[2] = {1.0 - tt, tt}, dpsi[2] = {-1.0 / dt, 1.0 / dt};
        const double jw = g8.w[a] * gt.w[b] * dr * dt * r * wv[q];
        for (int k = 0; k < 4; ++k) {
          for (int l = 0; l < 4; ++l) {
            const int rk = k & 1, rl = l & 1, tk = k >> 1, tl = l >> 1;
            double v;
            if (stiffness) {
              v = dphi[rk] * psi[tk] * dphi[rl] * psi[tl] + phi[rk] * dpsi[tk] * phi[rl] * dpsi[tl] / (r * r);
            } else {
              v = phi[rk] * psi[tk] * phi[rl] * psi[tl];
            }
            loc[k][l] += jw * v;
          }
        }
      }
    }
    push_local(out, element_dofs(m, dof, el.i, el.j), loc, stiffness ? "stiffness" : "mass");
  }
}

// Mass on the outer arc r = R.
void arc_mass(const PolarMesh& m, const std::vector<long>& dof, const TermSpec& term, Triplets& out) {
  const int nt = m.ntheta(), i = m.nr();
  const double R = m.radius();
  const GaussRule g16 = gauss_rule(16);
  std::vector<Vec2> pts;
  std::vector<int> cols;
  for (int j = 0; j < nt; ++j) {
    const long d0 = dof[m.node(i, j)], d1 = dof[m.node(i, j + 1)];
    if (d0 < 0 && d1 < 0) continue;
    cols.push_back(j);
    if (!term.separable) {
      const AngularElement e = angular_element(m, j);
      for (double t : g16.x) pts.push_back({R * e.cos_at(t), R * e.sin_at(t)});
    }
  }
  std::vector<double> wv;
  if (!term.separable) term.eval(pts, wv);
  std::size_t q = 0;
  for (int j : cols) {
    const long d[2] = {dof[m.node(i, j)], dof[m.node(i, j + 1)]};
    double loc[2][2] = {};
    if (term.separable) {
      const Local2 am = angular_mass(angular_moments(m, j, term.q));
      const double f = term.c * std::pow(R, term.q + 1.0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) loc[a][b] = f * am.m[a][b];
    } else {
      const double dt = angular_element(m, j).width;
      for (std::size_t k = 0; k < g16.x.size(); ++k, ++q) {
        const double t = g16.x[k], psi[2] = {1.0 - t, t};
        const double jw = g16.w[k] * dt * R * wv[q];
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) loc[a][b] += jw * psi[a] * psi[b];
      }
    }
    for (int a = 0; a < 2; ++a) {
      if (d[a] < 0) continue;
      for (int b = 0; b < 2; ++b) {
        if (d[b] < 0) continue;
        if (!std::isfinite(loc[a][b])) throw NonFiniteWeightError("non-finite boundary mass entry");
        out.emplace_back(int(d[a]), int(d[b]), loc[a][b]);
      }
    }
  }
}

Eigen::SparseMatrix<double> to_sparse(long n, const Triplets& t) {
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

Forms build_forms(std::shared_ptr<const PolarMesh> mesh, const FormSpec& spec) {
  Forms f;
  f.mesh = mesh;
  f.dof = free_dofs(*mesh, spec, f.n);
  Triplets tk, tm;
  if (spec.stiff.separable) {
    separable_volume(*mesh, f.dof, spec.stiff, true, tk);
  } else {
    sampled_volume(*mesh, f.dof, spec.stiff, true, tk);
  }
  if (spec.mass_on_arc) {
    arc_mass(*mesh, f.dof, spec.mass, tm);
  } else if (spec.mass.separable) {
    separable_volume(*mesh, f.dof, spec.mass, false, tm);
  } else {
    sampled_volume(*mesh, f.dof, spec.mass, false, tm);
  }
  f.K = to_sparse(f.n, tk);
  f.M = to_sparse(f.n, tm);
  return f;
}

// Weight values at many points; omega^{-1} with eps > 0 integrates chi along sorted y.
void evaluate_weight(const SpectralWeight& w, const std::vector<Vec2>& pts, std::vector<double>& out) {
  out.resize(pts.size());
  if (w.kind != SpectralWeight::Kind::omega_inverse) {
    for (std::size_t k = 0; k < pts.size(); ++k) out[k] = w(XPoint{pts[k][0], 0.0}, pts[k][1]);
    return;
  }
  const double a = w.exponent, e2 = w.eps * w.eps;
  std::vector<std::size_t> order(pts.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return pts[p][1] < pts[q][1]; });
  auto integrand = [&](double s) { return std::pow(e2 + s * s, -0.5 * a); };
  double chi = 0.0, prev = 0.0;
  for (std::size_t k : order) {
    const double y = pts[k][1];
    if (y > prev) {
      chi += boost::math::quadrature::gauss<double, 7>::integrate(integrand, prev, y);
      prev = y;
    }
    const double om = std::pow(e2 + y * y, 0.5 * a) * (1.0 - a) * (1.0 - a) * chi * chi;
    out[k] = w.scale / om;
  }
}

TermSpec weight_term(const SpectralWeight& w, double shift_q, std::function<double(double)> extra) {
  TermSpec t;
  t.separable = w.separable();
  if (t.separable) {
    t.c = w.scale;
    t.q = w.order_at_sigma() + shift_q;
    return t;
  }
  t.eval = [w, extra](const std::vector<Vec2>& pts, std::vector<double>& out) {
    evaluate_weight(w, pts, out);
    if (extra)
      for (std::size_t k = 0; k < pts.size(); ++k) out[k] *= extra(pts[k][1]);
  };
  return t;
}

struct EigenPair {
  double lambda = 0.0;
  Vec x;
  double residual = 0.0;
  int iterations = 0;
};

// Smallest lambda of K x = lambda M x: restarted Lanczos for K^{-1} M in the K inner product.
// Works in the basis with unit stiffness diagonal, where the residual is measured.
EigenPair smallest_eigenpair(const Eigen::SparseMatrix<double>& K0, const Eigen::SparseMatrix<double>& M0,
                             const EigenOptions& opt) {
  const long n = K0.rows();
  const Vec scale = K0.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const Eigen::SparseMatrix<double> K = scale.asDiagonal() * K0 * scale.asDiagonal();
  const Eigen::SparseMatrix<double> M = scale.asDiagonal() * M0 * scale.asDiagonal();
  if (n == 0) throw SolverError("no free degrees of freedom", 0.0);
  if (M.nonZeros() == 0 || Eigen::MatrixXd(M.diagonal()).cwiseAbs().maxCoeff() == 0.0)
    throw SolverError("mass matrix vanishes on the free nodes", 0.0);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw SolverError("stiffness factorization failed", 0.0);
  if ((ldlt.vectorD().array() <= 0.0).any()) throw SolverError("stiffness matrix is not positive definite", 0.0);

  const int m = int(std::min<long>(opt.krylov_dim, n));
  Vec x = Vec::Ones(n);
  EigenPair best;
  best.residual = INFINITY;
  for (int restart = 0; restart < opt.max_restarts; ++restart) {
    Dense Q(n, m), KQ(n, m);
    Vec q = x / std::sqrt(x.dot(K * x));
    int used = 0;
    for (int j = 0; j < m; ++j) {
      Q.col(j) = q;
      KQ.col(j) = K * q;
      ++used;
      if (j + 1 == m) break;
      Vec w = ldlt.solve(M * q);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec c = KQ.leftCols(used).transpose() * w;
        w -= Q.leftCols(used) * c;
      }
      const double beta2 = w.dot(K * w);
      if (!(beta2 > 1e-28 * q.dot(M * q))) break;
      q = w / std::sqrt(beta2);
    }
    const Dense Qs = Q.leftCols(used);
    const Dense H = Qs.transpose() * (M * Qs);
    const Dense G = Qs.transpose() * KQ.leftCols(used);
    Eigen::GeneralizedSelfAdjointEigenSolver<Dense> es(0.5 * (H + H.transpose()), 0.5 * (G + G.transpose()));
    const Vec s = es.eigenvectors().col(used - 1);
    x = Qs * s;
    const Vec Kx = K * x, Mx = M * x;
    const double lam = x.dot(Kx) / x.dot(Mx);
    const double res = (Kx - lam * Mx).norm() / Kx.norm();
    best.iterations = restart + 1;
    if (res < best.residual) {
      best.lambda = lam;
      best.x = x;
      best.residual = res;
    }
    if (res <= opt.tol) break;
  }
  best.x = scale.asDiagonal() * best.x;
  return best;
}

EigenResult finish(const Forms& f, const EigenPair& p, std::string id, double a, double eps_or_r) {
  EigenResult r;
  r.mesh = f.mesh;
  r.quotient_id = std::move(id);
  r.a = a;
  r.eps_or_r = eps_or_r;
  r.grid_h = f.mesh->h();
  r.residual = p.residual;
  r.iterations = p.iterations;
  r.free_dofs = std::size_t(f.n);
  Vec x = p.x / std::sqrt(p.x.dot(f.M * p.x));
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  if (x[imax] < 0.0) x = -x;
  r.lambda = x.dot(f.K * x) / x.dot(f.M * x);
  r.eigenvector.assign(f.mesh->num_nodes(), 0.0);
  for (std::size_t k = 0; k < f.dof.size(); ++k)
    if (f.dof[k] >= 0) r.eigenvector[k] = x[f.dof[k]];
  return r;
}

EigenResult solve_quotient(const SpectralWeight& w, double h, FormSpec spec, const EigenOptions& opt,
                           const std::string& id, double a, double eps_or_r) {
  auto mesh = std::make_shared<const PolarMesh>(h);
  spec.stiff_order = w.order_at_sigma();
  const Forms f = build_forms(mesh, spec);
  return finish(f, smallest_eigenpair(f.K, f.M, opt), id, a, eps_or_r);
}

}  // namespace

EigenResult trace_eigen(const SpectralWeight& w, double h, const EigenOptions& opt) {
  FormSpec spec;
  spec.stiff = weight_term(w, 0.0, {});
  spec.mass = weight_term(w, 0.0, {});
  spec.mass_on_arc = true;
  spec.mass_order = w.order_at_sigma();
  return solve_quotient(w, h, spec, opt, "trace:" + w.id, w.exponent, w.eps);
}

EigenResult trace_eigen(double b, double eps, double h, const EigenOptions& opt) {
  if (!(b < 1.0)) throw std::invalid_argument("trace_eigen needs b < 1");
  return trace_eigen(SpectralWeight::power(b, eps), h, opt);
}

EigenResult hardy_quotient(const SpectralWeight& w, double h, const EigenOptions& opt) {
  FormSpec spec;
  spec.stiff = weight_term(w, 0.0, {});
  spec.mass = weight_term(w, -2.0, [](double y) { return 1.0 / (y * y); });
  spec.mass_order = w.order_at_sigma() - 2.0;
  return solve_quotient(w, h, spec, opt, "hardy:" + w.id, w.exponent, w.eps);
}

EigenResult boundary_hardy_quotient(const SpectralWeight& w, double h, const EigenOptions& opt) {
  FormSpec spec;
  spec.stiff = weight_term(w, 0.0, {});
  spec.mass = weight_term(w, -1.0, [](double y) { return 1.0 / y; });
  spec.mass_on_arc = true;
  spec.mass_order = w.order_at_sigma() - 1.0;
  return solve_quotient(w, h, spec, opt, "boundary_hardy:" + w.id, w.exponent, w.eps);
}

std::vector<SweepRow> eigen_stability_sweep(double a, std::span<const double> r_list, double h, SweepForm form,
                                            const EigenOptions& opt) {
  if (form == SweepForm::rho && !(a > -1.0 && a < 1.0))
    throw std::invalid_argument("rho-form sweep needs a in (-1, 1)");
  if (form == SweepForm::omega && !(a < 1.0)) throw std::invalid_argument("omega-form sweep needs a < 1");
  for (std::size_t k = 0; k < r_list.size(); ++k) {
    if (!(r_list[k] > 0.0) || (k > 0 && !(r_list[k] > r_list[k - 1])))
      throw std::invalid_argument("sweep radii must be positive and increasing");
  }
  std::vector<SweepRow> rows;
  for (double r : r_list) {
    const SpectralWeight w =
        form == SweepForm::rho ? SpectralWeight::power(a, 1.0 / r) : SpectralWeight::omega_inverse(a, 1.0 / r);
    const EigenResult e = trace_eigen(w, h, opt);
    rows.push_back({r, e.lambda, e.residual});
  }
  return rows;
}

void write_eigen_csv(std::ostream& os, std::span<const EigenResult> rows) {
  os << "quotient_id,a,eps_or_r,h,lambda,residual\n";
  const auto old = os.precision(12);
  for (const auto& r : rows)
    os << r.quotient_id << ',' << r.a << ',' << r.eps_or_r << ',' << r.grid_h << ',' << r.lambda << ','
       << r.residual << '\n';
  os.precision(old);
}

// ---------------------------------------------------------------------------

namespace {

// Bilinear interpolation from cell centers; the row below the first uses the parity mirror.
double interpolate(const DiscreteField& u, double x, double y) {
  const HalfGrid& g = *u.grid;
  const double h = g.h();
  const double fx = (x + g.extent()) / h - 0.5, fy = y / h - 0.5;
  const int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
  const double tx = fx - i0, ty = fy - j0;
  const double sign = u.parity == Parity::odd ? -1.0 : 1.0;
  auto value = [&](int i, int j) {
    const bool mirrored = j < 0;
    const long c = g.find(i, 0, mirrored ? -1 - j : j);
    if (c < 0) throw std::out_of_range("interpolation outside grid");
    return (mirrored ? sign : 1.0) * u.values[std::size_t(c)];
  };
  return (1 - tx) * (1 - ty) * value(i0, j0) + tx * (1 - ty) * value(i0 + 1, j0) + (1 - tx) * ty * value(i0, j0 + 1) +
         tx * ty * value(i0 + 1, j0 + 1);
}

}  // namespace

std::vector<GrowthRow> growth_monitor(const DiscreteField& u, double a, std::span<const double> r_list) {
  if (!u.grid) throw std::invalid_argument("growth_monitor needs a grid");
  if (u.grid->n() != 1) throw std::invalid_argument("growth_monitor supports n = 1");
  if (u.parity != Parity::odd) throw ParityError("growth_monitor expects an odd field");
  const int M = 1024;
  std::vector<GrowthRow> rows;
  for (double r : r_list) {
    if (!(r > 0.0)) throw std::invalid_argument("growth radii must be positive");
    double sum = 0.0;
    for (int k = 1; k < M; ++k) {
      const double t = kPi * k / M;
      const double y = r * std::sin(t);
      const double v = interpolate(u, r * std::cos(t), y);
      sum += std::pow(y, a) * v * v;
    }
    // Endpoint terms vanish: u = 0 on Sigma.
    const double integral = sum * (kPi / M) * r;
    GrowthRow row;
    row.r = r;
    row.H = std::pow(r, -(1.0 + a)) * integral;
    row.normalized = row.H / std::pow(r, 2.0 * (1.0 - a));
    rows.push_back(row);
  }
  return rows;
}

bool growth_nondecreasing(std::span<const GrowthRow> rows, double rel_tol) {
  double peak = -INFINITY;
  for (const auto& r : rows) {
    if (r.normalized < peak - rel_tol * std::fabs(peak)) return false;
    peak = std::max(peak, r.normalized);
  }
  return true;
}

DiscreteField isometry_transform(const DiscreteField& u, const WeightFamily& fam, IsometryDirection dir,
                                 PotentialKind kind) {
  if (!u.grid) throw std::invalid_argument("isometry_transform needs a grid");
  DiscreteField v = u;
  for (std::size_t c = 0; c < u.values.size(); ++c) {
    const double y = u.grid->y(c);
    double s;
    switch (kind) {
      case PotentialKind::rho: s = std::sqrt(rho(fam, y)); break;
      case PotentialKind::omega: s = std::sqrt(omega(fam, y)); break;
      default: s = 1.0 / std::sqrt(omega(fam, y)); break;
    }
    if (!std::isfinite(s) || s == 0.0) throw SingularPointError("isometry weight is singular at a cell center");
    v.values[c] = dir == IsometryDirection::to_flat ? u.values[c] * s : u.values[c] / s;
  }
  return v;
}

EnergyIdentity isometry_energy_check(const ScalarSampler& u, const WeightFamily& fam, double h) {
  if (!(fam.eps > 0.0)) throw std::invalid_argument("isometry_energy_check needs eps > 0");
  auto mesh = std::make_shared<const PolarMesh>(h);
  const double a = fam.a, eps = fam.eps;
  const double nf = normalization_factor(fam);

  auto term = [](std::function<double(double)> g) {
    TermSpec t;
    t.eval = [g](const std::vector<Vec2>& pts, std::vector<double>& out) {
      out.resize(pts.size());
      for (std::size_t k = 0; k < pts.size(); ++k) out[k] = g(pts[k][1]);
    };
    return t;
  };
  FormSpec weighted;
  weighted.constrain_sigma = false;
  weighted.stiff = term([&](double y) { return nf * std::pow(eps * eps + y * y, 0.5 * a); });
  weighted.mass = term([](double) { return 0.0; });
  FormSpec flat = weighted;
  flat.stiff = term([](double) { return 1.0; });
  flat.mass = term([&](double y) { return y > 0.0 ? potentials(PotentialKind::rho, a, eps, y).first : 0.0; });
  FormSpec arc = flat;
  arc.mass_on_arc = true;
  arc.mass = term([&](double y) { return y > 0.0 ? potentials(PotentialKind::rho, a, eps, y).second : 0.0; });

  const Forms fw = build_forms(mesh, weighted);
  const Forms ff = build_forms(mesh, flat);
  const Forms fa = build_forms(mesh, arc);

  Vec un(fw.n), vn(fw.n);
  const PolarMesh& m = *mesh;
  for (int i = 0; i <= m.nr(); ++i) {
    for (int j = 0; j <= m.ntheta(); ++j) {
      const std::size_t k = m.node(i, j);
      const Vec2 p = m.position(i, j);
      const double val = u(XPoint{p[0], 0.0}, p[1]);
      un[fw.dof[k]] = val;
      vn[fw.dof[k]] = std::sqrt(nf * std::pow(eps * eps + p[1] * p[1], 0.5 * a)) * val;
      if (i == 0) break;
    }
  }
  EnergyIdentity out;
  out.weighted_energy = un.dot(fw.K * un);
  out.flat_form = vn.dot(ff.K * vn) + vn.dot(ff.M * vn) + vn.dot(fa.M * vn);
  out.relative_gap = std::fabs(out.weighted_energy - out.flat_form) / std::fabs(out.weighted_energy);
  return out;
}

}  // namespace bhlab
