#include "bhlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "bhlab/errors.hpp"

namespace bhlab {

const char* to_string(Shape s) {
  return s == Shape::half_rectangle ? "half_rectangle" : "half_disk";
}

namespace {

int checked_ratio(double extent, double h) {
  const double r = extent / h;
  const double k = std::round(r);
  if (!(h > 0.0) || std::fabs(r - k) > 1e-9 * std::max(1.0, r))
    throw InvalidSpacingError("h must divide the domain extent");
  if (h > extent / 4.0 + 1e-15) throw InvalidSpacingError("h must be <= extent/4");
  return static_cast<int>(k);
}

}  // namespace

HalfGrid::HalfGrid(int n, Shape shape, double h, double extent)
    : n_(n), shape_(shape), h_(h), extent_(extent) {
  if (n != 1 && n != 2) throw std::invalid_argument("HalfGrid: n must be 1 or 2");
  ny_ = checked_ratio(extent, h);
  nx_ = 2 * ny_;
  nz_ = n == 2 ? nx_ : 1;
  lookup_.assign(static_cast<std::size_t>(nx_) * nz_ * ny_, -1);
  const double R2 = extent * extent;
  for (int iy = 0; iy < ny_; ++iy)
    for (int iz = 0; iz < nz_; ++iz)
      for (int ix = 0; ix < nx_; ++ix) {
        if (shape == Shape::half_disk) {
          const double x1 = coord_x(ix), x2 = n == 2 ? coord_x(iz) : 0.0, y = (iy + 0.5) * h;
          if (x1 * x1 + x2 * x2 + y * y > R2) continue;
        }
        lookup_[(static_cast<std::size_t>(iy) * nz_ + iz) * nx_ + ix] = long(cells_.size());
        cells_.push_back({ix, iz, iy});
      }
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto idx = cells_[c];
    for (int axis : {0, 1, 2}) {
      if (axis == 1 && n_ == 1) continue;
      for (int side : {-1, 1}) {
        auto nb = idx;
        nb[axis] += side;
        if (find(nb) >= 0) continue;
        BoundaryFace f;
        f.cell = c;
        f.axis = axis;
        f.side = side;
        f.kind = (axis == kAxisY && side < 0 && idx[2] == 0) ? FaceKind::sigma : FaceKind::outer;
        f.midpoint = center(c);
        f.midpoint[axis] += 0.5 * side * h_;
        if (f.kind == FaceKind::sigma) f.midpoint[2] = 0.0;
        faces_.push_back(f);
      }
    }
  }
}

long HalfGrid::find(int ix, int iz, int iy) const {
  if (ix < 0 || ix >= nx_ || iz < 0 || iz >= nz_ || iy < 0 || iy >= ny_) return -1;
  return lookup_[(static_cast<std::size_t>(iy) * nz_ + iz) * nx_ + ix];
}

XPoint HalfGrid::x(std::size_t c) const {
  const auto& i = cells_[c];
  return {coord_x(i[0]), n_ == 2 ? coord_x(i[1]) : 0.0};
}

Vec3 HalfGrid::center(std::size_t c) const {
  const auto p = x(c);
  return {p[0], p[1], y(c)};
}

std::size_t HalfGrid::count_faces(FaceKind k) const {
  return std::size_t(std::count_if(faces_.begin(), faces_.end(),
                                   [k](const BoundaryFace& f) { return f.kind == k; }));
}

std::string HalfGrid::describe() const {
  char buf[200];
  std::snprintf(buf, sizeof buf, "n=%d shape=%s h=%.12g extent=%.12g cells=%zu", n_,
                to_string(shape_), h_, extent_, cells_.size());
  return buf;
}

HalfGrid build_half_grid(int n, Shape shape, double h, double extent) {
  return HalfGrid(n, shape, h, extent);
}

// ---------------------------------------------------------------------------

double EmbeddedCurve::speed(double t) const {
  const Vec2 v = velocity(t);
  return std::hypot(v[0], v[1]);
}

Vec2 EmbeddedCurve::normal(double t) const {
  const Vec2 v = velocity(t);
  const double s = std::hypot(v[0], v[1]);
  return {-normal_sign * v[1] / s, normal_sign * v[0] / s};
}

double EmbeddedCurve::curvature(double t) const {
  const Vec2 acc = acceleration(t);
  const Vec2 nu = normal(t);
  const double s = speed(t);
  return (acc[0] * nu[0] + acc[1] * nu[1]) / (s * s);
}

Vec2 EmbeddedCurve::fermi_map(double t, double y) const {
  const Vec2 p = position(t);
  const Vec2 nu = normal(t);
  return {p[0] + y * nu[0], p[1] + y * nu[1]};
}

EmbeddedCurve EmbeddedCurve::line(Vec2 o, Vec2 d, double t_min, double t_max) {
  EmbeddedCurve c;
  c.position = [o, d](double t) { return Vec2{o[0] + t * d[0], o[1] + t * d[1]}; };
  c.velocity = [d](double) { return d; };
  c.acceleration = [](double) { return Vec2{0.0, 0.0}; };
  c.t_min = t_min;
  c.t_max = t_max;
  return c;
}

EmbeddedCurve EmbeddedCurve::circle(Vec2 ctr, double R, bool inward, bool unit_speed) {
  const double w = unit_speed ? 1.0 / R : 1.0;
  EmbeddedCurve c;
  c.position = [=](double t) { return Vec2{ctr[0] + R * std::cos(w * t), ctr[1] + R * std::sin(w * t)}; };
  c.velocity = [=](double t) { return Vec2{-R * w * std::sin(w * t), R * w * std::cos(w * t)}; };
  c.acceleration = [=](double t) {
    return Vec2{-R * w * w * std::cos(w * t), -R * w * w * std::sin(w * t)};
  };
  c.t_min = 0.0;
  c.t_max = 2.0 * std::numbers::pi / w;
  c.closed = true;
  // Counterclockwise: the left normal points to the center.
  c.normal_sign = inward ? 1.0 : -1.0;
  return c;
}

double fermi_mu(const EmbeddedCurve& c, double t, double y) {
  const double k = c.curvature(t);
  if (y * k >= 1.0) throw ChartViolationError("Fermi chart invalid: y*kappa >= 1");
  return c.speed(t) * (1.0 - y * k);
}

void check_tubular_radius(const EmbeddedCurve& c, double y_max) {
  double kmax = 0.0;
  for (int i = 0; i <= 1000; ++i)
    kmax = std::max(kmax, std::fabs(c.curvature(c.t_min + (c.t_max - c.t_min) * i / 1000.0)));
  if (y_max * kmax >= 1.0) throw ChartViolationError("tubular radius exceeds 1/sup|kappa|");
}

MeanCurvatureCheck mean_curvature_check(const EmbeddedCurve& c, double t, double y,
                                        double step) {
  MeanCurvatureCheck r;
  const double k = c.curvature(t);
  if (y * k >= 1.0) throw ChartViolationError("Fermi chart invalid: y*kappa >= 1");
  r.analytic = k / (1.0 - y * k);
  const double mp = fermi_mu(c, t, y + step), mm = fermi_mu(c, t, y - step);
  r.numeric = -(mp - mm) / (2.0 * step) / fermi_mu(c, t, y);
  r.residual = std::fabs(r.analytic - r.numeric);
  return r;
}

SignedDistance signed_distance(const EmbeddedCurve& c, Vec2 X) {
  const int M = 2000;
  const double span = c.t_max - c.t_min;
  const int count = c.closed ? M : M + 1;
  auto dist2 = [&](double t) {
    const Vec2 p = c.position(t);
    return (p[0] - X[0]) * (p[0] - X[0]) + (p[1] - X[1]) * (p[1] - X[1]);
  };
  std::vector<double> d2(count);
  for (int i = 0; i < count; ++i) d2[i] = dist2(c.t_min + span * i / M);
  auto at = [&](int i) { return c.closed ? d2[(i + count) % count] : d2[std::clamp(i, 0, count - 1)]; };

  struct Cand { double t, d; };
  std::vector<Cand> cands;
  for (int i = 0; i < count; ++i) {
    if (at(i) > at(i - 1) || at(i) > at(i + 1)) continue;
    // Newton on g(t) = (psi - X).psi', safeguarded to the bracketing cell.
    double t = c.t_min + span * i / M;
    const double lo = t - span / M, hi = t + span / M;
    for (int it = 0; it < 50; ++it) {
      const Vec2 p = c.position(t), v = c.velocity(t), acc = c.acceleration(t);
      const double g = (p[0] - X[0]) * v[0] + (p[1] - X[1]) * v[1];
      const double dg = v[0] * v[0] + v[1] * v[1] + (p[0] - X[0]) * acc[0] + (p[1] - X[1]) * acc[1];
      if (dg <= 0.0) break;
      double tn = std::clamp(t - g / dg, lo, hi);
      if (!c.closed) tn = std::clamp(tn, c.t_min, c.t_max);
      if (std::fabs(tn - t) < 1e-15 * std::max(1.0, std::fabs(t))) { t = tn; break; }
      t = tn;
    }
    cands.push_back({t, std::sqrt(dist2(t))});
  }
  auto best = std::min_element(cands.begin(), cands.end(),
                               [](const Cand& a, const Cand& b) { return a.d < b.d; });
  for (const auto& k : cands) {
    double gap = std::fabs(k.t - best->t);
    if (c.closed) gap = std::min(gap, span - gap);
    if (gap > 1e-6 * span && std::fabs(k.d - best->d) <= 1e-9 * (1.0 + best->d))
      throw AmbiguousProjectionError("signed_distance: equidistant feet");
  }
  SignedDistance r;
  r.foot = best->t;
  const Vec2 p = c.position(r.foot), nu = c.normal(r.foot);
  const double side = (X[0] - p[0]) * nu[0] + (X[1] - p[1]) * nu[1];
  r.d = side < 0.0 ? -best->d : best->d;
  return r;
}

}  // namespace bhlab
