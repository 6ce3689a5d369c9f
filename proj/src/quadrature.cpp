#include "bhlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "bhlab/errors.hpp"

namespace bhlab {
namespace {

struct Piece {
  double lo, hi, value, error, l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const std::function<double(double)>& f, double lo, double hi) {
  // Boost's single-panel error is measured on [-1, 1]; rescale it here.
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, lo, hi, 0, 0.0, &err, &l1);
  return {lo, hi, v, err * 0.5 * (hi - lo), l1};
}

constexpr int kMaxPanels = 4000;

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo,
                           double hi, double rel_tol) {
  QuadratureResult r;
  if (lo == hi) {
    r.converged = true;
    return r;
  }
  // Global adaptive bisection: always split the panel with the largest error.
  std::priority_queue<Piece> heap;
  heap.push(rule(f, lo, hi));
  double value = heap.top().value, err = heap.top().error, l1 = heap.top().l1;
  int panels = 1;
  while (err > rel_tol * l1 && panels < kMaxPanels && std::isfinite(value)) {
    Piece p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.lo + p.hi);
    if (!(mid > p.lo && mid < p.hi)) {
      heap.push(p);
      break;
    }
    Piece a = rule(f, p.lo, mid), b = rule(f, mid, p.hi);
    value += a.value + b.value - p.value;
    err += a.error + b.error - p.error;
    l1 += a.l1 + b.l1 - p.l1;
    heap.push(a);
    heap.push(b);
    ++panels;
  }
  // Re-sum to drop the drift of the running totals.
  value = err = l1 = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  r.value = value;
  r.error_estimate = err;
  r.converged = std::isfinite(value) && err <= std::max(rel_tol * l1, 1e-300);
  if (r.converged) return r;
  // Endpoint singularities that bisection cannot resolve: double-exponential rule.
  try {
    thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    double e2 = 0.0, l2 = 0.0;
    auto g = [&f](double t) { return f(t); };
    const double v = ts.integrate(g, lo, hi, rel_tol, &e2, &l2);
    if (std::isfinite(v) && e2 < err) {
      r.value = v;
      r.error_estimate = e2;
      r.converged = e2 <= std::max(rel_tol * l2, 1e-300);
    }
  } catch (const std::exception&) {
  }
  return r;
}

double integrate_or_throw(const std::function<double(double)>& f, double lo,
                          double hi, double rel_tol) {
  auto r = integrate(f, lo, hi, rel_tol);
  if (!r.converged)
    throw QuadratureError("quadrature did not reach requested tolerance",
                          r.error_estimate);
  return r.value;
}

}  // namespace bhlab
