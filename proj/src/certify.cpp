#include "bhlab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "bhlab/special_functions.hpp"

namespace bhlab {

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::pass: return "pass";
    case CertStatus::fail: return "fail";
    default: return "undecided";
  }
}

namespace {

constexpr const char* kMethod =
    "nested dense grid; per-cell bound = min corner sample - safety*L*h/2 with L the "
    "largest observed slope around the cell (numerical certificate, not interval arithmetic)";

void decide(CertificationReport& r) {
  if (r.certified_infimum_lower_bound > r.threshold)
    r.status = CertStatus::pass;
  else if (r.min_sample <= r.threshold)
    r.status = CertStatus::fail;
  else
    r.status = CertStatus::undecided;
  r.pass = r.status == CertStatus::pass;
}

void check_budget(long budget, long initial) {
  if (budget < 1000) throw std::invalid_argument("certify_infimum: budget must be >= 1000");
  if (initial < 3 || initial % 2 == 0)
    throw std::invalid_argument("certify_infimum: initial_points must be odd and >= 3");
}

}  // namespace

CertificationReport certify_infimum(const std::string& id,
                                    const std::function<double(double)>& f,
                                    Interval dom, double threshold, long budget,
                                    const CertifyOptions& opt) {
  check_budget(budget, opt.initial_points);
  CertificationReport r;
  r.target_id = id;
  r.domain_first = dom;
  r.threshold = threshold;
  r.method = kMethod;

  long n = opt.initial_points;
  std::vector<double> vals(n);
  for (long i = 0; i < n; ++i) vals[i] = f(dom.lo + (dom.hi - dom.lo) * double(i) / double(n - 1));
  r.samples_used = n;
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    const double h = (dom.hi - dom.lo) / double(n - 1);
    long imin = 0;
    std::vector<double> slope(n - 1);
    for (long i = 0; i < n; ++i) {
      if (!std::isfinite(vals[i])) throw std::domain_error("certify_infimum: non-finite sample");
      if (vals[i] < vals[imin]) imin = i;
      if (i + 1 < n) slope[i] = std::fabs(vals[i + 1] - vals[i]) / h;
    }
    // Each cell is bounded with the largest slope seen in it and its two neighbours.
    double level_bound = std::numeric_limits<double>::infinity();
    for (long i = 0; i + 1 < n; ++i) {
      double L = slope[i];
      if (i > 0) L = std::max(L, slope[i - 1]);
      if (i + 2 < n) L = std::max(L, slope[i + 1]);
      level_bound = std::min(level_bound, std::min(vals[i], vals[i + 1]) - opt.safety * L * h / 2.0);
    }
    r.min_sample = vals[imin];
    r.argmin_first = dom.lo + h * double(imin);
    r.lipschitz_estimate = *std::max_element(slope.begin(), slope.end());
    best = std::max(best, level_bound);
    r.certified_infimum_lower_bound = std::min(best, r.min_sample);
    decide(r);
    if (opt.stop_when_decided && r.status != CertStatus::undecided) break;
    const long n2 = 2 * n - 1;
    if (r.samples_used + (n2 - n) > budget) break;
    std::vector<double> next(n2);
    const double h2 = h / 2.0;
    for (long i = 0; i < n2; ++i)
      next[i] = (i % 2 == 0) ? vals[i / 2] : f(dom.lo + h2 * double(i));
    r.samples_used += n2 - n;
    vals.swap(next);
    n = n2;
  }
  return r;
}

CertificationReport certify_infimum(const std::string& id,
                                    const std::function<double(double, double)>& f,
                                    Rectangle dom, double threshold, long budget,
                                    const CertifyOptions& opt) {
  check_budget(budget, opt.initial_points);
  CertificationReport r;
  r.target_id = id;
  r.rectangle = true;
  r.domain_first = dom.first;
  r.domain_second = dom.second;
  r.threshold = threshold;
  r.method = kMethod;

  const double w1 = dom.first.hi - dom.first.lo;
  const double w2 = dom.second.hi - dom.second.lo;
  long n = opt.initial_points;
  // Row-major: index i*n + j, i along the first axis.
  std::vector<double> vals(n * n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      vals[i * n + j] = f(dom.first.lo + w1 * double(i) / double(n - 1),
                          dom.second.lo + w2 * double(j) / double(n - 1));
  r.samples_used = n * n;
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    const double h1 = w1 / double(n - 1);
    const double h2 = w2 / double(n - 1);
    long kmin = 0;
    // s1(i,j): slope along the first axis between (i,j) and (i+1,j); s2 likewise.
    std::vector<double> s1((n - 1) * n), s2(n * (n - 1));
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        const double v = vals[i * n + j];
        if (!std::isfinite(v)) throw std::domain_error("certify_infimum: non-finite sample");
        if (v < vals[kmin]) kmin = i * n + j;
        if (i + 1 < n) s1[i * n + j] = std::fabs(vals[(i + 1) * n + j] - v) / h1;
        if (j + 1 < n) s2[i * (n - 1) + j] = std::fabs(vals[i * n + j + 1] - v) / h2;
      }
    }
    double level_bound = std::numeric_limits<double>::infinity();
    for (long i = 0; i + 1 < n; ++i) {
      for (long j = 0; j + 1 < n; ++j) {
        double L1 = 0.0, L2 = 0.0;
        for (long ii = std::max(0L, i - 1); ii <= std::min(n - 2, i + 1); ++ii)
          for (long jj = j; jj <= j + 1; ++jj) L1 = std::max(L1, s1[ii * n + jj]);
        for (long ii = i; ii <= i + 1; ++ii)
          for (long jj = std::max(0L, j - 1); jj <= std::min(n - 2, j + 1); ++jj)
            L2 = std::max(L2, s2[ii * (n - 1) + jj]);
        const double m = std::min({vals[i * n + j], vals[i * n + j + 1], vals[(i + 1) * n + j],
                                   vals[(i + 1) * n + j + 1]});
        level_bound = std::min(level_bound, m - opt.safety * (L1 * h1 + L2 * h2) / 2.0);
      }
    }
    r.min_sample = vals[kmin];
    r.argmin_first = dom.first.lo + h1 * double(kmin / n);
    r.argmin_second = dom.second.lo + h2 * double(kmin % n);
    r.lipschitz_estimate = std::max(*std::max_element(s1.begin(), s1.end()),
                                    *std::max_element(s2.begin(), s2.end()));
    best = std::max(best, level_bound);
    r.certified_infimum_lower_bound = std::min(best, r.min_sample);
    decide(r);
    if (opt.stop_when_decided && r.status != CertStatus::undecided) break;
    const long n2 = 2 * n - 1;
    if (r.samples_used + (n2 * n2 - n * n) > budget) break;
    std::vector<double> next(n2 * n2);
    for (long i = 0; i < n2; ++i)
      for (long j = 0; j < n2; ++j)
        next[i * n2 + j] = (i % 2 == 0 && j % 2 == 0)
                               ? vals[(i / 2) * n + j / 2]
                               : f(dom.first.lo + h1 / 2.0 * double(i),
                                   dom.second.lo + h2 / 2.0 * double(j));
    r.samples_used += n2 * n2 - n * n;
    vals.swap(next);
    n = n2;
  }
  return r;
}

std::vector<CertificationReport> verify_phi_bound(std::span<const double> a_samples,
                                                  long budget_per_a) {
  std::vector<CertificationReport> out;
  for (double a : a_samples) {
    if (!(a < 1.0)) throw std::invalid_argument("verify_phi_bound: a must be < 1");
    // Coarse log scan locating where Phi_a stops being monotone.
    const int scan = 801;
    const double s_lo = std::log(1e-4), s_hi = std::log(1e4);
    std::vector<double> ph(scan);
    for (int i = 0; i < scan; ++i)
      ph[i] = phi_big(a, std::exp(s_lo + (s_hi - s_lo) * i / (scan - 1)));
    int first = -1, last = -1;
    const double noise = 1e-12;
    int prev_sign = 0;
    for (int i = 0; i + 1 < scan; ++i) {
      const double d = ph[i + 1] - ph[i];
      const int sg = d > noise ? 1 : (d < -noise ? -1 : 0);
      if (sg != 0 && prev_sign != 0 && sg != prev_sign) {
        if (first < 0) first = i;
        last = i;
      }
      if (sg != 0) prev_sign = sg;
    }
    double t_lo = 1e-3, t_hi = 1e3;
    if (first >= 0) {
      const double t_first = std::exp(s_lo + (s_hi - s_lo) * first / (scan - 1));
      const double t_last = std::exp(s_lo + (s_hi - s_lo) * (last + 1) / (scan - 1));
      // 5% guard band beyond the observed sign changes of Phi_a'.
      t_lo = std::min(t_lo, t_first / 1.05);
      t_hi = std::max(t_hi, t_last * 1.05);
    }
    char id[64];
    std::snprintf(id, sizeof id, "phi_a=%.12g", a);
    auto core = certify_infimum(
        id, [a](double s) { return phi_big(a, std::exp(s)); },
        Interval{std::log(t_lo), std::log(t_hi)}, -0.25, budget_per_a - scan);
    // Monotone tails: the infimum there lies between the endpoint value and the limit.
    const double head = std::min(phi_big(a, t_lo), phi_big_limit_zero(a));
    const double tail = std::min(phi_big(a, t_hi), phi_big_limit_infinity(a));
    core.certified_infimum_lower_bound =
        std::min({core.certified_infimum_lower_bound, head, tail});
    core.min_sample = std::min({core.min_sample, head, tail});
    core.samples_used += scan + 2;
    core.domain_first = Interval{0.0, std::numeric_limits<double>::infinity()};
    core.argmin_first = std::exp(core.argmin_first);
    char note[160];
    std::snprintf(note, sizeof note,
                  "; core in log t on [%.6g, %.6g], tails bounded by analytic limits", t_lo, t_hi);
    core.method += note;
    decide(core);
    out.push_back(core);
  }
  return out;
}

CertificationReport verify_v_inequality(long budget) {
  return certify_infimum(
      "v_minus_z", [](double t) { return v_limit(t) - (1.0 - 2.0 / (t * t)); },
      Interval{std::sqrt(2.0), std::sqrt(6.0)}, 0.0, budget);
}

namespace {
CertificationReport gamma_rect(const std::string& id, bool exact, long budget) {
  // v depends on t only; cache it across the a direction.
  std::map<double, double> vcache;
  auto f = [&](double a, double t) {
    if (exact) return gamma_small(a, t);
    auto it = vcache.find(t);
    if (it == vcache.end()) it = vcache.emplace(t, v_limit(t)).first;
    const double v = it->second;
    const double t2 = t * t;
    const double q = (-a + t2) / t2;
    return 2.0 * a * a * (v - 0.5) * (v - 0.5) + a * (2.0 - a) / 4.0 + a * a / (2.0 * t2) +
           (0.999 / 4.0) * q * q;
  };
  return certify_infimum(id, f,
                         Rectangle{{kGammaRectAMin, kGammaRectAMax}, {kGammaRectTMin, kGammaRectTMax}},
                         0.0, budget);
}
}  // namespace

CertificationReport verify_gamma_rectangle(long budget) {
  return gamma_rect("gamma_rectangle", false, budget);
}

CertificationReport verify_gamma_rectangle_exact(long budget) {
  return gamma_rect("gamma_rectangle_exact", true, budget);
}

VLandmarks v_landmarks() {
  VLandmarks L;
  L.v_at_5_1 = v_limit(5.1);
  L.dv_at_5_1 = v_limit_derivative(5.1);
  // Coarse scan then golden section around the best sample.
  double best_t = 1.0, best_v = v_limit(1.0);
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.5 + 5.5 * i / 400.0;
    const double v = v_limit(t);
    if (v < best_v) best_v = v, best_t = t;
  }
  double lo = best_t - 5.5 / 400.0, hi = best_t + 5.5 / 400.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = v_limit(c), fd = v_limit(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      hi = d, d = c, fd = fc;
      c = hi - g * (hi - lo), fc = v_limit(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + g * (hi - lo), fd = v_limit(d);
    }
  }
  L.argmin = 0.5 * (lo + hi);
  L.min_value = v_limit(L.argmin);
  return L;
}

std::string to_record(const CertificationReport& r) {
  char buf[512];
  std::string dom;
  if (r.rectangle) {
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g]x[%.12g,%.12g]", r.domain_first.lo,
                  r.domain_first.hi, r.domain_second.lo, r.domain_second.hi);
  } else {
    std::snprintf(buf, sizeof buf, "[%.12g,%.12g]", r.domain_first.lo, r.domain_first.hi);
  }
  dom = buf;
  std::snprintf(buf, sizeof buf,
                "target_id=%s domain=%s bound=%.12g min_sample=%.12g threshold=%.12g "
                "samples=%ld lipschitz=%.12g status=%s pass=%s",
                r.target_id.c_str(), dom.c_str(), r.certified_infimum_lower_bound, r.min_sample,
                r.threshold, r.samples_used, r.lipschitz_estimate, to_string(r.status),
                r.pass ? "true" : "false");
  return std::string(buf) + " method=\"" + r.method + "\"";
}

}  // namespace bhlab
