#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace bhlab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct Rectangle {
  Interval first;
  Interval second;
};

enum class CertStatus { pass, fail, undecided };

const char* to_string(CertStatus s);

/// Record of an error-controlled minimization.
///
/// The bound is empirical: min sample minus a Lipschitz allowance estimated from
/// the samples themselves. It is not an interval-arithmetic proof.
struct CertificationReport {
  std::string target_id;
  bool rectangle = false;
  Interval domain_first;
  Interval domain_second;  // only meaningful when rectangle
  double certified_infimum_lower_bound = 0.0;
  double min_sample = 0.0;
  double argmin_first = 0.0;
  double argmin_second = 0.0;
  double threshold = 0.0;
  long samples_used = 0;
  double lipschitz_estimate = 0.0;
  CertStatus status = CertStatus::undecided;
  bool pass = false;
  std::string method;
};

struct CertifyOptions {
  double safety = 2.0;
  /// Points per axis on the coarsest level (odd, >= 3).
  long initial_points = 65;
  /// Stop refining once pass or fail is decided.
  bool stop_when_decided = true;
};

/// Throws std::invalid_argument when budget < 1000.
CertificationReport certify_infimum(const std::string& id,
                                    const std::function<double(double)>& f,
                                    Interval domain, double threshold, long budget,
                                    const CertifyOptions& opt = {});

CertificationReport certify_infimum(const std::string& id,
                                    const std::function<double(double, double)>& f,
                                    Rectangle domain, double threshold, long budget,
                                    const CertifyOptions& opt = {});

/// inf_{t>0} Phi_a(t) > -1/4 for each a. Core search runs in log t; the tails
/// use the analytic limits of Phi_a.
std::vector<CertificationReport> verify_phi_bound(std::span<const double> a_samples,
                                                  long budget_per_a = 20000);

/// v(t) - (1 - 2/t^2) > 0 on [sqrt 2, sqrt 6].
CertificationReport verify_v_inequality(long budget = 100000);

/// Positivity of the v-based lower bound of gamma_a on the compact rectangle.
CertificationReport verify_gamma_rectangle(long budget = 2000000);

/// Positivity of gamma_a itself (with w_a) on the same rectangle.
CertificationReport verify_gamma_rectangle_exact(long budget = 2000000);

inline constexpr double kGammaRectAMin = -43.3272;
inline constexpr double kGammaRectAMax = -2.96767;
inline constexpr double kGammaRectTMin = 1.0;
inline constexpr double kGammaRectTMax = 5.1;

struct VLandmarks {
  double v_at_5_1 = 0.0;
  double dv_at_5_1 = 0.0;
  double min_value = 0.0;
  double argmin = 0.0;
};

VLandmarks v_landmarks();

/// One-line text record: key=value pairs separated by spaces.
std::string to_record(const CertificationReport& r);

}  // namespace bhlab
