#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bhlab/types.hpp"

namespace bhlab {

enum class Shape { half_rectangle, half_disk };
enum class FaceKind { sigma, outer };

const char* to_string(Shape s);

/// Axis numbering used throughout: 0 = x1, 1 = x2, 2 = y.
inline constexpr int kAxisY = 2;

struct BoundaryFace {
  std::size_t cell = 0;
  int axis = 0;
  int side = 0;  // -1 or +1
  FaceKind kind = FaceKind::outer;
  Vec3 midpoint{};
};

/// Cell-centered grid of the upper half of [-R,R]^n x (0,R] or of the half ball
/// of radius R. Cell centers sit at y = (j + 1/2) h, so Sigma carries no unknowns.
class HalfGrid {
 public:
  HalfGrid(int n, Shape shape, double h, double extent = 1.0);

  int n() const { return n_; }
  Shape shape() const { return shape_; }
  double h() const { return h_; }
  double extent() const { return extent_; }
  /// Cells per tangential axis and along y.
  int cells_x() const { return nx_; }
  int cells_y() const { return ny_; }
  std::size_t size() const { return cells_.size(); }

  /// (ix, iz, iy); iz is 0 when n = 1.
  const std::array<int, 3>& index(std::size_t c) const { return cells_[c]; }
  /// Active cell at the given index or -1.
  long find(int ix, int iz, int iy) const;
  long find(const std::array<int, 3>& idx) const { return find(idx[0], idx[1], idx[2]); }

  XPoint x(std::size_t c) const;
  double y(std::size_t c) const { return (cells_[c][2] + 0.5) * h_; }
  Vec3 center(std::size_t c) const;
  /// Coordinate of cell index i along a tangential axis.
  double coord_x(int i) const { return -extent_ + (i + 0.5) * h_; }

  const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }
  std::size_t count_faces(FaceKind k) const;

  /// One-line description used in CSV headers.
  std::string describe() const;

 private:
  int n_;
  Shape shape_;
  double h_;
  double extent_;
  int nx_, nz_, ny_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<long> lookup_;
  std::vector<BoundaryFace> faces_;
};

/// Throws InvalidSpacingError unless extent/h is an integer and h <= extent/4.
HalfGrid build_half_grid(int n, Shape shape, double h, double extent = 1.0);

/// Plane curve with a chosen unit normal. Curvature is signed so that it is
/// positive when the curve bends toward the normal.
struct EmbeddedCurve {
  std::function<Vec2(double)> position;
  std::function<Vec2(double)> velocity;
  std::function<Vec2(double)> acceleration;
  double t_min = 0.0;
  double t_max = 1.0;
  bool closed = false;
  /// +1: normal is the tangent rotated by +90 degrees; -1: by -90 degrees.
  double normal_sign = 1.0;

  double speed(double t) const;
  Vec2 normal(double t) const;
  double curvature(double t) const;
  /// Z(t, y) = psi(t) + y nu(t).
  Vec2 fermi_map(double t, double y) const;

  static EmbeddedCurve line(Vec2 origin, Vec2 direction, double t_min = -1.0, double t_max = 1.0);
  /// Counterclockwise circle; unit speed when unit_speed, else angle parameter.
  static EmbeddedCurve circle(Vec2 center, double radius, bool inward_normal,
                              bool unit_speed = true);
};

/// sqrt(det g^y) = |psi'| (1 - y kappa). Throws ChartViolationError when y kappa >= 1.
double fermi_mu(const EmbeddedCurve& c, double t, double y);

/// Throws ChartViolationError unless y_max * sup|kappa| < 1.
void check_tubular_radius(const EmbeddedCurve& c, double y_max);

struct MeanCurvatureCheck {
  double analytic = 0.0;
  double numeric = 0.0;
  double residual = 0.0;
};

/// kappa/(1 - y kappa) against -(d/dy) mu / mu by central differences.
MeanCurvatureCheck mean_curvature_check(const EmbeddedCurve& c, double t, double y,
                                        double step = 1e-4);

struct SignedDistance {
  double d = 0.0;
  double foot = 0.0;
};

/// Throws AmbiguousProjectionError when two distinct feet are equidistant.
SignedDistance signed_distance(const EmbeddedCurve& c, Vec2 X);

}  // namespace bhlab
