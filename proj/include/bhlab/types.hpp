#pragma once

#include <array>
#include <functional>

namespace bhlab {

/// Tangential coordinates x. Only the first n entries are meaningful.
using XPoint = std::array<double, 2>;
using Vec2 = std::array<double, 2>;
/// Full-space vector laid out as (x1, x2, y); x2 is unused when n = 1.
using Vec3 = std::array<double, 3>;

using ScalarSampler = std::function<double(const XPoint&, double)>;
using VecSampler = std::function<Vec3(const XPoint&, double)>;

enum class Parity { odd, even, none };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    default: return "none";
  }
}

}  // namespace bhlab
