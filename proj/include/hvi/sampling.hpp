#pragma once

#include <cstdint>
#include <vector>

#include "hvi/manifold.hpp"

namespace hvi {

/// Additive-recurrence low-discrepancy sequence (R_d sequence) with a seed
/// offset, used wherever deterministic well-spread samples are needed.
class QuasiRandom {
 public:
  QuasiRandom(int dim, uint64_t seed);

  /// Next point in [0,1)^dim.
  std::vector<double> next();
  double next1();

 private:
  std::vector<double> state_;
  std::vector<double> alpha_;
};

/// Deterministic quasi-uniform unit directions in T_p M. For dim 1 these are
/// {+e, -e}; for dim 2, `count` equally spaced angles; for dim >= 3 a
/// Fibonacci-style spread. Rotated by a seed-dependent offset.
std::vector<Tangent> sphere_directions(const Point& p, int count, uint64_t seed = 0);

/// Deterministic points scattered in the geodesic ball of the given radius
/// around `center` (quasi-random directions and radii).
std::vector<Point> sample_ball(const Point& center, double radius, int count, uint64_t seed);

}  // namespace hvi
