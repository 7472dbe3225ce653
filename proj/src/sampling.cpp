#include "hvi/sampling.hpp"

#include <cmath>

namespace hvi {

namespace {

// splitmix64, used to derive deterministic fractional offsets from seeds.
uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double unit_from(uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

// Generalised golden ratios: unique positive root of x^{d+1} = x + 1.
double harmonious(int d) {
  double x = 1.5;
  for (int i = 0; i < 64; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}

}  // namespace

QuasiRandom::QuasiRandom(int dim, uint64_t seed) {
  state_.resize(dim);
  alpha_.resize(dim);
  const double g = harmonious(dim);
  uint64_t s = seed;
  for (int i = 0; i < dim; ++i) {
    alpha_[i] = std::fmod(std::pow(1.0 / g, i + 1), 1.0);
    state_[i] = unit_from(splitmix64(s));
  }
}

std::vector<double> QuasiRandom::next() {
  for (std::size_t i = 0; i < state_.size(); ++i) {
    state_[i] += alpha_[i];
    if (state_[i] >= 1.0) state_[i] -= 1.0;
  }
  return state_;
}

double QuasiRandom::next1() {
  state_[0] += alpha_[0];
  if (state_[0] >= 1.0) state_[0] -= 1.0;
  return state_[0];
}

std::vector<Tangent> sphere_directions(const Point& p, int count, uint64_t seed) {
  const auto basis = tangent_basis(p);
  const int dim = static_cast<int>(basis.size());
  std::vector<Tangent> dirs;
  uint64_t s = seed;
  const double offset = unit_from(splitmix64(s));
  if (dim == 1) {
    dirs.push_back(basis[0]);
    dirs.push_back(-basis[0]);
    return dirs;
  }
  if (dim == 2) {
    dirs.reserve(count);
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * (static_cast<double>(i) / count + offset);
      dirs.push_back(std::cos(a) * basis[0] + std::sin(a) * basis[1]);
    }
    return dirs;
  }
  // Fibonacci spiral on S^{dim-1}; for dim > 3 the trailing coordinates reuse
  // the low-discrepancy recurrence.
  QuasiRandom qr(dim, seed);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  dirs.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd c(dim);
    if (dim == 3) {
      const double z = 1.0 - 2.0 * (i + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i + 2.0 * M_PI * offset;
      c << r * std::cos(a), r * std::sin(a), z;
    } else {
      auto u = qr.next();
      for (int j = 0; j < dim; ++j) c[j] = u[j] - 0.5;
      if (c.norm() < 1e-12) c[0] = 1.0;
      c.normalize();
    }
    Tangent t = zero_tangent(p);
    for (int j = 0; j < dim; ++j) t = t + c[j] * basis[j];
    dirs.push_back(std::move(t));
  }
  return dirs;
}

std::vector<Point> sample_ball(const Point& center, double radius, int count, uint64_t seed) {
  const int dim = center.manifold.dim;
  QuasiRandom qr(dim + 1, seed);
  const auto basis = tangent_basis(center);
  std::vector<Point> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto u = qr.next();
    // Direction from the first dim coordinates, radius from the last.
    Eigen::VectorXd c(dim);
    for (int j = 0; j < dim; ++j) c[j] = u[j] - 0.5;
    if (c.norm() < 1e-12) c[0] = 1.0;
    c.normalize();
    const double r = radius * std::sqrt(u[dim]);
    Tangent t = zero_tangent(center);
    for (int j = 0; j < dim; ++j) t = t + (r * c[j]) * basis[j];
    pts.push_back(exp_map(center, t));
  }
  return pts;
}

}  // namespace hvi
