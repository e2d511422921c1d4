#include "mconn/sampling.hpp"

#include <stdexcept>

namespace mconn {

bool Box::contains(const Point& u) const {
  const int n = dim();
  if (u.dim() != n) return false;
  for (int c = 0; c < 2 * n; ++c) {
    const double v = u.coordinate(c);
    if (v < ranges[static_cast<std::size_t>(c)][0] || v > ranges[static_cast<std::size_t>(c)][1])
      return false;
  }
  return true;
}

Box Box::cube(int n, double lo, double hi) {
  Box out;
  out.ranges.assign(static_cast<std::size_t>(2 * n), {lo, hi});
  return out;
}

std::vector<Point> sample_points(const Box& box, int count, SampleRng& rng) {
  const int n = box.dim();
  if (n < 1) throw std::invalid_argument("sampling box has no coordinates");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Point u;
    u.x.resize(static_cast<std::size_t>(n));
    u.y.resize(static_cast<std::size_t>(n));
    for (int c = 0; c < 2 * n; ++c) {
      const auto& r = box.ranges[static_cast<std::size_t>(c)];
      const double v = rng.uniform(r[0], r[1]);
      if (c < n)
        u.x[static_cast<std::size_t>(c)] = v;
      else
        u.y[static_cast<std::size_t>(c - n)] = v;
    }
    out.push_back(std::move(u));
  }
  return out;
}

Eigen::MatrixXd sample_matrix(int n, double magnitude, SampleRng& rng) {
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = rng.uniform(-magnitude, magnitude);
  return out;
}

}  // namespace mconn
