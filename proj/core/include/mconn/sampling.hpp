#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "mconn/expr.hpp"

namespace mconn {

/// Axis-aligned sampling box over the 2n chart coordinates, x block first.
struct Box {
  std::vector<std::array<double, 2>> ranges;  // size 2n, [lo, hi] per coordinate

  int dim() const { return static_cast<int>(ranges.size()) / 2; }
  bool contains(const Point& u) const;
  static Box cube(int n, double lo, double hi);
};

/// Deterministic sample stream: a Mersenne Twister (std::mt19937_64) whose
/// 64-bit words are mapped to doubles through the top 53 bits, so a seed
/// reproduces the identical stream on every platform.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_word() { return gen_(); }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(static_cast<double>(hi - lo + 1) * unit());
  }

 private:
  std::mt19937_64 gen_;
};

/// `count` points drawn coordinate by coordinate (x block first) from the
/// box. Consumes exactly 2n words per point.
std::vector<Point> sample_points(const Box& box, int count, SampleRng& rng);

/// n x n matrix with entries uniform in [-magnitude, magnitude], drawn
/// row-major.
Eigen::MatrixXd sample_matrix(int n, double magnitude, SampleRng& rng);

}  // namespace mconn
