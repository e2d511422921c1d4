#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mconn/geometry.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"

namespace mconn {

enum class ProblemMode { Lagrangian, Generalized };

struct Tolerances {
  double algebraic = 1e-12;  // identity-level checks
  double derived = 1e-9;     // checks routed through g^{-1} and order-3 jets
};

/// Parsed problem-definition file: flat `key = value` text, `#` comments.
///
///   dim = 2
///   mode = lagrangian | generalized
///   L = <expr>                     (lagrangian mode)
///   g.<i>.<j> = <expr>             (generalized mode, upper triangle i <= j)
///   G.<i> = <expr>                 (generalized mode)
///   domain.default = <lo> <hi>
///   domain.x<i> = <lo> <hi>        (overrides, same for y<i>)
///   samples = <int>
///   seed = <uint64>
///   points = x.. y.. ; x.. y.. ; ...   (optional explicit sample list)
///   tol.algebraic = <real>
///   tol.derived = <real>
struct ProblemDefinition {
  int dim = 0;
  ProblemMode mode = ProblemMode::Lagrangian;
  std::string lagrangian_text;             // lagrangian mode
  std::vector<std::string> metric_texts;   // upper triangle, row-major
  std::vector<std::string> spray_texts;    // n entries
  Box domain;                              // 2n ranges
  int samples = 100;
  std::uint64_t seed = 1;
  std::vector<Point> explicit_points;      // non-empty overrides sampling
  Tolerances tol;
};

ProblemDefinition parse_problem(std::string_view text);
ProblemDefinition load_problem(const std::filesystem::path& path);

/// The definition with its fields built: expressions parsed, derived
/// structures constructed. Immutable; safe to share across sweep threads.
class ProblemInstance {
 public:
  explicit ProblemInstance(ProblemDefinition def);

  const ProblemDefinition& definition() const noexcept { return def_; }
  int dim() const noexcept { return def_.dim; }
  ProblemMode mode() const noexcept { return def_.mode; }

  /// Lagrangian-mode space; throws ValidationError in generalized mode.
  const LagrangeSpace& lagrange() const;

  /// The metric/spray pair driving the checks: the declared fields in
  /// generalized mode, the derived canonic pair in lagrangian mode.
  const GLMetricField& metric() const noexcept { return *metric_; }
  const SemisprayField& spray() const noexcept { return *spray_; }

  /// Sample points: the explicit list if given, else `count` points drawn
  /// from the box with the definition seed.
  std::vector<Point> sample(int count_override = -1,
                            std::optional<std::uint64_t> seed_override = {}) const;

 private:
  ProblemDefinition def_;
  std::optional<LagrangeSpace> lagrange_;
  std::optional<GLMetricField> metric_storage_;
  std::optional<SemisprayField> spray_storage_;
  const GLMetricField* metric_ = nullptr;
  const SemisprayField* spray_ = nullptr;
};

}  // namespace mconn
