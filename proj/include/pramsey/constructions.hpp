#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pramsey/index_pair.hpp"
#include "pramsey/point_config.hpp"

namespace pramsey::constructions {

/// Parameters of the segment configuration for a segment of length a: the
/// point for pair {i,j} is scale*e_i - scale*ratio*e_j. Both a^2 and the
/// ratio are exact rationals, so every squared distance of the construction
/// is exact even though the coordinates are not.
struct SegmentSpec {
  Rat a_sq;   // squared segment length, > 0
  Rat gamma;  // ratio parameter, > 0

  SegmentSpec(Rat a_squared, Rat ratio);

  double a() const;
  Rat scale_sq() const;   // a^2 / (2(1 + gamma + gamma^2))
  double scale() const;   // the coordinate scale, irrational in general

  /// The full squared-distance value set {a^2, a^2/q, (1+g^2)a^2/q, g^2 a^2/q}
  /// with q = 1 + gamma + gamma^2.
  std::vector<Rat> distance_value_set() const;
};

/// Squared distance between the points of two pairs, by case:
/// equal 0; shared lo; shared hi; shift-adjacent (= a^2); disjoint.
Rat predicted_sq_distance(const IndexPair& e, const IndexPair& e2, const SegmentSpec& spec);

PointConfig segment_config_points(const SegmentSpec& spec, const std::vector<IndexPair>& pairs);

/// Spread parameters: the weight vector c applied to increasing k-tuples.
struct SpreadSpec {
  std::vector<double> c;
  std::optional<std::vector<Rat>> c_exact;  // set when weights are exact

  int k() const { return static_cast<int>(c.size()); }
  double norm() const;
};

/// One point per increasing k-tuple of `ground`; every point has norm ||c||.
PointConfig spread_points(const SpreadSpec& spec, const std::vector<int>& ground);

struct BrickSpec {
  std::vector<double> sides;
  std::optional<std::vector<Rat>> side_squares;  // set when sides^2 are exact

  static BrickSpec from_exact_squares(std::vector<Rat> squares);
  static BrickSpec from_sides(std::vector<double> sides);
  int dim() const { return static_cast<int>(sides.size()); }
};

/// All 2^d vertices, labeled by the subset of axes at full side length.
PointConfig brick_points(const BrickSpec& spec);

/// Positive rationals in the fixed enumeration order 1, 2, 1/2, 3, 1/3,
/// 3/2, 2/3, 4, 1/4, ... (per Stern-Brocot level, values > 1 descending,
/// each followed by its reciprocal).
std::vector<Rat> gamma_candidates(int count);

struct GammaChoice {
  Rat gamma;
  Rat margin_achieved;  // the worst separation over the checked values
  int candidates_tried = 0;
};

/// First enumerated ratio gamma whose three gamma-dependent squared-distance
/// values stay at least `margin` away from every difference s - t with
/// s in pattern_sq + {0}, t in host_sq + {0}. This finite separation is what
/// makes the projection dichotomy hold for the given distance sets.
GammaChoice choose_gamma(const Rat& a_sq, const std::vector<Rat>& host_sq_dists,
                         const std::vector<Rat>& pattern_sq_dists, const Rat& margin,
                         int budget = 4096);

/// Lazy description of a countable configuration; materializes to finite
/// truncations over the ground set [n].
struct ConfigDescriptor {
  struct Product {
    std::shared_ptr<ConfigDescriptor> left;
    std::shared_ptr<ConfigDescriptor> right;
  };

  enum class Kind { Finite, Segment, Spread, Brick, Product } kind = Kind::Finite;

  // exactly one of these is meaningful, per kind
  PointConfig finite;
  std::optional<SegmentSpec> segment;
  std::optional<SpreadSpec> spread;
  std::optional<BrickSpec> brick;
  std::optional<Product> prod;

  static ConfigDescriptor make_finite(PointConfig c);
  static ConfigDescriptor make_segment(SegmentSpec s);
  static ConfigDescriptor make_spread(SpreadSpec s);
  static ConfigDescriptor make_brick(BrickSpec b);
  static ConfigDescriptor make_product(ConfigDescriptor left, ConfigDescriptor right);
};

/// Finite truncation at ground set [n]: Segment -> all pairs, Spread -> all
/// k-tuples, Product -> product of the factors at the same n.
PointConfig materialize(const ConfigDescriptor& desc, int n);

}  // namespace pramsey::constructions
