#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "pramsey/rational.hpp"

namespace pramsey {

/// Symmetric, zero-diagonal matrix of squared pairwise distances.
///
/// `values` is always populated; `exact` is present only in rational mode,
/// where it is the source of truth and `values` is its float shadow.
struct SquaredDistanceMatrix {
  int n = 0;
  Eigen::MatrixXd values;
  std::optional<RatMatrix> exact;

  bool rational_mode() const { return exact.has_value(); }

  static SquaredDistanceMatrix from_exact(RatMatrix m);
  static SquaredDistanceMatrix from_values(Eigen::MatrixXd m);

  /// Rejects asymmetry, nonzero diagonal and negative entries.
  void validate() const;
};

/// A finite labeled list of points in a common ambient dimension.
///
/// Coordinates are floats (they are irrational for most of the builders);
/// when a construction knows its squared distances exactly it attaches them
/// as `exact_sq`, and congruence/copy decisions at tol = 0 use those instead
/// of coordinates.
struct PointConfig {
  int dim = 0;
  Eigen::MatrixXd points;           // one row per point
  std::vector<std::string> labels;  // empty, or one per point
  std::optional<RatMatrix> exact_sq;

  int size() const { return static_cast<int>(points.rows()); }
  bool has_labels() const { return !labels.empty(); }
  bool rational_mode() const { return exact_sq.has_value(); }

  Eigen::VectorXd point(int i) const { return points.row(i).transpose(); }

  /// True if some pair of points coincides exactly.
  bool has_coincident_points() const;

  static PointConfig from_rows(Eigen::MatrixXd rows, std::vector<std::string> labels = {});
};

/// Restriction of a config to a subset of its points (indices into `c`),
/// carrying labels and the exact matrix along.
PointConfig subconfig(const PointConfig& c, const std::vector<int>& indices);

}  // namespace pramsey
