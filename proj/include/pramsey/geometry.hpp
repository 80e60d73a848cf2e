#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "pramsey/point_config.hpp"

namespace pramsey::geometry {

/// Result of testing a squared-distance matrix for negative type.
///
/// `slack` is the largest g such that the off-diagonal quadratic form stays
/// <= -g over all unit vectors orthogonal to the all-ones direction. The
/// matrix is of negative type iff slack >= 0, strictly (a simplex) iff > 0.
struct NegativeTypeReport {
  double slack = 0.0;
  Eigen::VectorXd witness_lambda;  // admissible lambda attaining the extreme
  double form_at_witness = 0.0;    // equals -slack up to solver tolerance
};

/// Raised by embed_distance_matrix when the matrix is not of negative type
/// within tolerance; carries the violating direction.
class NotEmbeddableError : public Error {
 public:
  NotEmbeddableError(const std::string& what, Eigen::VectorXd witness)
      : Error(ErrorKind::NotEmbeddable, what), witness_lambda(std::move(witness)) {}

  Eigen::VectorXd witness_lambda;
};

/// A matched pair of point sets: `correspondence[i]` is the host index
/// assigned to pattern point i. `max_residual` is the worst absolute
/// distance mismatch over pairs.
struct CongruenceMap {
  std::vector<int> correspondence;
  double max_residual = 0.0;
};

SquaredDistanceMatrix squared_distance_matrix(const PointConfig& config);

NegativeTypeReport negative_type_slack(const SquaredDistanceMatrix& m);

/// Classical embedding of a negative-type matrix: points whose squared
/// distances reproduce `m` within `tol` per entry. Spectral components below
/// 1e-12 of the largest are treated as zero; the retained count is the
/// embedding dimension.
PointConfig embed_distance_matrix(const SquaredDistanceMatrix& m, double tol);

struct Circumsphere {
  double radius = 0.0;
  Eigen::VectorXd center;
};

/// Center equidistant from all points within the affine hull. Coincident
/// points and affinely dependent configs with no consistent center are
/// degenerate-config errors.
Circumsphere circumsphere(const PointConfig& config);

double diameter(const PointConfig& config);

/// Full-size congruence between equal-size configs, or nullopt. The search
/// prunes by sorted distance multisets and returns the lexicographically
/// first correspondence.
std::optional<CongruenceMap> congruent(const PointConfig& a, const PointConfig& b, double tol);

/// All (up to `limit`, 0 = unlimited) placements of `pattern` inside `host`
/// realizing every pairwise distance within `tol`. One canonical map per
/// host subset, enumerated in lexicographic order of the correspondence.
std::vector<CongruenceMap> find_copies(const PointConfig& host, const PointConfig& pattern,
                                       double tol, int limit = 0);

/// Coordinate-concatenation product; squared distances add.
PointConfig product(const PointConfig& a, const PointConfig& b);

}  // namespace pramsey::geometry
