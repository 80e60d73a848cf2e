#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "pramsey/combinatorics.hpp"
#include "pramsey/constructions.hpp"
#include "pramsey/geometry.hpp"
#include "pramsey/point_config.hpp"

namespace pramsey::pipeline {

struct PipelineParams {
  std::optional<double> delta;    // spread-approximation tolerance; auto when absent
  std::optional<double> epsilon;  // almost-regularity tolerance; auto when absent
  double margin = 1e-3;           // ratio-separation margin for certificates
  std::uint64_t search_budget = 8000000;  // spread-search work units (axes touched)
  double tol = 1e-9;              // geometric tolerance
  std::uint64_t seed = 0;

  void validate() const;
};

struct SpreadApproximation {
  constructions::SpreadSpec spec;
  std::vector<std::vector<int>> assignments;  // one increasing k-tuple per vertex
  PointConfig s2;                             // the spread points, dim n
  int k = 0;
  int n = 0;
  double residual = 0.0;  // max_i ||aligned y_i - z_i||
  std::uint64_t seed_used = 0;
};

/// Brick containment of a near-regular simplex: nonnegative squared sides
/// u_{jk}, one per vertex pair, solving
///   d_pq^2 = sum_{x not in {p,q}} (u_px + u_qx),
/// with vertex i mapped to the brick vertex whose {j,k} coordinate is
/// sqrt(u_jk) exactly when i is in {j,k}.
struct BrickEmbedding {
  int d = 0;  // simplex dimension
  std::vector<std::pair<int, int>> axis_pairs;  // lexicographic {j,k}
  std::vector<double> u;                        // squared sides, clamped at 0
  std::vector<double> sides;                    // sqrt(u)
  Eigen::MatrixXd vertex_coords;                // (d+1) x C(d+1,2)
  double reconstruction_error = 0.0;

  constructions::BrickSpec brick_spec() const;
};

struct Step1Result {
  PointConfig s1;
  double shrink_beta = 0.0;  // slack / (8 d^2), subtracted from all squared distances
  double slack = 0.0;
  double rho = 0.0;        // circumradius of the input
  double rho_prime = 0.0;  // circumradius of the shrunk simplex, strictly smaller
};

struct PipelineTrace {
  PointConfig input;
  int d = 0;
  Step1Result step1;
  double epsilon_used = 0.0;
  double delta_used = 0.0;
  int delta_rounds = 0;
  SpreadApproximation spread;
  Eigen::MatrixXd residual_sq;  // step-3 targets: input sq minus spread sq
  PointConfig s3;
  double regularity_beta = 0.0;     // center of the step-3 distance window
  double regularity_epsilon = 0.0;  // half-width of that window
  BrickEmbedding brick;
  PointConfig assembled;  // F, congruent to the input
  double final_residual = 0.0;
  double rho_f = 0.0;
  PipelineParams params;
};

struct DensityTrial {
  std::uint64_t seed = 0;
  int sample_size = 0;
  int extracted_size = 0;
  Rat ratio;
  bool ratio_ok = false;
  bool f_free = false;
  bool base_segment_free = false;
  int fiber_count = 0;
};

struct ColoringTrial {
  int host_points = 0;
  int r = 0;
  bool certified = false;
  std::uint64_t colorings_checked = 0;
};

struct PRamseyCertificate {
  Rat mu = Rat(1, 4);
  Rat gamma_used;
  Rat base_a_sq;             // squared length of the reduced segment
  Rat margin_required;
  Rat margin_achieved;
  std::vector<DensityTrial> density_trials;
  std::vector<ColoringTrial> coloring_trials;
  std::uint64_t seed = 0;
};

/// Step 1: subtract slack/(8 d^2) from every squared distance, re-embed, and
/// confirm the result is still a strict simplex with smaller circumradius.
Step1Result step1_shrink(const PointConfig& s, int d);

/// Step 2: find spread points within delta of the (recentered) shrunk
/// simplex. Seeded annealing over tuple assignments alternating with
/// least-squares refit of the weight vector; k and n grow on failure.
SpreadApproximation spread_approximate(const PointConfig& s1_centered, double rho_prime,
                                       double delta, const PipelineParams& params);

/// Step 3: realize a matrix of near-equal distances as an actual simplex and
/// verify the extremal form value is below -beta^2/4.
PointConfig realize_almost_regular(const SquaredDistanceMatrix& dist_sq, double beta,
                                   double epsilon);

/// Step 3b: solve the brick side system for a near-regular simplex.
BrickEmbedding brick_embed(const PointConfig& s3, double tol = 1e-9);

/// Step 4: concatenate the brick image of S3 with S2 and check congruence
/// with the original simplex plus the circumradius ordering rho' < rho(F).
PointConfig assemble_and_verify(const PointConfig& s, const BrickEmbedding& brick,
                                const PointConfig& s2, double tol, double* residual_out = nullptr);

PipelineTrace run_pipeline(const PointConfig& s, const PipelineParams& params);

/// Density-extraction evidence over sampled finite pieces of the witness
/// product (segment configuration for the smallest brick side x remaining
/// factors). Every trial must extract at least a quarter of its sample and
/// be free of copies of the assembled simplex.
PRamseyCertificate pramsey_certificate(const PipelineTrace& trace, int trials, int sample_size,
                                       std::uint64_t seed);

}  // namespace pramsey::pipeline
