#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pramsey/constructions.hpp"
#include "pramsey/geometry.hpp"
#include "pramsey/index_pair.hpp"
#include "pramsey/point_config.hpp"

namespace pramsey::combinatorics {

/// Edge test of the shift graph: {x,y} ~ {y,z} with x < y < z.
bool shift_adjacent(const IndexPair& e, const IndexPair& e2);

/// Exhaustive check over all vertex triples of the shift graph on [n] pairs.
bool verify_triangle_free(int n);

/// Nonnegative rational weights aligned with an item list; stochastic means
/// they sum to exactly 1.
struct WeightVector {
  std::vector<Rat> weights;

  Rat total() const;
  void validate_stochastic() const;
};

struct IndependentSetResult {
  std::vector<int> selected;        // indices into X, an independent set
  Rat weight;                       // sum of selected weights, >= 1/4
  std::vector<int> ground_colors;   // the derandomized 2-coloring, by ground element
  std::vector<int> ground_elements; // increasing, aligned with ground_colors
};

/// Derandomized extractor: walks the ground elements in increasing order,
/// fixing each to the color that maximizes the conditional expectation of
/// the (0,1)-pair weight (ties to color 0). The surviving pairs are an
/// independent set of weight >= 1/4, exactly, in rational arithmetic.
IndependentSetResult weighted_independent_set(const std::vector<IndexPair>& X,
                                              const WeightVector& w);

/// Total assignment of colors 0..r-1 to the points of a host config.
struct Coloring {
  int r = 1;
  std::vector<int> colors;
};

enum class SearchMode { Exhaustive, Sampled };

struct ColoringSearchResult {
  SearchMode mode = SearchMode::Exhaustive;
  bool certified = false;               // exhaustive only: every coloring has a copy
  std::optional<Coloring> counterexample;  // lexicographically first, when found
  std::uint64_t colorings_checked = 0;
  std::uint64_t seed = 0;
  int copies_in_host = 0;
  /// For certified runs: a witness copy per coloring is implied by
  /// `copies_in_host` > 0; we record one monochromatic witness of the
  /// all-zero coloring for the report.
  std::optional<geometry::CongruenceMap> sample_witness;
};

/// Decides (exhaustively) whether every r-coloring of `host` admits a
/// monochromatic congruent copy of `pattern`, or reports the first
/// counterexample coloring. Exhaustive mode requires r^|host| <= 2^25.
ColoringSearchResult monochromatic_copy_search(const PointConfig& host,
                                               const PointConfig& pattern, int r, double tol,
                                               SearchMode mode, std::uint64_t seed = 0,
                                               std::uint64_t samples = 4096);

struct DenseFreeSubset {
  std::vector<int> indices;  // points of V kept in U, ascending
  PointConfig subset;        // the corresponding subconfig
  Rat ratio;                 // |U| / |V| >= 1/4
  std::vector<IndexPair> independent_base;  // base labels of the kept fibers
};

/// Fiber-partition density extraction: groups V by base pair label, feeds
/// the fiber-size weights to the independent-set extractor, and returns the
/// union of the selected fibers. The base projection of the result carries
/// no segment of length a.
DenseFreeSubset extract_dense_free_subset(const PointConfig& V,
                                          const std::vector<IndexPair>& base_labels,
                                          const constructions::SegmentSpec& spec, double tol);

}  // namespace pramsey::combinatorics
