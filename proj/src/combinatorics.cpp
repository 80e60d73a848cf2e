#include "pramsey/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pramsey/detail/rng.hpp"

namespace pramsey::combinatorics {

bool shift_adjacent(const IndexPair& e, const IndexPair& e2) {
  e.validate();
  e2.validate();
  return e.hi == e2.lo || e2.hi == e.lo;
}

bool verify_triangle_free(int n) {
  if (n < 3) raise(ErrorKind::InvalidInput, "ground size must be >= 3");
  if (n > 12) raise(ErrorKind::SizeLimit, "exhaustive triple check capped at n = 12");
  std::vector<IndexPair> verts;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) verts.emplace_back(i, j);
  const int v = static_cast<int>(verts.size());
  std::vector<std::vector<bool>> adj(v, std::vector<bool>(v, false));
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j) adj[i][j] = adj[j][i] = shift_adjacent(verts[i], verts[j]);
  for (int i = 0; i < v; ++i)
    for (int j = i + 1; j < v; ++j) {
      if (!adj[i][j]) continue;
      for (int k = j + 1; k < v; ++k)
        if (adj[j][k] && adj[i][k]) return false;
    }
  return true;
}

Rat WeightVector::total() const {
  Rat t(0);
  for (const auto& w : weights) t += w;
  return t;
}

void WeightVector::validate_stochastic() const {
  for (const auto& w : weights)
    if (w.is_negative()) raise(ErrorKind::InvalidInput, "weights must be nonnegative");
  if (total() != Rat(1))
    raise(ErrorKind::InvalidInput, "weight vector must sum to exactly 1");
}

IndependentSetResult weighted_independent_set(const std::vector<IndexPair>& X,
                                              const WeightVector& w) {
  if (w.weights.size() != X.size())
    raise(ErrorKind::InvalidInput, "one weight per pair required");
  for (const auto& e : X) e.validate();
  w.validate_stochastic();

  // ground elements in increasing order
  std::vector<int> ground;
  for (const auto& e : X) {
    ground.push_back(e.lo);
    ground.push_back(e.hi);
  }
  std::sort(ground.begin(), ground.end());
  ground.erase(std::unique(ground.begin(), ground.end()), ground.end());
  std::map<int, int> ground_index;
  for (std::size_t i = 0; i < ground.size(); ++i) ground_index[ground[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> touching(ground.size());
  for (std::size_t p = 0; p < X.size(); ++p) {
    touching[ground_index[X[p].lo]].push_back(static_cast<int>(p));
    touching[ground_index[X[p].hi]].push_back(static_cast<int>(p));
  }

  // -1 = uncolored; pair survives iff lo gets 0 and hi gets 1
  std::vector<int> color(ground.size(), -1);
  const Rat half(1, 2), quarter(1, 4);

  auto pair_probability = [&](std::size_t p) -> Rat {
    int clo = color[ground_index[X[p].lo]];
    int chi = color[ground_index[X[p].hi]];
    Rat prob(1);
    if (clo == -1)
      prob *= half;
    else if (clo != 0)
      return Rat(0);
    if (chi == -1)
      prob *= half;
    else if (chi != 1)
      return Rat(0);
    return prob;
  };

  // conditional expectation of the surviving weight; starts at exactly 1/4
  Rat expectation(0);
  for (std::size_t p = 0; p < X.size(); ++p) expectation += w.weights[p] * quarter;

  for (std::size_t g = 0; g < ground.size(); ++g) {
    Rat delta0(0), delta1(0);  // expectation change per branch
    for (int p : touching[g]) {
      Rat before = pair_probability(p);
      color[g] = 0;
      delta0 += w.weights[p] * (pair_probability(p) - before);
      color[g] = 1;
      delta1 += w.weights[p] * (pair_probability(p) - before);
      color[g] = -1;
    }
    // keep the larger branch; ties go to color 0
    if (delta0 >= delta1) {
      color[g] = 0;
      expectation += delta0;
    } else {
      color[g] = 1;
      expectation += delta1;
    }
  }

  IndependentSetResult out;
  out.ground_elements = ground;
  out.ground_colors = color;
  out.weight = Rat(0);
  for (std::size_t p = 0; p < X.size(); ++p) {
    if (color[ground_index[X[p].lo]] == 0 && color[ground_index[X[p].hi]] == 1) {
      out.selected.push_back(static_cast<int>(p));
      out.weight += w.weights[p];
    }
  }
  if (out.weight != expectation || out.weight < quarter)
    raise(ErrorKind::Internal, "conditional-expectation walk lost weight");
  for (std::size_t a = 0; a < out.selected.size(); ++a)
    for (std::size_t b = a + 1; b < out.selected.size(); ++b)
      if (shift_adjacent(X[out.selected[a]], X[out.selected[b]]))
        raise(ErrorKind::Internal, "extractor output is not independent");
  return out;
}

namespace {

bool has_monochromatic_copy(const std::vector<geometry::CongruenceMap>& copies,
                            const std::vector<int>& colors) {
  for (const auto& copy : copies) {
    int c0 = colors[copy.correspondence[0]];
    bool mono = true;
    for (std::size_t i = 1; i < copy.correspondence.size(); ++i) {
      if (colors[copy.correspondence[i]] != c0) {
        mono = false;
        break;
      }
    }
    if (mono) return true;
  }
  return false;
}

}  // namespace

ColoringSearchResult monochromatic_copy_search(const PointConfig& host,
                                               const PointConfig& pattern, int r, double tol,
                                               SearchMode mode, std::uint64_t seed,
                                               std::uint64_t samples) {
  if (r < 1) raise(ErrorKind::InvalidInput, "color count must be >= 1");
  if (host.size() < 1) raise(ErrorKind::InvalidInput, "host must be nonempty");
  const int n = host.size();

  ColoringSearchResult out;
  out.mode = mode;
  out.seed = seed;

  auto copies = geometry::find_copies(host, pattern, tol);
  out.copies_in_host = static_cast<int>(copies.size());

  if (mode == SearchMode::Exhaustive) {
    if (n * std::log2(std::max(r, 2)) > 25.0 && r > 1)
      raise(ErrorKind::SizeLimit, "exhaustive mode requires r^|host| <= 2^25");
    std::vector<int> colors(n, 0);
    std::uint64_t checked = 0;
    while (true) {
      ++checked;
      if (!has_monochromatic_copy(copies, colors)) {
        out.certified = false;
        out.counterexample = Coloring{r, colors};
        out.colorings_checked = checked;
        return out;
      }
      // lexicographic odometer, last index fastest
      int pos = n - 1;
      while (pos >= 0 && colors[pos] == r - 1) colors[pos--] = 0;
      if (pos < 0) break;
      ++colors[pos];
    }
    out.certified = true;
    out.colorings_checked = checked;
    if (!copies.empty()) out.sample_witness = copies.front();
    return out;
  }

  detail::Rng rng(seed);
  std::vector<int> colors(n);
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) colors[i] = static_cast<int>(rng.next_below(r));
    ++out.colorings_checked;
    if (!has_monochromatic_copy(copies, colors)) {
      out.certified = false;
      out.counterexample = Coloring{r, colors};
      return out;
    }
  }
  out.certified = false;  // sampling proves nothing positive
  return out;
}

DenseFreeSubset extract_dense_free_subset(const PointConfig& V,
                                          const std::vector<IndexPair>& base_labels,
                                          const constructions::SegmentSpec& spec, double tol) {
  (void)tol;
  const int n = V.size();
  if (static_cast<int>(base_labels.size()) != n)
    raise(ErrorKind::InvalidInput, "every point needs a base pair label");
  if (n == 0) raise(ErrorKind::InvalidInput, "empty sample");

  std::map<IndexPair, std::vector<int>> fibers;
  for (int i = 0; i < n; ++i) {
    base_labels[i].validate();
    fibers[base_labels[i]].push_back(i);
  }

  std::vector<IndexPair> X;
  WeightVector w;
  for (const auto& [pair, members] : fibers) {
    X.push_back(pair);
    w.weights.emplace_back(BigInt(static_cast<long long>(members.size())),
                           BigInt(static_cast<long long>(n)));
  }

  auto extraction = weighted_independent_set(X, w);

  DenseFreeSubset out;
  out.ratio = extraction.weight;
  for (int sel : extraction.selected) {
    out.independent_base.push_back(X[sel]);
    for (int idx : fibers[X[sel]]) out.indices.push_back(idx);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.subset = subconfig(V, out.indices);

  // no kept base pair may realize the segment length: adjacency is exactly
  // distance a, and the selection is independent
  for (std::size_t a = 0; a < out.independent_base.size(); ++a)
    for (std::size_t b = a + 1; b < out.independent_base.size(); ++b) {
      if (constructions::predicted_sq_distance(out.independent_base[a], out.independent_base[b],
                                               spec) == spec.a_sq)
        raise(ErrorKind::Internal, "base projection of the extracted set realizes the segment");
    }
  return out;
}

}  // namespace pramsey::combinatorics
