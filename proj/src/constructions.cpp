#include "pramsey/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "pramsey/geometry.hpp"

namespace pramsey::constructions {

SegmentSpec::SegmentSpec(Rat a_squared, Rat ratio) : a_sq(std::move(a_squared)), gamma(std::move(ratio)) {
  if (!(a_sq > Rat(0))) raise(ErrorKind::InvalidInput, "segment length must be positive");
  if (!(gamma > Rat(0))) raise(ErrorKind::InvalidInput, "ratio parameter must be positive");
}

double SegmentSpec::a() const { return std::sqrt(a_sq.to_double()); }

Rat SegmentSpec::scale_sq() const {
  Rat q = Rat(1) + gamma + gamma * gamma;
  return a_sq / (Rat(2) * q);
}

double SegmentSpec::scale() const { return std::sqrt(scale_sq().to_double()); }

std::vector<Rat> SegmentSpec::distance_value_set() const {
  Rat q = Rat(1) + gamma + gamma * gamma;
  Rat g2 = gamma * gamma;
  return {a_sq, a_sq / q, (Rat(1) + g2) * a_sq / q, g2 * a_sq / q};
}

Rat predicted_sq_distance(const IndexPair& e, const IndexPair& e2, const SegmentSpec& spec) {
  e.validate();
  e2.validate();
  if (e == e2) return Rat(0);
  Rat q = Rat(1) + spec.gamma + spec.gamma * spec.gamma;
  Rat g2 = spec.gamma * spec.gamma;
  if (e.lo == e2.lo) return g2 * spec.a_sq / q;            // shared first index
  if (e.hi == e2.hi) return spec.a_sq / q;                 // shared second index
  if (e.hi == e2.lo || e2.hi == e.lo) return spec.a_sq;    // shift-adjacent
  return (Rat(1) + g2) * spec.a_sq / q;                    // disjoint
}

PointConfig segment_config_points(const SegmentSpec& spec, const std::vector<IndexPair>& pairs) {
  int dim = 1;
  for (const auto& e : pairs) {
    e.validate();
    dim = std::max(dim, e.hi);
  }
  const int n = static_cast<int>(pairs.size());
  const double beta = spec.scale();
  const double beta_gamma = beta * spec.gamma.to_double();

  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(n, n == 0 ? 0 : dim);
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    pts(i, pairs[i].lo - 1) = beta;
    pts(i, pairs[i].hi - 1) = -beta_gamma;
    labels.push_back(pairs[i].str());
  }
  PointConfig out = PointConfig::from_rows(std::move(pts), std::move(labels));
  if (n == 0) out.dim = 0;

  RatMatrix sq(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) sq[i][j] = sq[j][i] = predicted_sq_distance(pairs[i], pairs[j], spec);
  out.exact_sq = std::move(sq);
  return out;
}

double SpreadSpec::norm() const {
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(s);
}

namespace {

void increasing_tuples(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(k);
  // odometer over increasing k-tuples of [n], lexicographic
  for (int i = 0; i < k; ++i) cur[i] = i + 1;
  if (k > n) return;
  while (true) {
    out.push_back(cur);
    int pos = k - 1;
    while (pos >= 0 && cur[pos] == n - (k - 1 - pos)) --pos;
    if (pos < 0) break;
    ++cur[pos];
    for (int i = pos + 1; i < k; ++i) cur[i] = cur[i - 1] + 1;
  }
}

std::string tuple_label(const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t[i]);
  }
  return s + ")";
}

}  // namespace

PointConfig spread_points(const SpreadSpec& spec, const std::vector<int>& ground) {
  const int k = spec.k();
  if (k < 1) raise(ErrorKind::InvalidInput, "spread weight vector must be nonempty");
  if (spec.c_exact && static_cast<int>(spec.c_exact->size()) != k)
    raise(ErrorKind::InvalidInput, "exact weights must match the weight vector");
  std::vector<int> a = ground;
  std::sort(a.begin(), a.end());
  if (!a.empty() && a.front() < 1) raise(ErrorKind::InvalidInput, "ground elements must be >= 1");
  if (std::adjacent_find(a.begin(), a.end()) != a.end())
    raise(ErrorKind::InvalidInput, "ground set has repeated elements");
  if (static_cast<int>(a.size()) < k)
    raise(ErrorKind::InvalidInput, "ground set smaller than the tuple size");

  // all increasing k-tuples of the ground set, in lexicographic order
  std::vector<std::vector<int>> idx_tuples;
  increasing_tuples(static_cast<int>(a.size()), k, idx_tuples);
  std::vector<std::vector<int>> tuples;
  tuples.reserve(idx_tuples.size());
  for (auto& t : idx_tuples) {
    std::vector<int> real(k);
    for (int i = 0; i < k; ++i) real[i] = a[t[i] - 1];
    tuples.push_back(std::move(real));
  }

  const int n_points = static_cast<int>(tuples.size());
  const int dim = a.back();
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(n_points, dim);
  std::vector<std::string> labels;
  labels.reserve(n_points);
  for (int i = 0; i < n_points; ++i) {
    for (int l = 0; l < k; ++l) pts(i, tuples[i][l] - 1) = spec.c[l];
    labels.push_back(tuple_label(tuples[i]));
  }
  PointConfig out = PointConfig::from_rows(std::move(pts), std::move(labels));

  if (spec.c_exact) {
    const auto& ce = *spec.c_exact;
    RatMatrix sq(n_points, std::vector<Rat>(n_points, Rat(0)));
    for (int i = 0; i < n_points; ++i)
      for (int j = i + 1; j < n_points; ++j) {
        std::map<int, Rat> weight;
        for (int l = 0; l < k; ++l) weight[tuples[i][l]] += ce[l];
        for (int l = 0; l < k; ++l) weight[tuples[j][l]] -= ce[l];
        Rat d(0);
        for (auto& [axis, w] : weight) d += w * w;
        sq[i][j] = sq[j][i] = std::move(d);
      }
    out.exact_sq = std::move(sq);
  }
  return out;
}

BrickSpec BrickSpec::from_exact_squares(std::vector<Rat> squares) {
  BrickSpec spec;
  spec.sides.reserve(squares.size());
  for (const auto& s : squares) {
    if (!(s > Rat(0))) raise(ErrorKind::InvalidInput, "brick sides must be positive");
    spec.sides.push_back(std::sqrt(s.to_double()));
  }
  spec.side_squares = std::move(squares);
  return spec;
}

BrickSpec BrickSpec::from_sides(std::vector<double> sides) {
  BrickSpec spec;
  for (double s : sides)
    if (!(s > 0.0)) raise(ErrorKind::InvalidInput, "brick sides must be positive");
  spec.sides = std::move(sides);
  return spec;
}

PointConfig brick_points(const BrickSpec& spec) {
  const int d = spec.dim();
  if (d > 20) raise(ErrorKind::SizeLimit, "brick dimension above 20 (2^d vertices)");
  for (double s : spec.sides)
    if (!(s > 0.0)) raise(ErrorKind::InvalidInput, "brick sides must be positive");
  const int n = 1 << d;
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(n, d);
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int mask = 0; mask < n; ++mask) {
    std::string label = "{";
    bool first = true;
    for (int i = 0; i < d; ++i) {
      if (mask & (1 << i)) {
        pts(mask, i) = spec.sides[i];
        if (!first) label += ",";
        label += std::to_string(i + 1);
        first = false;
      }
    }
    label += "}";
    labels.push_back(std::move(label));
  }
  PointConfig out = PointConfig::from_rows(std::move(pts), std::move(labels));
  if (spec.side_squares) {
    const auto& ss = *spec.side_squares;
    RatMatrix sq(n, std::vector<Rat>(n, Rat(0)));
    for (int m1 = 0; m1 < n; ++m1)
      for (int m2 = m1 + 1; m2 < n; ++m2) {
        Rat v(0);
        int diff = m1 ^ m2;
        for (int i = 0; i < d; ++i)
          if (diff & (1 << i)) v += ss[i];
        sq[m1][m2] = sq[m2][m1] = std::move(v);
      }
    out.exact_sq = std::move(sq);
  }
  return out;
}

std::vector<Rat> gamma_candidates(int count) {
  std::vector<Rat> out;
  if (count <= 0) return out;
  out.push_back(Rat(1));

  // Stern-Brocot right subtree, level by level; each level's values > 1 are
  // emitted in descending order, each followed by its reciprocal.
  struct Node {
    BigInt ln, ld, rn, rd;  // enclosing interval bounds
  };
  std::vector<Node> level = {{BigInt(1), BigInt(1), BigInt(1), BigInt(0)}};  // (1, infinity)
  while (static_cast<int>(out.size()) < count) {
    std::vector<Rat> values;
    std::vector<Node> next;
    for (const auto& nd : level) {
      BigInt mn = nd.ln + nd.rn, md = nd.ld + nd.rd;
      values.emplace_back(mn, md);
      next.push_back({nd.ln, nd.ld, mn, md});
      next.push_back({mn, md, nd.rn, nd.rd});
    }
    std::sort(values.begin(), values.end(), [](const Rat& a, const Rat& b) { return a > b; });
    for (const auto& v : values) {
      out.push_back(v);
      out.push_back(Rat(1) / v);
      if (static_cast<int>(out.size()) >= count) break;
    }
    level = std::move(next);
  }
  out.resize(count);
  return out;
}

GammaChoice choose_gamma(const Rat& a_sq, const std::vector<Rat>& host_sq_dists,
                         const std::vector<Rat>& pattern_sq_dists, const Rat& margin,
                         int budget) {
  if (!(a_sq > Rat(0))) raise(ErrorKind::InvalidInput, "segment length must be positive");
  if (!(margin > Rat(0))) raise(ErrorKind::InvalidInput, "separation margin must be positive");

  std::set<Rat> diffs;
  std::vector<Rat> s_values = pattern_sq_dists, t_values = host_sq_dists;
  s_values.push_back(Rat(0));
  t_values.push_back(Rat(0));
  for (const auto& s : s_values)
    for (const auto& t : t_values) diffs.insert(s - t);

  auto candidates = gamma_candidates(budget);
  int tried = 0;
  for (const auto& gamma : candidates) {
    ++tried;
    Rat q = Rat(1) + gamma + gamma * gamma;
    Rat g2 = gamma * gamma;
    // the three gamma-dependent values; a^2 itself may legitimately occur
    Rat values[3] = {a_sq / q, (Rat(1) + g2) * a_sq / q, g2 * a_sq / q};
    Rat worst = abs(values[0] - *diffs.begin()) + margin;  // any upper bound to start
    bool ok = true;
    for (const auto& v : values) {
      for (const auto& d : diffs) {
        Rat sep = abs(v - d);
        if (sep < worst) worst = sep;
        if (sep < margin) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return GammaChoice{gamma, worst, tried};
  }
  raise(ErrorKind::SearchFailure,
        "no ratio in the first " + std::to_string(budget) +
            " candidates achieves the separation margin");
}

ConfigDescriptor ConfigDescriptor::make_finite(PointConfig c) {
  ConfigDescriptor d;
  d.kind = Kind::Finite;
  d.finite = std::move(c);
  return d;
}

ConfigDescriptor ConfigDescriptor::make_segment(SegmentSpec s) {
  ConfigDescriptor d;
  d.kind = Kind::Segment;
  d.segment = std::move(s);
  return d;
}

ConfigDescriptor ConfigDescriptor::make_spread(SpreadSpec s) {
  ConfigDescriptor d;
  d.kind = Kind::Spread;
  d.spread = std::move(s);
  return d;
}

ConfigDescriptor ConfigDescriptor::make_brick(BrickSpec b) {
  ConfigDescriptor d;
  d.kind = Kind::Brick;
  d.brick = std::move(b);
  return d;
}

ConfigDescriptor ConfigDescriptor::make_product(ConfigDescriptor left, ConfigDescriptor right) {
  ConfigDescriptor d;
  d.kind = Kind::Product;
  d.prod = Product{std::make_shared<ConfigDescriptor>(std::move(left)),
                   std::make_shared<ConfigDescriptor>(std::move(right))};
  return d;
}

PointConfig materialize(const ConfigDescriptor& desc, int n) {
  if (n < 1) raise(ErrorKind::InvalidInput, "truncation parameter must be >= 1");
  switch (desc.kind) {
    case ConfigDescriptor::Kind::Finite:
      return desc.finite;
    case ConfigDescriptor::Kind::Segment: {
      std::vector<IndexPair> pairs;
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) pairs.emplace_back(i, j);
      return segment_config_points(*desc.segment, pairs);
    }
    case ConfigDescriptor::Kind::Spread: {
      std::vector<int> ground(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) ground[i] = i + 1;
      return spread_points(*desc.spread, ground);
    }
    case ConfigDescriptor::Kind::Brick:
      return brick_points(*desc.brick);
    case ConfigDescriptor::Kind::Product:
      return geometry::product(materialize(*desc.prod->left, n), materialize(*desc.prod->right, n));
  }
  raise(ErrorKind::Internal, "unknown descriptor kind");
}

}  // namespace pramsey::constructions
