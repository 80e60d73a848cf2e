#include "pramsey/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "pramsey/errors.hpp"

namespace pramsey::geometry {

namespace {

double off_diagonal_form(const Eigen::MatrixXd& m, const Eigen::VectorXd& lambda) {
  // sum_{i<j} m_ij l_i l_j == (l^T M l) / 2 for symmetric zero-diagonal M
  return 0.5 * lambda.dot(m * lambda);
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector.
Eigen::MatrixXd ones_complement_basis(int n) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

}  // namespace

SquaredDistanceMatrix squared_distance_matrix(const PointConfig& config) {
  const int n = config.size();
  if (config.exact_sq) {
    return SquaredDistanceMatrix::from_exact(*config.exact_sq);
  }
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = (config.points.row(i) - config.points.row(j)).squaredNorm();
      sq(i, j) = sq(j, i) = d;
    }
  return SquaredDistanceMatrix::from_values(std::move(sq));
}

NegativeTypeReport negative_type_slack(const SquaredDistanceMatrix& m) {
  m.validate();
  NegativeTypeReport rep;
  if (m.n == 1) {
    // no admissible lambda exists; a single point is vacuously a 0-simplex
    rep.slack = std::numeric_limits<double>::infinity();
    rep.witness_lambda = Eigen::VectorXd(1);
    rep.witness_lambda << 0.0;
    rep.form_at_witness = 0.0;
    return rep;
  }
  Eigen::MatrixXd basis = ones_complement_basis(m.n);
  Eigen::MatrixXd restricted = basis.transpose() * m.values * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restricted);
  if (es.info() != Eigen::Success) raise(ErrorKind::Internal, "eigen-solve failed");
  const int top = m.n - 2;  // eigenvalues come sorted ascending
  rep.slack = -0.5 * es.eigenvalues()(top);
  Eigen::VectorXd lambda = basis * es.eigenvectors().col(top);
  lambda.normalize();
  // deterministic sign: first entry of meaningful magnitude is positive
  for (int i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda(i)) > 1e-9) {
      if (lambda(i) < 0) lambda = -lambda;
      break;
    }
  }
  rep.witness_lambda = lambda;
  rep.form_at_witness = off_diagonal_form(m.values, lambda);
  return rep;
}

PointConfig embed_distance_matrix(const SquaredDistanceMatrix& m, double tol) {
  m.validate();
  NegativeTypeReport rep = negative_type_slack(m);
  if (rep.slack < -tol) {
    throw NotEmbeddableError("matrix is not of negative type: slack " +
                                 std::to_string(rep.slack) + " < -tol",
                             rep.witness_lambda);
  }
  const int n = m.n;
  Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  Eigen::MatrixXd gram = -0.5 * centering * m.values * centering;
  gram = 0.5 * (gram + gram.transpose());  // kill round-off asymmetry
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success) raise(ErrorKind::Internal, "eigen-solve failed");

  const double lambda_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
  const double cutoff = 1e-12 * lambda_max;
  std::vector<int> retained;
  for (int i = n - 1; i >= 0; --i) {  // descending, for a deterministic axis order
    if (es.eigenvalues()(i) > cutoff && es.eigenvalues()(i) > 0.0) retained.push_back(i);
  }
  const int dim = static_cast<int>(retained.size());
  Eigen::MatrixXd coords(n, dim);
  for (int a = 0; a < dim; ++a)
    coords.col(a) = es.eigenvectors().col(retained[a]) * std::sqrt(es.eigenvalues()(retained[a]));

  PointConfig out = PointConfig::from_rows(std::move(coords));

  // reproduction check; slack in [-tol, 0) legitimately costs up to ~2|slack|
  double scale = m.values.maxCoeff();
  double allowed = std::max(tol, 4.0 * std::max(0.0, -rep.slack)) + 1e-12 * std::max(1.0, scale);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double d = (out.points.row(i) - out.points.row(j)).squaredNorm();
      worst = std::max(worst, std::abs(d - m.values(i, j)));
    }
  if (worst > allowed)
    raise(ErrorKind::Internal,
          "embedding failed to reproduce the matrix: error " + std::to_string(worst));
  return out;
}

Circumsphere circumsphere(const PointConfig& config) {
  const int n = config.size();
  if (n == 0) raise(ErrorKind::InvalidInput, "circumsphere of an empty config");
  if (config.has_coincident_points())
    raise(ErrorKind::DegenerateConfig, "coincident points have no well-defined circumcenter");

  Circumsphere out;
  if (n == 1) {
    out.radius = 0.0;
    out.center = config.point(0);
    return out;
  }

  Eigen::MatrixXd edges(n - 1, config.dim);
  for (int a = 1; a < n; ++a) edges.row(a - 1) = config.points.row(a) - config.points.row(0);
  Eigen::MatrixXd gram = 2.0 * edges * edges.transpose();
  Eigen::VectorXd rhs(n - 1);
  for (int a = 0; a < n - 1; ++a) rhs(a) = edges.row(a).squaredNorm();

  // rank-revealing least squares tolerates affinely dependent (e.g.
  // cocircular) inputs; consistency is checked below
  Eigen::VectorXd t = gram.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd center = config.point(0) + edges.transpose() * t;

  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = (config.point(i) - center).norm();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  double scale = std::max(1e-30, dmax);
  if ((dmax - dmin) / scale > 1e-7)
    raise(ErrorKind::DegenerateConfig,
          "no center in the affine hull is equidistant from all points");
  out.radius = 0.5 * (dmin + dmax);
  out.center = center;
  return out;
}

double diameter(const PointConfig& config) {
  const int n = config.size();
  if (n == 0) raise(ErrorKind::InvalidInput, "diameter of an empty config");
  if (config.exact_sq) {
    Rat best(0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) best = std::max(best, (*config.exact_sq)[i][j]);
    return std::sqrt(best.to_double());
  }
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::max(best, (config.points.row(i) - config.points.row(j)).squaredNorm());
  return std::sqrt(best);
}

namespace {

/// Shared backtracking over injections pattern -> host, emitting one
/// canonical (lexicographically first) correspondence per host subset, in
/// lexicographic order of the correspondence vector.
class CopySearch {
 public:
  CopySearch(const PointConfig& host, const PointConfig& pattern, double tol)
      : host_(host),
        pattern_(pattern),
        tol_(tol),
        host_sq_(squared_distance_matrix(host)),
        pattern_sq_(squared_distance_matrix(pattern)),
        exact_(tol == 0.0 && host_sq_.rational_mode() && pattern_sq_.rational_mode()) {}

  bool pair_matches(int ps, int pt, int hs, int ht) const {
    if (exact_) return (*pattern_sq_.exact)[ps][pt] == (*host_sq_.exact)[hs][ht];
    double dp = std::sqrt(pattern_sq_.values(ps, pt));
    double dh = std::sqrt(host_sq_.values(hs, ht));
    return std::abs(dp - dh) <= tol_;
  }

  double pair_residual(int ps, int pt, int hs, int ht) const {
    if (exact_) return 0.0;
    return std::abs(std::sqrt(pattern_sq_.values(ps, pt)) - std::sqrt(host_sq_.values(hs, ht)));
  }

  /// Necessary condition: the pattern's distance multiset must inject into
  /// the host's within tol.
  bool multiset_prune() const {
    std::vector<double> pd, hd;
    const int m = pattern_.size(), n = host_.size();
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) pd.push_back(std::sqrt(pattern_sq_.values(i, j)));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) hd.push_back(std::sqrt(host_sq_.values(i, j)));
    std::sort(pd.begin(), pd.end());
    std::sort(hd.begin(), hd.end());
    std::size_t h = 0;
    for (double v : pd) {
      while (h < hd.size() && hd[h] < v - tol_) ++h;
      if (h == hd.size() || hd[h] > v + tol_) return false;
      ++h;
    }
    return true;
  }

  std::vector<CongruenceMap> run(int limit) {
    results_.clear();
    seen_subsets_.clear();
    limit_ = limit;
    const int m = pattern_.size();
    if (m > host_.size()) return {};
    if (!multiset_prune()) return {};
    assignment_.assign(m, -1);
    used_.assign(host_.size(), false);
    extend(0);
    return std::move(results_);
  }

 private:
  void extend(int t) {
    const int m = pattern_.size();
    if (limit_ > 0 && static_cast<int>(results_.size()) >= limit_) return;
    if (t == m) {
      record();
      return;
    }
    for (int h = 0; h < host_.size(); ++h) {
      if (used_[h]) continue;
      bool ok = true;
      for (int s = 0; s < t && ok; ++s) ok = pair_matches(s, t, assignment_[s], h);
      if (!ok) continue;
      used_[h] = true;
      assignment_[t] = h;
      extend(t + 1);
      used_[h] = false;
      if (limit_ > 0 && static_cast<int>(results_.size()) >= limit_) return;
    }
  }

  void record() {
    std::vector<int> subset = assignment_;
    std::sort(subset.begin(), subset.end());
    if (!seen_subsets_.insert(subset).second) return;
    CongruenceMap map;
    map.correspondence = assignment_;
    double worst = 0.0;
    const int m = pattern_.size();
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        worst = std::max(worst, pair_residual(i, j, assignment_[i], assignment_[j]));
    map.max_residual = worst;
    results_.push_back(std::move(map));
  }

  const PointConfig& host_;
  const PointConfig& pattern_;
  double tol_;
  SquaredDistanceMatrix host_sq_;
  SquaredDistanceMatrix pattern_sq_;
  bool exact_;
  int limit_ = 0;
  std::vector<int> assignment_;
  std::vector<bool> used_;
  std::set<std::vector<int>> seen_subsets_;
  std::vector<CongruenceMap> results_;
};

}  // namespace

std::optional<CongruenceMap> congruent(const PointConfig& a, const PointConfig& b, double tol) {
  if (a.size() != b.size())
    raise(ErrorKind::InvalidInput, "congruence requires equal point counts");
  if (a.size() == 0) return CongruenceMap{};
  CopySearch search(b, a, tol);  // host = b, pattern = a
  auto found = search.run(1);
  if (found.empty()) return std::nullopt;
  return found.front();
}

std::vector<CongruenceMap> find_copies(const PointConfig& host, const PointConfig& pattern,
                                       double tol, int limit) {
  if (pattern.size() == 0) return {CongruenceMap{}};
  CopySearch search(host, pattern, tol);
  return search.run(limit);
}

PointConfig product(const PointConfig& a, const PointConfig& b) {
  const int na = a.size(), nb = b.size();
  PointConfig out;
  out.dim = a.dim + b.dim;
  out.points.resize(na * nb, out.dim);
  out.labels.reserve(na * nb);
  auto label_of = [](const PointConfig& c, int i) {
    return c.has_labels() ? c.labels[i] : std::to_string(i);
  };
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      int row = i * nb + j;
      if (a.dim > 0) out.points.block(row, 0, 1, a.dim) = a.points.row(i);
      if (b.dim > 0) out.points.block(row, a.dim, 1, b.dim) = b.points.row(j);
      out.labels.push_back(label_of(a, i) + "*" + label_of(b, j));
    }
  if (a.exact_sq && b.exact_sq) {
    RatMatrix sq(na * nb, std::vector<Rat>(na * nb, Rat(0)));
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j)
        for (int i2 = 0; i2 < na; ++i2)
          for (int j2 = 0; j2 < nb; ++j2)
            sq[i * nb + j][i2 * nb + j2] = (*a.exact_sq)[i][i2] + (*b.exact_sq)[j][j2];
    out.exact_sq = std::move(sq);
  }
  return out;
}

}  // namespace pramsey::geometry
