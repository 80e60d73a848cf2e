#include "pramsey/point_config.hpp"

#include <string>

#include "pramsey/errors.hpp"

namespace pramsey {

SquaredDistanceMatrix SquaredDistanceMatrix::from_exact(RatMatrix m) {
  SquaredDistanceMatrix out;
  out.n = static_cast<int>(m.size());
  out.values.resize(out.n, out.n);
  for (int i = 0; i < out.n; ++i) {
    if (static_cast<int>(m[i].size()) != out.n)
      raise(ErrorKind::InvalidInput, "ragged squared-distance matrix");
    for (int j = 0; j < out.n; ++j) out.values(i, j) = m[i][j].to_double();
  }
  out.exact = std::move(m);
  out.validate();
  return out;
}

SquaredDistanceMatrix SquaredDistanceMatrix::from_values(Eigen::MatrixXd m) {
  SquaredDistanceMatrix out;
  if (m.rows() != m.cols()) raise(ErrorKind::InvalidInput, "squared-distance matrix must be square");
  out.n = static_cast<int>(m.rows());
  out.values = std::move(m);
  out.validate();
  return out;
}

void SquaredDistanceMatrix::validate() const {
  if (n != values.rows() || n != values.cols())
    raise(ErrorKind::InvalidInput, "squared-distance matrix size mismatch");
  for (int i = 0; i < n; ++i) {
    if (values(i, i) != 0.0)
      raise(ErrorKind::InvalidInput, "squared-distance matrix must have zero diagonal");
    for (int j = 0; j < n; ++j) {
      if (values(i, j) != values(j, i))
        raise(ErrorKind::InvalidInput, "squared-distance matrix must be symmetric");
      if (values(i, j) < 0.0)
        raise(ErrorKind::InvalidInput, "squared distances must be nonnegative");
    }
  }
  if (exact) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if ((*exact)[i][j] != (*exact)[j][i])
          raise(ErrorKind::InvalidInput, "exact squared-distance matrix must be symmetric");
        if ((*exact)[i][j].is_negative())
          raise(ErrorKind::InvalidInput, "exact squared distances must be nonnegative");
      }
  }
}

bool PointConfig::has_coincident_points() const {
  const int n = size();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (exact_sq) {
        if ((*exact_sq)[i][j].is_zero()) return true;
      } else if ((points.row(i) - points.row(j)).squaredNorm() == 0.0) {
        return true;
      }
    }
  return false;
}

PointConfig PointConfig::from_rows(Eigen::MatrixXd rows, std::vector<std::string> labels) {
  PointConfig c;
  c.dim = static_cast<int>(rows.cols());
  c.points = std::move(rows);
  if (!labels.empty() && static_cast<int>(labels.size()) != c.size())
    raise(ErrorKind::InvalidInput, "label count must match point count");
  c.labels = std::move(labels);
  return c;
}

PointConfig subconfig(const PointConfig& c, const std::vector<int>& indices) {
  const int m = static_cast<int>(indices.size());
  for (int idx : indices)
    if (idx < 0 || idx >= c.size()) raise(ErrorKind::InvalidInput, "subconfig index out of range");
  PointConfig out;
  out.dim = c.dim;
  out.points.resize(m, c.dim);
  for (int i = 0; i < m; ++i) out.points.row(i) = c.points.row(indices[i]);
  if (c.has_labels()) {
    out.labels.reserve(m);
    for (int idx : indices) out.labels.push_back(c.labels[idx]);
  }
  if (c.exact_sq) {
    RatMatrix sq(m, std::vector<Rat>(m, Rat(0)));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) sq[i][j] = (*c.exact_sq)[indices[i]][indices[j]];
    out.exact_sq = std::move(sq);
  }
  return out;
}

}  // namespace pramsey
