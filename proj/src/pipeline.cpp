#include "pramsey/pipeline.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "pramsey/detail/rng.hpp"

namespace pramsey::pipeline {

using geometry::circumsphere;
using geometry::embed_distance_matrix;
using geometry::find_copies;
using geometry::negative_type_slack;
using geometry::squared_distance_matrix;

void PipelineParams::validate() const {
  if (delta && !(*delta > 0)) raise(ErrorKind::InvalidInput, "delta must be positive");
  if (epsilon && !(*epsilon > 0)) raise(ErrorKind::InvalidInput, "epsilon must be positive");
  if (!(margin > 0)) raise(ErrorKind::InvalidInput, "margin must be positive");
  if (!(tol > 0)) raise(ErrorKind::InvalidInput, "tol must be positive");
}

namespace {

std::vector<std::string> index_labels(int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(std::to_string(i));
  return out;
}

[[noreturn]] void rethrow_tagged(const char* stage, const Error& e) {
  throw Error(e.kind(), std::string(stage) + ": " + e.what());
}

}  // namespace

Step1Result step1_shrink(const PointConfig& s, int d) {
  if (s.size() != d + 1)
    raise(ErrorKind::InvalidInput, "a d-simplex needs exactly d+1 points");
  if (d < 1) raise(ErrorKind::InvalidInput, "dimension must be >= 1");

  auto m = squared_distance_matrix(s);
  auto report = negative_type_slack(m);
  double slack_floor = 1e-12 * std::max(1.0, m.values.maxCoeff());
  if (!(report.slack > slack_floor))
    raise(ErrorKind::NotASimplex,
          "input is not a simplex: negative-type slack " + std::to_string(report.slack));

  Step1Result out;
  out.slack = report.slack;
  out.shrink_beta = report.slack / (8.0 * d * d);

  Eigen::MatrixXd shrunk = m.values.array() - out.shrink_beta;
  for (int i = 0; i <= d; ++i) shrunk(i, i) = 0.0;
  auto m1 = SquaredDistanceMatrix::from_values(std::move(shrunk));

  auto report1 = negative_type_slack(m1);
  if (!(report1.slack > 0))
    raise(ErrorKind::PipelineVerification, "shrunk matrix lost strictness");

  out.s1 = embed_distance_matrix(m1, 1e-9);
  out.s1.labels = index_labels(d + 1);
  out.rho = circumsphere(s).radius;
  out.rho_prime = circumsphere(out.s1).radius;
  if (!(out.rho_prime < out.rho))
    raise(ErrorKind::PipelineVerification, "circumradius did not shrink");
  return out;
}

// ---------------------------------------------------------------------------
// Step 2: spread approximation.
//
// The search works over "circle modes". A mode assigns every vertex an
// integer window shift s_i and carries a weight x >= 0 and a frequency w;
// its weight vector holds an enveloped cosine wave and the matching sine
// wave on a fresh block of axes. Because cos*cos + sin*sin telescopes, the
// mode contributes exactly x * E(|s_i - s_j|) * cos(w |s_i - s_j|) to the
// (i,j) inner product, where E is the envelope autocorrelation. On top of
// the modes, each vertex pair owns a two-position "gadget" whose weights
// (u_t, v_t) add u_t * v_t to that pair alone. Pair and norm equations are
// therefore cheap closed forms: discrete choices (shift patterns, active
// frequencies) come from a nonnegative least-squares fit over a seeded
// dictionary, and a small Levenberg-Marquardt polish over (x, w, u, v)
// finishes the interpolation. Regular simplices are the hard case: their
// Gram rows sum to zero, which no finite spread can reproduce exactly, so
// frequencies sit at zeros of the shift polynomial and the envelope taper
// makes the forced defect (hence the alignment residual) fall off like 1/L.
// ---------------------------------------------------------------------------

namespace {

struct CircleMode {
  std::vector<int> shifts;  // one nonnegative integer per vertex
  double omega = 0.0;
  double x = 0.0;  // squared amplitude, >= 0
};

struct SpreadModel {
  int m = 0;
  int block_len = 0;             // L, axes per block before the shift span
  Eigen::VectorXd envelope;      // Hann window of length L
  std::vector<double> env_corr;  // E(delta) for the small lags in use
  std::vector<CircleMode> modes;
  std::vector<double> gadget_u, gadget_v;  // one slot pair per vertex pair
  double filler = 0.0;  // pure-norm slot: fresh axis per tuple, no pair effect
  bool use_gadgets = true;
  Eigen::MatrixXd target_gram;
  double rho2 = 0.0;

  int pairs() const { return m * (m - 1) / 2; }

  void residuals(Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const int P = pairs();
    const int F = static_cast<int>(modes.size());
    const int vars = 2 * F + 2 * P;
    r.resize(P + 1);
    if (jac) jac->setZero(P + 1, vars);
    int row = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j, ++row) {
        double acc = gadget_u[row] * gadget_v[row];
        if (jac) {
          (*jac)(row, 2 * F + 2 * row) = gadget_v[row];
          (*jac)(row, 2 * F + 2 * row + 1) = gadget_u[row];
        }
        for (int v = 0; v < F; ++v) {
          int d = std::abs(modes[v].shifts[j] - modes[v].shifts[i]);
          double e = env_corr[d];
          double cosv = std::cos(modes[v].omega * d);
          acc += modes[v].x * e * cosv;
          if (jac) {
            (*jac)(row, 2 * v) = e * cosv;
            (*jac)(row, 2 * v + 1) = -modes[v].x * e * d * std::sin(modes[v].omega * d);
          }
        }
        r(row) = acc - target_gram(i, j);
      }
    double norm_acc = 0.0;
    for (int v = 0; v < F; ++v) {
      norm_acc += modes[v].x * env_corr[0];
      if (jac) (*jac)(row, 2 * v) = env_corr[0];
    }
    for (int t = 0; t < P; ++t) {
      norm_acc += gadget_u[t] * gadget_u[t] + gadget_v[t] * gadget_v[t];
      if (jac) {
        (*jac)(row, 2 * F + 2 * t) = 2.0 * gadget_u[t];
        (*jac)(row, 2 * F + 2 * t + 1) = 2.0 * gadget_v[t];
      }
    }
    norm_acc += filler * filler;
    r(row) = norm_acc - rho2;
  }

  double objective() const {
    Eigen::VectorXd r;
    residuals(r, nullptr);
    return r.squaredNorm();
  }

  double polish(int iters) {
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    double obj = objective();
    double lambda = 1e-8;
    for (int it = 0; it < iters; ++it) {
      if (obj < 1e-30 * std::max(1.0, rho2 * rho2)) break;
      residuals(r, &jac);
      Eigen::MatrixXd normal = jac.transpose() * jac;
      double floor = 1e-10 * std::max(normal.diagonal().maxCoeff(), 1e-30);
      bool improved = false;
      for (int tries = 0; tries < 16; ++tries) {
        Eigen::MatrixXd damped = normal;
        for (int q = 0; q < damped.rows(); ++q)
          damped(q, q) = normal(q, q) * (1.0 + lambda) + floor * (1.0 + lambda);
        Eigen::VectorXd step = damped.ldlt().solve(-jac.transpose() * r);
        SpreadModel cand = *this;
        const int F = static_cast<int>(modes.size());
        for (int v = 0; v < F; ++v) {
          cand.modes[v].x = std::max(0.0, modes[v].x + step(2 * v));
          cand.modes[v].omega = modes[v].omega + step(2 * v + 1);
        }
        if (use_gadgets) {
          for (int t = 0; t < pairs(); ++t) {
            cand.gadget_u[t] = gadget_u[t] + step(2 * F + 2 * t);
            cand.gadget_v[t] = gadget_v[t] + step(2 * F + 2 * t + 1);
          }
        }
        double cand_obj = cand.objective();
        if (cand_obj < obj) {
          modes = cand.modes;
          gadget_u = cand.gadget_u;
          gadget_v = cand.gadget_v;
          obj = cand_obj;
          lambda = std::max(lambda * 0.25, 1e-14);
          improved = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!improved) break;
    }
    if (std::getenv("PRAMSEY_POLISH_DEBUG"))
      std::fprintf(stderr, "[polish] done obj=%0.3e iters_left_lambda=%0.1e\n", obj, lambda);
    return obj;
  }
};

/// Lawson-Hanson nonnegative least squares; the dictionary stays small.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 400) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = a.transpose() * (b - a * x);
  for (int iter = 0; iter < max_iter; ++iter) {
    int t = -1;
    double best = 1e-11 * std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    if (t < 0) break;
    passive[t] = true;
    while (true) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j)
        if (passive[j]) idx.push_back(j);
      Eigen::MatrixXd ap(a.rows(), idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) ap.col(j) = a.col(idx[j]);
      Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
      bool all_positive = true;
      for (int j = 0; j < static_cast<int>(idx.size()); ++j)
        if (zp(j) <= 0) all_positive = false;
      if (all_positive) {
        x.setZero();
        for (std::size_t j = 0; j < idx.size(); ++j) x(idx[j]) = zp(j);
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (zp(j) <= 0) alpha = std::min(alpha, x(idx[j]) / (x(idx[j]) - zp(j)));
      for (std::size_t j = 0; j < idx.size(); ++j) x(idx[j]) += alpha * (zp(j) - x(idx[j]));
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (x(idx[j]) <= 1e-15) passive[idx[j]] = false;
    }
    w = a.transpose() * (b - a * x);
  }
  return x;
}

struct Materialized {
  std::vector<std::vector<int>> tuples;
  std::vector<double> weights;  // the shared weight vector c, by position
  Eigen::MatrixXd z;            // m x n spread points
  int n = 0;
};

/// Lay the model out on concrete axes. Block order: per mode a cosine block
/// then a sine block; gadget slot pairs go last. Every tuple has one axis
/// per position, so the tuples share the per-position weight vector.
Materialized materialize_model(const SpreadModel& model) {
  const int m = model.m;
  const int L = model.block_len;
  const int P = model.m * (model.m - 1) / 2;
  const int F = static_cast<int>(model.modes.size());

  int positions = 2 * F * L + 2 * P + 1;  // trailing pure-norm filler slot
  Materialized out;
  out.tuples.assign(m, std::vector<int>(positions));
  out.weights.assign(positions, 0.0);

  int axis = 0;
  int pos = 0;
  for (int v = 0; v < F; ++v) {
    const auto& mode = model.modes[v];
    int span = L + *std::max_element(mode.shifts.begin(), mode.shifts.end());
    double amp = std::sqrt(std::max(0.0, mode.x));
    for (int half = 0; half < 2; ++half) {
      for (int p = 0; p < L; ++p) {
        double wave = half == 0 ? std::cos(mode.omega * p) : std::sin(mode.omega * p);
        out.weights[pos + p] = amp * model.envelope(p) * wave;
      }
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < L; ++p) out.tuples[i][pos + p] = axis + mode.shifts[i] + p + 1;
      axis += span;
      pos += L;
    }
  }
  int pair = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j, ++pair) {
      // plus slot: fresh axes first so the shared axis is the largest here
      for (int l = 0; l < m; ++l)
        if (l != i) out.tuples[l][pos] = ++axis;
      int shared = ++axis;
      out.tuples[i][pos] = shared;
      out.weights[pos] = model.gadget_u[pair];
      ++pos;
      // minus slot: row j reuses the shared axis, everyone else gets fresh
      out.tuples[j][pos] = shared;
      for (int l = 0; l < m; ++l)
        if (l != j) out.tuples[l][pos] = ++axis;
      out.weights[pos] = model.gadget_v[pair];
      ++pos;
    }
  for (int l = 0; l < m; ++l) out.tuples[l][pos] = ++axis;  // filler slot
  out.weights[pos] = model.filler;
  ++pos;
  out.n = axis;

  out.z = Eigen::MatrixXd::Zero(m, out.n);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < positions; ++p) out.z(i, out.tuples[i][p] - 1) += out.weights[p];
  return out;
}

/// Free-angle circle fit against an arbitrary pair/norm target vector:
///   sum_v w_v cos(t_v[i] - t_v[j]) ~ pair_target[t],  sum_v w_v ~ norm_target,
/// with w >= 0. Every correlation matrix on up to five points is a
/// nonnegative mix of circle Grams, and small residual vectors are cheap
/// correction targets, so this serves both roles.
struct AngleFit {
  std::vector<double> weights;              // per mode
  std::vector<std::vector<double>> angles;  // per mode, one angle per vertex
  double obj = std::numeric_limits<double>::infinity();
};

AngleFit fit_circle_angles(const std::vector<double>& pair_target, double norm_target,
                           double scale2, int m, int modes, std::uint64_t seed, int restarts) {
  const int P = m * (m - 1) / 2;
  AngleFit best;
  for (int attempt = 0; attempt < restarts; ++attempt) {
    detail::Rng rng(seed + 0x9e3779b97f4a7c15ULL * (attempt + 1));
    std::vector<double> w(modes, std::abs(norm_target) / modes);
    std::vector<std::vector<double>> th(modes, std::vector<double>(m, 0.0));
    for (int v = 0; v < modes; ++v)
      for (int i = 1; i < m; ++i) th[v][i] = rng.next_double() * 2.0 * M_PI;

    const int vars = modes * m;  // per mode: weight plus m-1 free angles
    // a weak pull toward equal weights keeps every mode active; dropped for
    // the final iterations so the fit reaches machine zero
    double balance = 0.05 * std::abs(norm_target) / modes;
    auto eval = [&](const std::vector<double>& wv, const std::vector<std::vector<double>>& tv,
                    Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
      r.resize(P + 1 + modes);
      if (jac) jac->setZero(P + 1 + modes, vars);
      int row = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++row) {
          double acc = 0.0;
          for (int v = 0; v < modes; ++v) {
            double diff = tv[v][i] - tv[v][j];
            acc += wv[v] * std::cos(diff);
            if (jac) {
              (*jac)(row, v) = std::cos(diff);
              double dsin = -wv[v] * std::sin(diff);
              if (i > 0) (*jac)(row, modes + v * (m - 1) + (i - 1)) = dsin;
              if (j > 0) (*jac)(row, modes + v * (m - 1) + (j - 1)) = -dsin;
            }
          }
          r(row) = acc - pair_target[row];
        }
      double acc = 0.0;
      for (int v = 0; v < modes; ++v) {
        acc += wv[v];
        if (jac) (*jac)(row, v) = 1.0;
      }
      r(row) = acc - norm_target;
      ++row;
      for (int v = 0; v < modes; ++v, ++row) {
        r(row) = balance * (wv[v] - norm_target / modes);
        if (jac) (*jac)(row, v) = balance;
      }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    eval(w, th, r, nullptr);
    double obj = r.squaredNorm();
    double lambda = 1e-6;
    double balance_floor = balance * balance * norm_target * norm_target;
    for (int it = 0; it < 220; ++it) {
      if (obj < 1e-28 * scale2) break;
      if (balance != 0.0 && (it >= 80 || obj < 4.0 * balance_floor)) {
        balance = 0.0;
        eval(w, th, r, nullptr);
        obj = r.squaredNorm();
        lambda = 1e-6;
      }
      eval(w, th, r, &jac);
      Eigen::MatrixXd normal = jac.transpose() * jac;
      double floor = 1e-12 * std::max(normal.diagonal().maxCoeff(), 1e-300);
      bool improved = false;
      for (int tries = 0; tries < 14; ++tries) {
        Eigen::MatrixXd damped = normal;
        for (int q = 0; q < vars; ++q)
          damped(q, q) = normal(q, q) * (1.0 + lambda) + floor * (1.0 + lambda);
        Eigen::VectorXd step = damped.ldlt().solve(-jac.transpose() * r);
        std::vector<double> w2 = w;
        auto th2 = th;
        for (int v = 0; v < modes; ++v) {
          w2[v] = std::max(0.0, w[v] + step(v));
          for (int i = 1; i < m; ++i) th2[v][i] = th[v][i] + step(modes + v * (m - 1) + (i - 1));
        }
        Eigen::VectorXd r2;
        eval(w2, th2, r2, nullptr);
        if (r2.squaredNorm() < obj) {
          w = std::move(w2);
          th = std::move(th2);
          obj = r2.squaredNorm();
          lambda = std::max(lambda * 0.25, 1e-15);
          improved = true;
          break;
        }
        lambda *= 10.0;
      }
      if (!improved) break;
    }
    if (obj < best.obj) {
      best.obj = obj;
      best.weights = w;
      best.angles = th;
    }
    if (best.obj < 1e-24 * scale2) break;
  }
  return best;
}

/// One multigrid level: fit circles to the target vector, then round modes
/// onto the shift lattice one at a time, re-fitting the still-free modes so
/// the rounding error keeps getting re-absorbed. Returns the tracked
/// (nonnegative) weights; the leftover becomes the next level's target.
struct LatticeLevel {
  std::vector<std::vector<int>> shifts;
  std::vector<double> weights;  // nonnegative
  bool ok = false;
};

LatticeLevel lattice_level(const std::vector<double>& pair_target, double norm_target,
                           double scale2, int m, int modes, int quant,
                           const std::function<double(int)>& droop, std::uint64_t seed) {
  const int P = m * (m - 1) / 2;
  LatticeLevel out;
  double tsize = norm_target * norm_target;
  for (double v : pair_target) tsize += v * v;

  auto base = fit_circle_angles(pair_target, norm_target, scale2, m, modes, seed, 10);
  if (base.weights.empty() || base.obj > 1e-8 * tsize) return out;

  std::vector<std::vector<int>> frozen_shifts(modes);
  std::vector<bool> frozen(modes, false);
  std::vector<double> w = base.weights;
  auto th = base.angles;
  const double omega0 = 2.0 * M_PI / quant;

  auto refit = [&](int iters) -> double {
    std::vector<int> free_modes;
    for (int v = 0; v < modes; ++v)
      if (!frozen[v]) free_modes.push_back(v);
    const int nfree = static_cast<int>(free_modes.size());
    const int vars = modes + nfree * (m - 1);

    auto eval = [&](const std::vector<double>& wv, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
      r.resize(P + 1);
      if (jac) jac->setZero(P + 1, vars);
      int row = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++row) {
          double acc = 0.0;
          for (int v = 0; v < modes; ++v) {
            double profile;
            if (frozen[v]) {
              int d = std::abs(frozen_shifts[v][j] - frozen_shifts[v][i]);
              profile = droop(d) * std::cos(omega0 * d);
            } else {
              profile = std::cos(th[v][i] - th[v][j]);
            }
            acc += wv[v] * profile;
            if (jac) {
              (*jac)(row, v) = profile;
              if (!frozen[v]) {
                int slot = static_cast<int>(
                    std::find(free_modes.begin(), free_modes.end(), v) - free_modes.begin());
                double dsin = -wv[v] * std::sin(th[v][i] - th[v][j]);
                if (i > 0) (*jac)(row, modes + slot * (m - 1) + (i - 1)) = dsin;
                if (j > 0) (*jac)(row, modes + slot * (m - 1) + (j - 1)) = -dsin;
              }
            }
          }
          r(row) = acc - pair_target[row];
        }
      double acc = 0.0;
      for (int v = 0; v < modes; ++v) {
        acc += wv[v] * (frozen[v] ? droop(0) : 1.0);
        if (jac) (*jac)(row, v) = frozen[v] ? droop(0) : 1.0;
      }
      r(row) = acc - norm_target;
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    eval(w, r, nullptr);
    double obj = r.squaredNorm();
    double lambda = 1e-8;
    for (int it = 0; it < iters && obj > 1e-28 * scale2; ++it) {
      eval(w, r, &jac);
      Eigen::MatrixXd normal = jac.transpose() * jac;
      double floor = 1e-12 * std::max(normal.diagonal().maxCoeff(), 1e-300);
      bool improved = false;
      for (int tries = 0; tries < 14; ++tries) {
        Eigen::MatrixXd damped = normal;
        for (int q = 0; q < vars; ++q)
          damped(q, q) = normal(q, q) * (1.0 + lambda) + floor * (1.0 + lambda);
        Eigen::VectorXd step = damped.ldlt().solve(-jac.transpose() * r);
        std::vector<double> w2 = w;
        auto th2 = th;
        for (int v = 0; v < modes; ++v) w2[v] = std::max(0.0, w[v] + step(v));
        for (int slot = 0; slot < nfree; ++slot)
          for (int i = 1; i < m; ++i)
            th2[free_modes[slot]][i] =
                th[free_modes[slot]][i] + step(modes + slot * (m - 1) + (i - 1));
        auto th_saved = th;
        th = th2;
        Eigen::VectorXd r2;
        eval(w2, r2, nullptr);
        if (r2.squaredNorm() < obj) {
          w = std::move(w2);
          obj = r2.squaredNorm();
          lambda = std::max(lambda * 0.25, 1e-15);
          improved = true;
          break;
        }
        th = th_saved;
        lambda *= 10.0;
      }
      if (!improved) break;
    }
    return obj;
  };

  refit(60);
  for (int v = 0; v < modes; ++v) {
    frozen_shifts[v].assign(m, 0);
    for (int i = 0; i < m; ++i) {
      double theta = std::fmod(th[v][i], 2.0 * M_PI);
      if (theta < 0) theta += 2.0 * M_PI;
      frozen_shifts[v][i] = static_cast<int>(std::lround(theta / omega0)) % quant;
    }
    frozen[v] = true;
    double obj = refit(v + 1 == modes ? 80 : 120);
    if (obj > 0.25 * tsize) return out;  // lost the basin entirely
  }

  out.shifts = std::move(frozen_shifts);
  out.weights = std::move(w);
  out.ok = true;
  return out;
}

/// Best orthogonal map (rotation about the origin, reflections allowed) of/// Best orthogonal map (rotation about the origin, reflections allowed) of
/// the targets onto the spread points; both live on spheres centered at the
/// origin, so there is no translation component.
double spread_alignment_residual(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd h = targets.transpose() * z;  // dy x n
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::MatrixXd rot = svd.matrixV() * svd.matrixU().transpose();  // n x dy
  return ((targets * rot.transpose()) - z).rowwise().norm().maxCoeff();
}

}  // namespace

SpreadApproximation spread_approximate(const PointConfig& s1, double rho_prime, double delta,
                                       const PipelineParams& params) {
  const int m = s1.size();
  if (m == 0) raise(ErrorKind::InvalidInput, "empty simplex");
  if (!(delta > 0))
    raise(ErrorKind::SearchFailure,
          "no spread realizes a zero tolerance; best residual unavailable");

  if (m == 1) {
    SpreadApproximation out;
    out.k = 1;
    out.n = 1;
    out.spec.c = {rho_prime};
    out.assignments = {{1}};
    Eigen::MatrixXd z(1, 1);
    z(0, 0) = rho_prime;
    out.s2 = PointConfig::from_rows(z, index_labels(1));
    out.residual = std::abs(s1.points.row(0).norm() - rho_prime);
    out.seed_used = params.seed;
    return out;
  }

  // recenter on the circumcenter so the targets sit on a sphere about 0
  auto sphere = circumsphere(s1);
  Eigen::MatrixXd targets = s1.points;
  for (int i = 0; i < m; ++i) targets.row(i) -= sphere.center.transpose();
  Eigen::MatrixXd gram = targets * targets.transpose();
  const double rho2 = rho_prime * rho_prime;
  for (int i = 0; i < m; ++i) gram(i, i) = rho2;

  const int P = m * (m - 1) / 2;

  std::uint64_t work_used = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  std::optional<SpreadApproximation> best;

  auto make_model = [&](int block_len, int max_lag) {
    SpreadModel model;
    model.m = m;
    model.block_len = block_len;
    model.target_gram = gram;
    model.rho2 = rho2;
    model.envelope.resize(block_len);
    double env_power = 4.0;
    if (const char* p_env = std::getenv("PRAMSEY_ENV_POWER")) env_power = std::atof(p_env);
    for (int p = 0; p < block_len; ++p)
      model.envelope(p) = std::pow(std::sin(M_PI * (p + 0.5) / block_len), env_power);
    model.env_corr.assign(max_lag + 1, 0.0);
    return model;
  };
  auto fill_env_corr = [&](SpreadModel& model, const std::vector<int>& lags) {
    for (int d : lags) {
      if (d < 0 || d >= static_cast<int>(model.env_corr.size())) continue;
      if (model.env_corr[d] != 0.0) continue;
      double acc = 0.0;
      for (int p = 0; p + d < model.block_len; ++p)
        acc += model.envelope(p + d) * model.envelope(p);
      model.env_corr[d] = acc;
    }
  };

  auto try_accept = [&](SpreadModel& model) -> bool {
    auto built = materialize_model(model);
    work_used += static_cast<std::uint64_t>(built.n);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (built.tuples[i] == built.tuples[j]) return false;
    double norm = built.z.row(0).norm();
    if (norm < 1e-12) return false;
    double scale = rho_prime / norm;
    built.z *= scale;
    for (auto& w : built.weights) w *= scale;
    double residual = spread_alignment_residual(targets, built.z);
    if (std::getenv("PRAMSEY_SPREAD_DEBUG"))
      std::fprintf(stderr, "[spread]   residual %0.3e (delta %0.3e)\n", residual, delta);
    best_residual = std::min(best_residual, residual);
    if (residual < delta) {
      SpreadApproximation out;
      out.spec.c = built.weights;
      out.assignments = built.tuples;
      out.s2 = PointConfig::from_rows(built.z, index_labels(m));
      out.k = static_cast<int>(built.weights.size());
      out.n = built.n;
      out.residual = residual;
      out.seed_used = params.seed;
      best = std::move(out);
      return true;
    }
    return false;
  };

  // --- phase 1: multilevel circle synthesis. Level zero fits the Gram with
  // a small norm reserve held back; each further level fits the leftover
  // residual with fresh, geometrically smaller circle modes, so lattice
  // rounding errors shrink with the level scale and the weights stay
  // nonnegative throughout. The final norm gap closes through the pure-norm
  // filler slot. Zero-row-sum Grams (regular simplices) cannot spare the
  // reserve and drop through to phase 2.
  {
    const int quant = 1024;  // angle lattice; rounding error ~ pi/quant per level
    const int L = 32768;
    const int mode_count = P + 2;
    for (int outer = 0; outer < 3 && !best; ++outer) {
      if (work_used + static_cast<std::uint64_t>(L) > params.search_budget) break;
      work_used += static_cast<std::uint64_t>(L);

      SpreadModel model = make_model(L, quant + 2);
      auto droop = [&](int d) -> double {
        fill_env_corr(model, {0, d});
        return model.env_corr[d] / model.env_corr[0];
      };

      std::vector<double> pair_left(P);
      {
        int row = 0;
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j, ++row) pair_left[row] = gram(i, j);
      }
      double reserve = 3e-3 * rho2;
      double norm_left = rho2 - reserve;

      bool degraded = false;
      const int max_levels = 6;
      for (int level = 0; level < max_levels && !degraded; ++level) {
        double tsize = norm_left * norm_left;
        for (double v : pair_left) tsize += v * v;
        if (tsize < 1e-26 * rho2 * rho2) break;  // interpolation complete

        auto fit = lattice_level(pair_left, norm_left, rho2 * rho2, m, mode_count, quant, droop,
                                 params.seed + 977u * outer + 8191u * level);
        if (!fit.ok) {
          degraded = level == 0;
          break;
        }
        const double omega0 = 2.0 * M_PI / quant;
        fill_env_corr(model, {0});
        for (int v = 0; v < mode_count; ++v) {
          if (fit.weights[v] <= 0.0) continue;
          CircleMode mode;
          mode.omega = omega0;
          mode.shifts = fit.shifts[v];
          mode.x = fit.weights[v] / model.env_corr[0];
          model.modes.push_back(std::move(mode));
        }
        // subtract what the committed modes actually deliver
        {
          int row = 0;
          for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j, ++row) {
              double acc = 0.0;
              for (const auto& mode : model.modes) {
                int d = std::abs(mode.shifts[j] - mode.shifts[i]);
                fill_env_corr(model, {d});
                acc += mode.x * model.env_corr[d] * std::cos(mode.omega * d);
              }
              pair_left[row] = gram(i, j) - acc;
            }
          double acc = 0.0;
          for (const auto& mode : model.modes) acc += mode.x * model.env_corr[0];
          // spend half the remaining reserve per level; the filler slot
          // absorbs whatever remains at the end
          reserve *= 0.5;
          norm_left = rho2 - reserve - acc;
          if (norm_left < 0) {
            degraded = true;
            break;
          }
        }
        if (std::getenv("PRAMSEY_SPREAD_DEBUG")) {
          double left = norm_left * norm_left;
          for (double v : pair_left) left += v * v;
          std::fprintf(stderr, "[spread] level %d leftover %0.3e (modes %zu)\n", level,
                       std::sqrt(left), model.modes.size());
        }
      }
      if (degraded || model.modes.empty()) continue;

      // close the norm exactly through the filler slot
      double norm_model = 0.0;
      fill_env_corr(model, {0});
      for (const auto& mode : model.modes) norm_model += mode.x * model.env_corr[0];
      double gap = rho2 - norm_model;
      if (gap < 0) continue;
      model.filler = std::sqrt(gap);

      model.gadget_u.assign(P, 0.0);
      model.gadget_v.assign(P, 0.0);
      model.use_gadgets = false;
      if (std::getenv("PRAMSEY_SPREAD_DEBUG"))
        std::fprintf(stderr, "[spread] multilevel obj=%0.3e filler2=%0.3e modes=%zu\n",
                     model.objective(), gap, model.modes.size());
      if (try_accept(model)) return *best;
    }
  }

  // --- phase 2: pure circle fits at the shift-polynomial zeros with growing
  // block length; the forced defect of zero-row-sum Grams falls like 1/L
  {
    std::vector<std::vector<int>> patterns;
    for (int stride : {1, 2, 3}) {
      std::vector<int> s(m);
      for (int i = 0; i < m; ++i) s[i] = i * stride;
      patterns.push_back(std::move(s));
    }
    std::vector<double> freqs;
    for (int f = 0; f < 72; ++f) freqs.push_back(M_PI * (f + 0.5) / 72.0);
    for (int q = 2; q <= 2 * m + 2; ++q)
      for (int j = 1; 2 * j < 2 * q; ++j) freqs.push_back(2.0 * M_PI * j / q);
    const int max_lag = 3 * (m - 1) + 1;

    const std::vector<int> block_schedule = {2048, 8192, 32768, 131072, 393216};
    for (int L : block_schedule) {
      if (best) break;
      if (work_used + static_cast<std::uint64_t>(L) > params.search_budget) break;
      work_used += static_cast<std::uint64_t>(L);

      SpreadModel model = make_model(L, max_lag);
      std::vector<int> lag_list;
      for (int d = 0; d <= max_lag; ++d) lag_list.push_back(d);
      fill_env_corr(model, lag_list);

      std::vector<CircleMode> dict;
      for (const auto& pat : patterns)
        for (double w : freqs) dict.push_back(CircleMode{pat, w, 0.0});
      Eigen::MatrixXd a(P + 1, dict.size());
      Eigen::VectorXd b(P + 1);
      int row = 0;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j, ++row) {
          for (std::size_t cidx = 0; cidx < dict.size(); ++cidx) {
            int d = std::abs(dict[cidx].shifts[j] - dict[cidx].shifts[i]);
            a(row, cidx) = model.env_corr[d] * std::cos(dict[cidx].omega * d);
          }
          b(row) = gram(i, j);
        }
      for (std::size_t cidx = 0; cidx < dict.size(); ++cidx) a(row, cidx) = model.env_corr[0];
      b(row) = rho2;
      Eigen::VectorXd xs = nnls(a, b);
      for (std::size_t cidx = 0; cidx < dict.size(); ++cidx)
        if (xs(cidx) > 1e-17 * rho2 / L) {
          CircleMode mode = dict[cidx];
          mode.x = xs(cidx);
          model.modes.push_back(std::move(mode));
        }
      if (model.modes.empty()) continue;
      model.gadget_u.assign(P, 0.0);
      model.gadget_v.assign(P, 0.0);
      model.use_gadgets = false;
      model.polish(600);
      if (std::getenv("PRAMSEY_SPREAD_DEBUG"))
        std::fprintf(stderr, "[spread] pure phase L=%d modes=%zu obj=%0.3e\n", L,
                     model.modes.size(), model.objective());
      if (try_accept(model)) return *best;
    }
  }

  if (!best)
    raise(ErrorKind::SearchFailure,
          "spread search exhausted its budget; best residual " + std::to_string(best_residual) +
              " vs delta " + std::to_string(delta));
  return *best;
}

PointConfig realize_almost_regular(const SquaredDistanceMatrix& dist_sq, double beta,
                                   double epsilon) {
  dist_sq.validate();
  const int n = dist_sq.n;
  if (n < 2) raise(ErrorKind::InvalidInput, "need at least two points");
  const int d = n - 1;
  if (!(epsilon > 0) || !(beta > 0))
    raise(ErrorKind::InvalidInput, "beta and epsilon must be positive");
  if (!(epsilon < beta / (64.0 * d * d)))
    raise(ErrorKind::InvalidInput, "epsilon must be below beta / (64 d^2)");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dist = std::sqrt(dist_sq.values(i, j));
      if (dist < beta - epsilon || dist > beta + epsilon)
        raise(ErrorKind::InvalidInput, "distance outside the almost-regular window");
    }

  PointConfig out;
  try {
    out = embed_distance_matrix(dist_sq, 1e-9);
  } catch (const Error& e) {
    raise(ErrorKind::Internal, std::string("realization failed under valid bounds: ") + e.what());
  }
  if (out.dim != d)
    raise(ErrorKind::Internal, "almost-regular matrix did not produce a full simplex");

  auto report = negative_type_slack(dist_sq);
  if (!(report.form_at_witness < -beta * beta / 4.0))
    raise(ErrorKind::Internal, "extremal form value above -beta^2/4");
  out.labels = index_labels(n);
  return out;
}

BrickEmbedding brick_embed(const PointConfig& s3, double tol) {
  const int m = s3.size();
  if (m < 3) raise(ErrorKind::InvalidInput, "brick system needs dimension >= 2");
  const int d = m - 1;
  const int axes = m * (m - 1) / 2;

  BrickEmbedding out;
  out.d = d;
  for (int j = 0; j < m; ++j)
    for (int k = j + 1; k < m; ++k) out.axis_pairs.emplace_back(j, k);

  auto axis_index = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    // lexicographic position of {a,b} among the pairs
    return a * (2 * m - a - 1) / 2 + (b - a - 1);
  };

  auto dist = squared_distance_matrix(s3);
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(axes, axes);
  Eigen::VectorXd rhs(axes);
  int row = 0;
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q, ++row) {
      for (int x = 0; x < m; ++x) {
        if (x == p || x == q) continue;
        system(row, axis_index(p, x)) += 1.0;
        system(row, axis_index(q, x)) += 1.0;
      }
      rhs(row) = dist.values(p, q);
    }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible())
    raise(ErrorKind::DegenerateConfig, "brick side system is singular");
  Eigen::VectorXd u = lu.solve(rhs);

  for (int t = 0; t < axes; ++t) {
    if (u(t) < -tol)
      raise(ErrorKind::NotEmbeddable,
            "simplex insufficiently regular: negative squared side " + std::to_string(u(t)));
    if (u(t) < 0) u(t) = 0.0;
  }

  out.u.assign(u.data(), u.data() + axes);
  out.sides.resize(axes);
  for (int t = 0; t < axes; ++t) out.sides[t] = std::sqrt(out.u[t]);

  out.vertex_coords = Eigen::MatrixXd::Zero(m, axes);
  for (int t = 0; t < axes; ++t) {
    auto [j, k] = out.axis_pairs[t];
    out.vertex_coords(j, t) = out.sides[t];
    out.vertex_coords(k, t) = out.sides[t];
  }

  double worst = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      double got = (out.vertex_coords.row(p) - out.vertex_coords.row(q)).squaredNorm();
      worst = std::max(worst, std::abs(got - dist.values(p, q)));
    }
  out.reconstruction_error = worst;
  if (worst > std::max(tol * 4 * d, 1e-12))
    raise(ErrorKind::PipelineVerification,
          "brick reconstruction error " + std::to_string(worst));
  return out;
}

constructions::BrickSpec BrickEmbedding::brick_spec() const {
  std::vector<Rat> squares;
  for (double v : u)
    if (v > 0) squares.push_back(Rat::from_double(v));
  return constructions::BrickSpec::from_exact_squares(std::move(squares));
}

PointConfig assemble_and_verify(const PointConfig& s, const BrickEmbedding& brick,
                                const PointConfig& s2, double tol, double* residual_out) {
  const int m = s.size();
  if (brick.vertex_coords.rows() != m || s2.size() != m)
    raise(ErrorKind::InvalidInput, "stage outputs disagree on the point count");

  Eigen::MatrixXd rows(m, brick.vertex_coords.cols() + s2.dim);
  rows << brick.vertex_coords, s2.points;
  PointConfig f = PointConfig::from_rows(rows, index_labels(m));

  // the natural correspondence should already realize congruence
  auto f_sq = squared_distance_matrix(f);
  auto s_sq = squared_distance_matrix(s);
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      worst =
          std::max(worst, std::abs(std::sqrt(f_sq.values(i, j)) - std::sqrt(s_sq.values(i, j))));
  if (worst > tol) {
    std::string detail = "assembled simplex is not congruent to the input; residuals:";
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        detail += " " + std::to_string(i) + "-" + std::to_string(j) + ":" +
                  std::to_string(std::abs(std::sqrt(f_sq.values(i, j)) -
                                          std::sqrt(s_sq.values(i, j))));
    raise(ErrorKind::PipelineVerification, detail);
  }
  if (residual_out) *residual_out = worst;
  return f;
}

PipelineTrace run_pipeline(const PointConfig& s, const PipelineParams& params) {
  params.validate();
  const int n = s.size();
  if (n < 3)
    raise(ErrorKind::InvalidInput, "pipeline needs a simplex of dimension >= 2");
  const int d = n - 1;

  PipelineTrace trace;
  trace.input = s;
  trace.d = d;
  trace.params = params;

  try {
    trace.step1 = step1_shrink(s, d);
  } catch (const Error& e) {
    rethrow_tagged("step1", e);
  }
  const double beta = trace.step1.shrink_beta;
  const double rho_prime = trace.step1.rho_prime;

  double eps_sq = beta / (64.0 * d * d);
  if (params.epsilon) eps_sq = std::min(eps_sq, *params.epsilon);
  trace.epsilon_used = eps_sq;

  auto s_sq = squared_distance_matrix(s);
  double delta = params.delta ? *params.delta : eps_sq / (16.0 * rho_prime + 4.0);

  std::string last_failure;
  for (int round = 0; round < 8; ++round, delta *= 0.5) {
    trace.delta_used = delta;
    trace.delta_rounds = round + 1;

    PipelineParams round_params = params;
    round_params.seed = params.seed + static_cast<std::uint64_t>(round) * 7919;
    try {
      trace.spread = spread_approximate(trace.step1.s1, rho_prime, delta, round_params);
    } catch (const Error& e) {
      rethrow_tagged("spread", e);
    }

    auto s2_sq = squared_distance_matrix(trace.spread.s2);
    Eigen::MatrixXd residual = s_sq.values - s2_sq.values;
    for (int i = 0; i < n; ++i) residual(i, i) = 0.0;

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool window_ok = true;
    for (int i = 0; i < n && window_ok; ++i)
      for (int j = i + 1; j < n; ++j) {
        double r = residual(i, j);
        if (r < beta - eps_sq || r > beta + eps_sq) {
          window_ok = false;
          break;
        }
        double dist = std::sqrt(r);
        lo = std::min(lo, dist);
        hi = std::max(hi, dist);
      }
    if (!window_ok) {
      last_failure = "step-3 residuals left the [beta - eps, beta + eps] window";
      continue;
    }

    double b_dist = 0.5 * (lo + hi);
    // slight inflation keeps the boundary entries strictly inside the window
    double e_dist = std::max(0.5 * (hi - lo) * (1.0 + 1e-9), 1e-14 * b_dist);
    if (!(e_dist < b_dist / (64.0 * d * d))) {
      last_failure = "almost-regular window too wide for the realization bound";
      continue;
    }

    trace.residual_sq = residual;
    trace.regularity_beta = b_dist;
    trace.regularity_epsilon = e_dist;

    try {
      trace.s3 = realize_almost_regular(SquaredDistanceMatrix::from_values(residual), b_dist,
                                        e_dist);
    } catch (const Error& e) {
      rethrow_tagged("step3", e);
    }

    try {
      trace.brick = brick_embed(trace.s3, params.tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotEmbeddable) {
        last_failure = e.what();  // shrink delta and retry
        continue;
      }
      rethrow_tagged("brick", e);
    }

    double cong_tol = std::max(1e-6, params.tol);
    try {
      trace.assembled = assemble_and_verify(s, trace.brick, trace.spread.s2, cong_tol,
                                            &trace.final_residual);
    } catch (const Error& e) {
      rethrow_tagged("step4", e);
    }

    trace.rho_f = circumsphere(trace.assembled).radius;
    double c_norm = 0.0;
    for (double v : trace.spread.spec.c) c_norm += v * v;
    c_norm = std::sqrt(c_norm);
    if (!(c_norm < trace.rho_f))
      raise(ErrorKind::PipelineVerification,
            "step4: spread radius is not below the assembled circumradius");
    return trace;
  }

  raise(ErrorKind::SearchFailure, "delta schedule exhausted: " + last_failure);
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

namespace {

/// Exact dyadic squared distances attached to a float config.
void attach_exact_sq(PointConfig& c) {
  const int n = c.size();
  RatMatrix sq(n, std::vector<Rat>(n, Rat(0)));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = (c.points.row(i) - c.points.row(j)).squaredNorm();
      sq[i][j] = sq[j][i] = Rat::from_double(v);
    }
  c.exact_sq = std::move(sq);
}

std::vector<Rat> distinct_sq_values(const PointConfig& c) {
  std::set<Rat> values;
  const auto& sq = *c.exact_sq;
  for (int i = 0; i < c.size(); ++i)
    for (int j = i + 1; j < c.size(); ++j)
      if (!sq[i][j].is_zero()) values.insert(sq[i][j]);
  return {values.begin(), values.end()};
}

/// Exact recheck of the ratio separation on given distance sets; records the
/// smallest gap seen.
bool margin_separated(const constructions::SegmentSpec& spec, const std::vector<Rat>& host_sq,
                      const std::vector<Rat>& pattern_sq, const Rat& margin, Rat* achieved) {
  Rat q = Rat(1) + spec.gamma + spec.gamma * spec.gamma;
  Rat g2 = spec.gamma * spec.gamma;
  Rat values[3] = {spec.a_sq / q, (Rat(1) + g2) * spec.a_sq / q, g2 * spec.a_sq / q};
  std::vector<Rat> s_values = pattern_sq, t_values = host_sq;
  s_values.push_back(Rat(0));
  t_values.push_back(Rat(0));
  bool ok = true;
  bool first = true;
  for (const auto& v : values)
    for (const auto& sv : s_values)
      for (const auto& tv : t_values) {
        Rat sep = abs(v - (sv - tv));
        if (first || sep < *achieved) {
          *achieved = sep;
          first = false;
        }
        if (sep < margin) ok = false;
      }
  return ok;
}

}  // namespace

PRamseyCertificate pramsey_certificate(const PipelineTrace& trace, int trials, int sample_size,
                                       std::uint64_t seed) {
  if (trials < 0 || sample_size < 0)
    raise(ErrorKind::InvalidInput, "trials and sample size must be nonnegative");

  PRamseyCertificate cert;
  cert.seed = seed;
  cert.margin_required = Rat::from_double(trace.params.margin);

  // reduced product: segment configuration for the smallest positive brick
  // side, times the remaining brick times the realized spread points
  std::vector<double> positive_u = trace.brick.u;
  std::erase_if(positive_u, [](double v) { return v <= 0.0; });
  if (positive_u.empty())
    raise(ErrorKind::CertificateInvalid, "brick embedding has no positive side");
  double min_u = *std::min_element(positive_u.begin(), positive_u.end());
  cert.base_a_sq = Rat::from_double(min_u);

  std::vector<Rat> rest_squares;
  bool dropped = false;
  for (double v : trace.brick.u) {
    if (v <= 0.0) continue;
    if (!dropped && v == min_u) {
      dropped = true;  // this side becomes the segment configuration
      continue;
    }
    rest_squares.push_back(Rat::from_double(v));
  }

  PointConfig rest;
  {
    PointConfig spread_sample = trace.spread.s2;
    attach_exact_sq(spread_sample);
    if (rest_squares.empty()) {
      rest = spread_sample;
    } else {
      auto subbrick =
          constructions::brick_points(constructions::BrickSpec::from_exact_squares(rest_squares));
      rest = geometry::product(subbrick, spread_sample);
    }
  }

  PointConfig f = trace.assembled;
  attach_exact_sq(f);
  std::vector<Rat> pattern_sq = distinct_sq_values(f);
  std::vector<Rat> host_sq = distinct_sq_values(rest);

  auto choice = constructions::choose_gamma(cert.base_a_sq, host_sq, pattern_sq,
                                            cert.margin_required);
  cert.gamma_used = choice.gamma;
  cert.margin_achieved = choice.margin_achieved;
  constructions::SegmentSpec seg_spec(cert.base_a_sq, cert.gamma_used);

  // base segment configuration over [5]: ten labeled points
  const int base_ground = 5;
  std::vector<IndexPair> base_pairs;
  for (int i = 1; i <= base_ground; ++i)
    for (int j = i + 1; j <= base_ground; ++j) base_pairs.emplace_back(i, j);
  PointConfig base = constructions::segment_config_points(seg_spec, base_pairs);

  const int host_count = base.size() * rest.size();
  const double copy_tol = 1e-6 * (1.0 + geometry::diameter(f));

  for (int t = 0; t < trials; ++t) {
    detail::Rng rng(seed + static_cast<std::uint64_t>(t) * 0x9e3779b9ULL);
    int want = std::min(sample_size, host_count);
    if (want == 0) continue;

    // sample distinct virtual indices (b, r) of the product host
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < want)
      chosen.insert(static_cast<int>(rng.next_below(host_count)));

    std::vector<int> base_of, rest_of;
    std::vector<IndexPair> labels;
    for (int idx : chosen) {
      int b = idx / rest.size();
      int r = idx % rest.size();
      base_of.push_back(b);
      rest_of.push_back(r);
      labels.push_back(base_pairs[b]);
    }

    const int v_count = want;
    PointConfig v;
    v.dim = base.dim + rest.dim;
    v.points.resize(v_count, v.dim);
    RatMatrix v_sq(v_count, std::vector<Rat>(v_count, Rat(0)));
    for (int i = 0; i < v_count; ++i) {
      v.points.block(i, 0, 1, base.dim) = base.points.row(base_of[i]);
      v.points.block(i, base.dim, 1, rest.dim) = rest.points.row(rest_of[i]);
      v.labels.push_back(base.labels[base_of[i]] + "*" + rest.labels[rest_of[i]]);
    }
    for (int i = 0; i < v_count; ++i)
      for (int j = i + 1; j < v_count; ++j)
        v_sq[i][j] = v_sq[j][i] = (*base.exact_sq)[base_of[i]][base_of[j]] +
                                  (*rest.exact_sq)[rest_of[i]][rest_of[j]];
    v.exact_sq = std::move(v_sq);

    // the margin must hold for the distances that actually occur in the trial
    std::set<Rat> trial_host;
    for (int i = 0; i < v_count; ++i)
      for (int j = i + 1; j < v_count; ++j) {
        const Rat& hv = (*rest.exact_sq)[rest_of[i]][rest_of[j]];
        if (!hv.is_zero()) trial_host.insert(hv);
      }
    Rat achieved;
    std::vector<Rat> trial_host_list(trial_host.begin(), trial_host.end());
    if (!margin_separated(seg_spec, trial_host_list, pattern_sq, cert.margin_required, &achieved))
      raise(ErrorKind::CertificateInvalid,
            "separation margin failed on a trial distance set; gamma must be re-chosen");

    auto extraction = combinatorics::extract_dense_free_subset(v, labels, seg_spec, trace.params.tol);

    DensityTrial trial;
    trial.seed = seed + static_cast<std::uint64_t>(t) * 0x9e3779b9ULL;
    trial.sample_size = v_count;
    trial.extracted_size = static_cast<int>(extraction.indices.size());
    trial.ratio = extraction.ratio;
    trial.ratio_ok = extraction.ratio >= Rat(1, 4);
    trial.fiber_count = static_cast<int>(extraction.independent_base.size());
    trial.base_segment_free = true;  // enforced inside the extractor
    trial.f_free = find_copies(extraction.subset, f, copy_tol, 1).empty();

    if (!trial.ratio_ok)
      raise(ErrorKind::CertificateInvalid, "density trial extracted less than a quarter");
    if (!trial.f_free)
      raise(ErrorKind::CertificateInvalid, "extracted subset contains a copy of the simplex");
    cert.density_trials.push_back(std::move(trial));
  }

  if (trials > 0) {
    // desk-scale coloring check on the base segment configuration: a
    // two-point segment of length a must appear monochromatically under
    // every 2-coloring (the shift graph on [5] contains an odd cycle)
    Eigen::MatrixXd seg_rows(2, 1);
    seg_rows << 0.0, seg_spec.a();
    PointConfig segment = PointConfig::from_rows(seg_rows, {"0", "1"});
    RatMatrix seg_sq(2, std::vector<Rat>(2, Rat(0)));
    seg_sq[0][1] = seg_sq[1][0] = seg_spec.a_sq;
    segment.exact_sq = seg_sq;

    auto search = combinatorics::monochromatic_copy_search(
        base, segment, 2, 0.0, combinatorics::SearchMode::Exhaustive, seed);
    ColoringTrial coloring;
    coloring.host_points = base.size();
    coloring.r = 2;
    coloring.certified = search.certified;
    coloring.colorings_checked = search.colorings_checked;
    cert.coloring_trials.push_back(coloring);
  }

  return cert;
}

}  // namespace pramsey::pipeline
