#include "sparsekm/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsekm/errors.hpp"

namespace sparsekm {

namespace {

// Squared distance of every point to one center.
Vector sq_dists(const Matrix& points, const Vector& center) {
  return (points.colwise() - center).colwise().squaredNorm().transpose();
}

void kmeanspp_seed(const Matrix& points, int K, Rng& rng, Matrix& centers) {
  const int n = static_cast<int>(points.cols());
  centers.resize(points.rows(), K);
  centers.col(0) = points.col(rng.uniform_int(n));
  Vector d2 = sq_dists(points, centers.col(0));
  for (int k = 1; k < K; ++k) {
    const double total = d2.sum();
    int pick;
    if (total <= 0.0) {
      pick = rng.uniform_int(n);  // all points coincide with chosen centers
    } else {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        target -= d2(i);
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.col(k) = points.col(pick);
    d2 = d2.cwiseMin(sq_dists(points, centers.col(k)));
  }
}

double lloyd(const Matrix& points, int K, Rng& rng, int max_iters, std::vector<int>& labels,
             Matrix& centers) {
  const int n = static_cast<int>(points.cols());
  kmeanspp_seed(points, K, rng, centers);
  labels.assign(static_cast<size_t>(n), 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    // assign
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.col(i) - centers.col(0)).squaredNorm();
      for (int k = 1; k < K; ++k) {
        const double d = (points.col(i) - centers.col(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (labels[static_cast<size_t>(i)] != best) {
        labels[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    // empty-cluster repair: give the cluster the point farthest from its
    // current centroid
    std::vector<int> counts(static_cast<size_t>(K), 0);
    for (int lab : labels) ++counts[static_cast<size_t>(lab)];
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<size_t>(k)] > 0) continue;
      int farthest = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const int lab = labels[static_cast<size_t>(i)];
        if (counts[static_cast<size_t>(lab)] <= 1) continue;
        const double d = (points.col(i) - centers.col(lab)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      if (farthest < 0) throw NumericalError("kmeans: cannot repair empty cluster");
      --counts[static_cast<size_t>(labels[static_cast<size_t>(farthest)])];
      labels[static_cast<size_t>(farthest)] = k;
      ++counts[static_cast<size_t>(k)];
      changed = true;
    }
    // update
    centers.setZero();
    for (int i = 0; i < n; ++i) centers.col(labels[static_cast<size_t>(i)]) += points.col(i);
    for (int k = 0; k < K; ++k) centers.col(k) /= static_cast<double>(counts[static_cast<size_t>(k)]);
    if (!changed && iter > 0) break;
  }

  double sse = 0.0;
  for (int i = 0; i < n; ++i)
    sse += (points.col(i) - centers.col(labels[static_cast<size_t>(i)])).squaredNorm();
  return sse;
}

}  // namespace

KmeansResult kmeans(const Matrix& points, int K, Rng& rng, int restarts, int max_iters) {
  const int n = static_cast<int>(points.cols());
  if (K < 1 || n < K) throw std::invalid_argument("kmeans: need n >= K >= 1");
  KmeansResult best;
  best.sse = std::numeric_limits<double>::infinity();
  std::vector<int> labels;
  Matrix centers;
  for (int r = 0; r < restarts; ++r) {
    const double sse = lloyd(points, K, rng, max_iters, labels, centers);
    if (sse < best.sse) {
      best.sse = sse;
      best.labels = labels;
      best.centers = centers;
    }
  }
  return best;
}

Assignment spectral_cluster(const AffinityInput& input, int K, uint64_t seed) {
  if (K < 1 || K > 8) throw std::invalid_argument("spectral_cluster: K must be in {1..8}");

  Matrix embedding;  // d x n points fed to k-means
  int n;
  if (input.mode == AffinityInput::Mode::RawData) {
    const Matrix& x = input.payload;
    n = static_cast<int>(x.cols());
    if (n < K) throw std::invalid_argument("spectral_cluster: n < K");
    const Vector grand_mean = x.rowwise().mean();
    const Matrix xc = x.colwise() - grand_mean;
    const Matrix gram = xc.transpose() * xc;
    const int d = std::max(1, K - 1);
    Vector evals;
    Matrix evecs;
    eigh_largest(symmetrized(gram), d, evals, evecs);
    embedding = evecs.transpose();
  } else {
    const Matrix& z = input.payload;
    n = static_cast<int>(z.rows());
    if (z.cols() != n) throw std::invalid_argument("spectral_cluster: affinity must be square");
    if ((z - z.transpose()).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("spectral_cluster: affinity not symmetric within 1e-8");
    if (n < K) throw std::invalid_argument("spectral_cluster: n < K");
    // Top K eigenvectors: the eigenvalue-1 eigenspace of an exact membership
    // matrix has multiplicity K, and a single leading eigenvector is an
    // arbitrary rotation inside it.
    Vector evals;
    Matrix evecs;
    eigh_largest(symmetrized(z), K, evals, evecs);
    embedding = evecs.transpose();
  }

  Rng rng = Rng::derive(seed, 0x5bec7ea1u);
  const KmeansResult km = kmeans(embedding, K, rng);

  Assignment a;
  a.K = K;
  a.labels.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) a.labels[static_cast<size_t>(i)] = km.labels[static_cast<size_t>(i)] + 1;
  a.validate(false);
  return a;
}

}  // namespace sparsekm
