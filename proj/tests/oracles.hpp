#pragma once

// Independent reference implementations used to freeze expected values in
// tests. These deliberately avoid the library's solver paths.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sparsekm/model.hpp"
#include "sparsekm/rng.hpp"

namespace sparsekm::oracle {

// Exhaustive best 2-partition of {0..n-1} maximizing <A, Z(partition)> with
// Z the membership matrix. Both clusters non-empty; n <= 24.
inline std::pair<Assignment, double> best_two_partition(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  if (n < 2 || n > 24) throw std::invalid_argument("best_two_partition: n out of range");
  Assignment best;
  double best_obj = -std::numeric_limits<double>::infinity();
  // fix observation 0 in cluster 1 to kill the label symmetry
  for (uint32_t mask = 0; mask + 1 < (1u << (n - 1)); ++mask) {
    std::vector<int> labels(static_cast<size_t>(n), 1);
    for (int i = 1; i < n; ++i)
      if (mask & (1u << (i - 1))) labels[static_cast<size_t>(i)] = 2;
    int n2 = 0;
    for (int lab : labels) n2 += (lab == 2);
    if (n2 == 0 || n2 == n) continue;
    Assignment cand;
    cand.labels = labels;
    cand.K = 2;
    const Matrix z = membership_from_labels(cand);
    const double obj = (a.array() * z.array()).sum();
    if (obj > best_obj) {
      best_obj = obj;
      best = std::move(cand);
    }
  }
  return {best, best_obj};
}

// FISTA on the standardized lasso problem
//   min (1/2m)||yc - Xs b||^2 + lambda ||b||_1,
// followed by the same back-transform the library uses. Independent of the
// coordinate-descent path.
inline Vector projected_gradient_lasso(const Matrix& x, const Vector& y, double lambda,
                                       int iters = 200000) {
  const int m = static_cast<int>(x.rows());
  const int q = static_cast<int>(x.cols());
  Vector xmean = x.colwise().mean();
  Matrix xs = x.rowwise() - xmean.transpose();
  Vector xsd(q);
  for (int j = 0; j < q; ++j) {
    xsd(j) = std::sqrt(xs.col(j).squaredNorm() / m);
    if (xsd(j) > 1e-12) xs.col(j) /= xsd(j);
  }
  const double ymean = y.mean();
  const Vector yc = y.array() - ymean;

  const Matrix gram = xs.transpose() * xs / m;
  const Vector xty = xs.transpose() * yc / m;
  // Lipschitz constant of the smooth part
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double lip = std::max(es.eigenvalues().maxCoeff(), 1e-12);

  Vector b = Vector::Zero(q), bv = b, b_prev = b;
  double t = 1.0;
  for (int it = 0; it < iters; ++it) {
    const Vector grad = gram * bv - xty;
    Vector step = bv - grad / lip;
    const double thr = lambda / lip;
    for (int j = 0; j < q; ++j)
      step(j) = (step(j) > thr) ? step(j) - thr : ((step(j) < -thr) ? step(j) + thr : 0.0);
    b_prev = b;
    b = step;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    bv = b + ((t - 1.0) / t_next) * (b - b_prev);
    t = t_next;
    if ((b - b_prev).lpNorm<Eigen::Infinity>() < 1e-12 && it > 100) break;
  }
  for (int j = 0; j < q; ++j) b(j) = (xsd(j) > 1e-12) ? b(j) / xsd(j) : 0.0;
  return b;
}

// Random unit vector orthogonal to every cluster indicator.
inline Vector random_unit_in_gamma(const Assignment& truth, Rng& rng) {
  const int n = truth.n();
  const Matrix proj = Matrix::Identity(n, n) - membership_from_labels(truth);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  v = proj * v;
  const double nrm = v.norm();
  return (nrm > 0) ? Vector(v / nrm) : Vector::Zero(n);
}

}  // namespace sparsekm::oracle
