#include "sparsekm/lasso.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsekm {

namespace {

constexpr int kMaxSweeps = 20000;
constexpr double kSweepTol = 1e-7;
constexpr double kKktRel = 1e-6;

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Largest violation of the stationarity conditions given the current
// gradient g = Xs' r / m: active coordinates must sit at |g_j| = lambda,
// inactive at |g_j| <= lambda.
double kkt_violation(const Vector& grad, const Vector& beta, double lambda,
                     const std::vector<char>& dropped) {
  double v = 0.0;
  for (int j = 0; j < beta.size(); ++j) {
    if (dropped[static_cast<size_t>(j)]) continue;
    if (beta(j) != 0.0)
      v = std::max(v, std::abs(std::abs(grad(j)) - lambda));
    else
      v = std::max(v, std::max(0.0, std::abs(grad(j)) - lambda));
  }
  return v;
}

#ifndef NDEBUG
double objective(const Matrix& xs, const Vector& r, const Vector& beta, double lambda, int m) {
  (void)xs;
  return 0.5 * r.squaredNorm() / m + lambda * beta.lpNorm<1>();
}
#endif

}  // namespace

LassoFit lasso_path(const Matrix& xpred, const Matrix& y, const Vector& grid) {
  const int m = static_cast<int>(xpred.rows());
  const int q = static_cast<int>(xpred.cols());
  const int r = static_cast<int>(y.cols());
  if (m < 2) throw std::invalid_argument("lasso_path: need m >= 2");
  if (y.rows() != m) throw std::invalid_argument("lasso_path: response length mismatch");
  if (q < 1 || r < 1) throw std::invalid_argument("lasso_path: empty problem");
  for (int i = 1; i < grid.size(); ++i)
    if (grid(i) > grid(i - 1)) throw std::invalid_argument("lasso_path: grid must be descending");

  // Standardize predictors once; responses share them.
  Vector xmean = xpred.colwise().mean();
  Matrix xs = xpred.rowwise() - xmean.transpose();
  Vector xsd(q);
  std::vector<char> dropped(static_cast<size_t>(q), 0);
  LassoFit fit;
  for (int j = 0; j < q; ++j) {
    xsd(j) = std::sqrt(xs.col(j).squaredNorm() / m);
    const double scale = std::max(1.0, std::abs(xmean(j)));
    if (xsd(j) <= 1e-12 * scale) {
      dropped[static_cast<size_t>(j)] = 1;
      fit.dropped_predictors.push_back(j + 1);
      xs.col(j).setZero();
      xsd(j) = 1.0;  // keeps back-transform harmless
    } else {
      xs.col(j) /= xsd(j);
    }
  }

  fit.intercepts.resize(r);
  fit.coefficients = Matrix::Zero(q, r);
  fit.residuals.resize(r, m);
  fit.lambda.resize(r);
  fit.path.resize(static_cast<size_t>(r));

  for (int resp = 0; resp < r; ++resp) {
    const double ymean = y.col(resp).mean();
    const Vector yc = y.col(resp).array() - ymean;

    double lambda_max = 0.0;
    {
      const Vector g0 = xs.transpose() * yc / m;
      for (int j = 0; j < q; ++j)
        if (!dropped[static_cast<size_t>(j)]) lambda_max = std::max(lambda_max, std::abs(g0(j)));
    }

    Vector lambdas;
    if (grid.size() > 0) {
      lambdas = grid;
    } else if (lambda_max <= 0.0) {
      lambdas = Vector::Zero(1);
    } else {
      const int count = 50;
      lambdas.resize(count);
      for (int i = 0; i < count; ++i)
        lambdas(i) = lambda_max * std::pow(1e-3, static_cast<double>(i) / (count - 1));
    }

    Vector beta = Vector::Zero(q);  // standardized scale, warm-started along the path
    Vector resid = yc;
    double best_aic = std::numeric_limits<double>::infinity();
    Vector best_beta = beta;
    Vector best_resid = resid;
    double best_lambda = lambdas(0);

    for (int li = 0; li < lambdas.size(); ++li) {
      const double lambda = lambdas(li);
      const double kkt_tol = std::max(kKktRel * lambda, 1e-12 * std::max(1.0, lambda_max));
      for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
#ifndef NDEBUG
        const double obj_before = objective(xs, resid, beta, lambda, m);
#endif
        double max_delta = 0.0;
        for (int j = 0; j < q; ++j) {
          if (dropped[static_cast<size_t>(j)]) continue;
          const double gj = xs.col(j).dot(resid) / m;
          const double bj_new = soft_threshold(beta(j) + gj, lambda);
          const double delta = bj_new - beta(j);
          if (delta != 0.0) {
            resid -= delta * xs.col(j);
            beta(j) = bj_new;
            max_delta = std::max(max_delta, std::abs(delta));
          }
        }
#ifndef NDEBUG
        assert(objective(xs, resid, beta, lambda, m) <= obj_before + 1e-10 * (1.0 + std::abs(obj_before)));
#endif
        if (max_delta == 0.0) break;  // exact coordinate-wise fixed point
        if (max_delta <= kSweepTol) {
          const Vector grad = xs.transpose() * resid / m;
          if (kkt_violation(grad, beta, lambda, dropped) <= kkt_tol) break;
        }
      }

      const double mse = std::max(resid.squaredNorm() / m, 1e-300);
      const int df = static_cast<int>((beta.array() != 0.0).count());
      const double aic = m * std::log(mse) + 2.0 * df;
      fit.path[static_cast<size_t>(resp)].emplace_back(lambda, aic);
      if (aic < best_aic) {
        best_aic = aic;
        best_beta = beta;
        best_resid = resid;
        best_lambda = lambda;
      }
    }

    // Back-transform to the original predictor scale.
    Vector coef = best_beta.array() / xsd.array();
    for (int j = 0; j < q; ++j)
      if (dropped[static_cast<size_t>(j)]) coef(j) = 0.0;
    fit.coefficients.col(resp) = coef;
    fit.intercepts(resp) = ymean - coef.dot(xmean);
    fit.residuals.row(resp) = best_resid.transpose();
    fit.lambda(resp) = best_lambda;
  }
  return fit;
}

}  // namespace sparsekm
