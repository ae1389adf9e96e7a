#pragma once

#include <utility>
#include <vector>

#include "sparsekm/model.hpp"

namespace sparsekm {

// Fit of one predictor matrix against r responses; responses are fit as
// independent single-response lassos sharing the predictors, each picking
// its own penalty by AIC.
struct LassoFit {
  Vector intercepts;   // r
  Matrix coefficients; // q x r, original (unstandardized) scale
  Matrix residuals;    // r x m, at the chosen penalty
  Vector lambda;       // chosen penalty per response
  std::vector<std::vector<std::pair<double, double>>> path;  // per response: (lambda, aic)
  std::vector<int> dropped_predictors;  // 1-based constant columns, coefficient forced to 0
};

// Cyclic coordinate descent over a descending lambda grid, warm-started
// between grid points. Predictors are standardized internally (mean 0,
// population sd 1) and coefficients back-transformed; responses are centered
// and the intercept recovered analytically. The objective is
// (1/2m)||y - b0 - X b||^2 + lambda ||b||_1, so lambda_max = max_j |x_j'y|/m
// on the standardized scale.
//
// AIC = m log(RSS/m) + 2 df with df = #nonzero coefficients; the returned
// fit minimizes AIC along the path. Empty grid: 50 log-spaced lambdas from
// lambda_max down to 1e-3 lambda_max, per response.
LassoFit lasso_path(const Matrix& xpred, const Matrix& y, const Vector& grid = Vector());

}  // namespace sparsekm
