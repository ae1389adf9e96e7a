#pragma once

#include <vector>

#include "sparsekm/model.hpp"

namespace sparsekm {

// Disjoint feature blocks of size 2 (last of size 3 when p is odd) covering
// all p features. Indices are 0-based rows of X.
struct BlockPartition {
  std::vector<std::vector<int>> blocks;

  static BlockPartition consecutive(int p);
  void validate(int p) const;
};

struct IseeBlockInfo {
  std::vector<int> features;      // 1-based
  std::vector<double> lambda1;    // chosen lasso penalties, cluster 1
  std::vector<double> lambda2;    // cluster 2
  double residual_cov_cond = 0.0;
  bool ridged = false;            // residual covariance needed a ridge
};

struct IseeEstimate {
  Vector mu1_tilde;  // p, transformed cluster-1 mean
  Vector mu2_tilde;  // p
  Matrix Xtilde;     // p x n, estimated transformed data
  Vector omega_diag; // p, precision-diagonal estimates
  std::vector<IseeBlockInfo> per_block;

  bool any_ridged() const;
};

// Blockwise-regression estimator of the innovated transformation: for each
// feature block A, the block coordinates are regressed on the remaining
// features separately within each cluster (lasso, AIC-tuned), the residuals
// of both clusters are pooled, and
//   Omega_AA  = ((1/n) E E')^{-1},
//   mu~_k|A   = Omega_AA * alpha_k            (never formed any other way),
//   X~_A      = [mu~ per column] + Omega_AA * E.
// g1/g2 are disjoint 0-based column sets covering all n observations, each
// with at least 3 members. Blocks are independent, so any thread count
// produces bit-identical output.
IseeEstimate isee(const Dataset& data, const std::vector<int>& g1, const std::vector<int>& g2,
                  int threads = 1);

}  // namespace sparsekm
