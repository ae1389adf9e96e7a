#pragma once

#include "sparsekm/model.hpp"

namespace sparsekm {

// Thresholding rules for the discriminating-direction estimates. All use
// natural logarithms and return 1-based feature indices in ascending order.

// { j : |beta_hat_j| > sqrt(2 omega_jj n log(2p)) / sqrt(n1 n2) }
FeatureSet select_known_cov(const Vector& beta_hat, const Vector& omega_diag, int n, int p,
                            int n1, int n2);

// { j : |mu_diff_j| > sqrt(log n * log p / n) }
FeatureSet select_isee(const Vector& mu_diff, int n, int p);

// The known-covariance rule with estimated precision diagonals.
FeatureSet select_isee_maximal(const Vector& mu_diff, const Vector& omega_diag, int n, int p,
                               int n1, int n2);

}  // namespace sparsekm
