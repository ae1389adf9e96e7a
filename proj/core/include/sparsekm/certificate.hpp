#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sparsekm/model.hpp"

namespace sparsekm {

// Inputs for constructing and checking the dual certificate of the K-means
// SDP on A = X_S' X_S at a labeled instance. lambda defaults to
// lambda_dot = sigma2 |S| + m * delta2 / 4 built from the supplied metadata.
struct CertificateInput {
  Matrix X_S;  // |S| x n
  Assignment truth;
  std::optional<double> lambda;
  double sigma2 = 0.0;
  std::optional<double> s_cap_s0_sep;  // restricted separation Delta^2_{S n S0}

  void validate() const;  // cluster sizes >= 2
};

struct ConditionResult {
  bool pass = false;
  double margin = 0.0;  // signed distance to the tolerance boundary
};

struct CertificateReport {
  std::array<ConditionResult, 5> conditions;  // C1..C5
  double U_S = 0.0;
  double L1_S = 0.0;
  double lambda_used = 0.0;
  double W_min_eig = 0.0;

  bool all_pass() const;
};

// D_{kli} = ||Xbar_l - X_i||^2 - ||Xbar_k - X_i||^2 for i in cluster k.
// k, l are 1-based cluster ids; i is a 0-based observation column.
double compute_D(const Matrix& x_s, const Assignment& truth, int k, int l, int i);

// U = min_{k != l} (1/|G_k| + 1/|G_l|)^{-1} min_{i in G_k} D_{kli}.
double compute_U(const Matrix& x_s, const Assignment& truth);

// Largest eigenvalue of P E'E P with E = X_S - centers (centers |S| x K,
// true per-cluster means) and P the projector onto span(1_{G_k})^perp.
double compute_L1(const Matrix& x_s, const Assignment& truth, const Matrix& centers);

// m = 2 min_{k != l} (1/|G_k| + 1/|G_l|)^{-1}.
double pairwise_min_m(const Assignment& truth);

// sigma2 * S_size + m * delta2 / 4.
double lambda_dot(double sigma2, int s_size, double m, double delta2);

struct DualCertificate {
  Vector alpha;  // n
  Matrix B;      // n x n, zero diagonal blocks
  Matrix W;      // n x n
};

// Exact formula evaluation of the parametrized candidates (alpha, B, W) at
// the input's lambda. Throws NumericalError when a block row-sum denominator
// 1'r^{(l,k)} is within 1e-12 * scale of zero, naming the block.
DualCertificate build_certificate(const CertificateInput& input);

// Evaluates C1..C5 at tolerances relative to scale = ||X_S' X_S||_F:
//   C1 min entry of B >= -1e-8 scale      C2 min eig sym(W) >= -1e-6 ||W||_F
//   C3 |<W,Z*>| <= 1e-6 scale             C4 |<B,Z*>| <= 1e-6 scale
//   C5 min off-block entry of B > 1e-10 scale
CertificateReport check_conditions(const CertificateInput& input);

// Reports over an even lambda grid on [L1, U], for phase diagrams.
std::vector<std::pair<double, CertificateReport>> scan_lambda(const CertificateInput& input,
                                                              int count);

}  // namespace sparsekm
