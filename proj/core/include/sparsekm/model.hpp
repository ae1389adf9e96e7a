#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "sparsekm/linalg.hpp"

namespace sparsekm {

struct ScenarioSpec;

// Cluster labels for n observations. Labels are 1-based cluster ids in
// {1..K}; observation indices elsewhere in the API are 0-based columns.
struct Assignment {
  std::vector<int> labels;
  int K = 0;

  int n() const { return static_cast<int>(labels.size()); }

  // Member indices (0-based) per cluster, clusters ordered 1..K.
  std::vector<std::vector<int>> groups() const;
  std::vector<int> sizes() const;

  void validate(bool allow_empty_clusters = false) const;
};

// p x n data matrix, observations in columns.
struct Dataset {
  Matrix X;
  std::optional<Assignment> truth;
  std::shared_ptr<const ScenarioSpec> gen;

  int p() const { return static_cast<int>(X.rows()); }
  int n() const { return static_cast<int>(X.cols()); }
  void validate() const;
};

enum class CovKind { IdentityScaled, ExplicitCovariance, ExplicitPrecision };

struct CovarianceModel {
  CovKind kind = CovKind::IdentityScaled;
  int p = 0;
  double sigma2 = 1.0;  // IdentityScaled
  Matrix mat;           // Sigma or Omega for the explicit kinds

  static CovarianceModel identity_scaled(int p, double sigma2);
  static CovarianceModel explicit_covariance(Matrix sigma);
  static CovarianceModel explicit_precision(Matrix omega);

  // Symmetry within 1e-10 and strictly positive spectrum.
  void validate() const;

  Matrix covariance() const;  // dense Sigma (inverts when Omega is stored)
  Matrix precision() const;   // dense Omega
  Vector precision_diag() const;
};

// Tolerances for the lifted membership-matrix invariants.
struct MembershipTols {
  double symmetry = 1e-9;
  double trace = 1e-9;
  double row_sum = 1e-9;
  double entry = 1e-9;
  double min_eig = 1e-7;
};

struct MembershipCheck {
  double symmetry_err = 0;
  double trace_err = 0;
  double row_sum_err = 0;
  double min_entry = 0;
  double min_eigenvalue = 0;
  bool symmetric = false, trace_ok = false, rows_ok = false, nonneg_ok = false, psd_ok = false;
  bool all() const { return symmetric && trace_ok && rows_ok && nonneg_ok && psd_ok; }
};

MembershipCheck check_membership(const Matrix& z, int K, const MembershipTols& tol = {});

// Fraction of disagreeing labels minimized over cluster-label permutations.
// Exhaustive over K! permutations; K <= 8.
double misclustering_rate(const Assignment& a, const Assignment& b);

// Z with 1/|G_k| inside cluster k's diagonal block, 0 elsewhere.
// Every cluster must be non-empty.
Matrix membership_from_labels(const Assignment& a);

// Feature index sets are 1-based and kept in ascending order.
using FeatureSet = std::vector<int>;

// (true positives, false positives) of `selected` against `truth_support`.
std::pair<int, int> selection_confusion(const FeatureSet& selected,
                                        const FeatureSet& truth_support, int p);

// Rows of X restricted to a 1-based feature set, preserving order.
Matrix rows_subset(const Matrix& x, const FeatureSet& s);
Matrix submatrix(const Matrix& m, const FeatureSet& rows, const FeatureSet& cols);

}  // namespace sparsekm
