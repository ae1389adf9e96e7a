#include "sparsekm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sparsekm/errors.hpp"

namespace sparsekm {

std::vector<std::vector<int>> Assignment::groups() const {
  std::vector<std::vector<int>> g(static_cast<size_t>(K));
  for (int i = 0; i < n(); ++i) {
    const int lab = labels[static_cast<size_t>(i)];
    if (lab < 1 || lab > K) throw std::invalid_argument("label out of {1..K}");
    g[static_cast<size_t>(lab - 1)].push_back(i);
  }
  return g;
}

std::vector<int> Assignment::sizes() const {
  std::vector<int> s(static_cast<size_t>(K), 0);
  for (int lab : labels) {
    if (lab < 1 || lab > K) throw std::invalid_argument("label out of {1..K}");
    ++s[static_cast<size_t>(lab - 1)];
  }
  return s;
}

void Assignment::validate(bool allow_empty_clusters) const {
  if (K < 1) throw std::invalid_argument("Assignment: K must be >= 1");
  if (labels.empty()) throw std::invalid_argument("Assignment: empty label vector");
  const auto s = sizes();
  if (!allow_empty_clusters && std::any_of(s.begin(), s.end(), [](int c) { return c == 0; }))
    throw std::invalid_argument("Assignment: empty cluster");
}

void Dataset::validate() const {
  if (p() < 1 || n() < 2) throw std::invalid_argument("Dataset: need p >= 1 and n >= 2");
  if (!X.allFinite()) throw std::invalid_argument("Dataset: non-finite entries");
  if (truth) {
    truth->validate(true);
    if (truth->n() != n()) throw std::invalid_argument("Dataset: truth length != n");
  }
}

CovarianceModel CovarianceModel::identity_scaled(int p, double sigma2) {
  CovarianceModel m;
  m.kind = CovKind::IdentityScaled;
  m.p = p;
  m.sigma2 = sigma2;
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::explicit_covariance(Matrix sigma) {
  CovarianceModel m;
  m.kind = CovKind::ExplicitCovariance;
  m.p = static_cast<int>(sigma.rows());
  m.mat = std::move(sigma);
  m.validate();
  return m;
}

CovarianceModel CovarianceModel::explicit_precision(Matrix omega) {
  CovarianceModel m;
  m.kind = CovKind::ExplicitPrecision;
  m.p = static_cast<int>(omega.rows());
  m.mat = std::move(omega);
  m.validate();
  return m;
}

void CovarianceModel::validate() const {
  if (p < 1) throw std::invalid_argument("CovarianceModel: p must be >= 1");
  if (kind == CovKind::IdentityScaled) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("CovarianceModel: sigma2 must be > 0");
    return;
  }
  if (mat.rows() != p || mat.cols() != p)
    throw std::invalid_argument("CovarianceModel: matrix must be p x p");
  if ((mat - mat.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("CovarianceModel: matrix not symmetric within 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) <= 0.0)
    throw std::invalid_argument("CovarianceModel: matrix not positive definite");
}

Matrix CovarianceModel::covariance() const {
  switch (kind) {
    case CovKind::IdentityScaled:
      return sigma2 * Matrix::Identity(p, p);
    case CovKind::ExplicitCovariance:
      return mat;
    case CovKind::ExplicitPrecision: {
      Eigen::LLT<Matrix> llt(mat);
      if (llt.info() != Eigen::Success) throw NumericalError("precision Cholesky failed");
      return llt.solve(Matrix::Identity(p, p));
    }
  }
  throw std::logic_error("unreachable");
}

Matrix CovarianceModel::precision() const {
  switch (kind) {
    case CovKind::IdentityScaled:
      return (1.0 / sigma2) * Matrix::Identity(p, p);
    case CovKind::ExplicitPrecision:
      return mat;
    case CovKind::ExplicitCovariance: {
      Eigen::LLT<Matrix> llt(mat);
      if (llt.info() != Eigen::Success) throw NumericalError("covariance Cholesky failed");
      return llt.solve(Matrix::Identity(p, p));
    }
  }
  throw std::logic_error("unreachable");
}

Vector CovarianceModel::precision_diag() const {
  if (kind == CovKind::IdentityScaled) return Vector::Constant(p, 1.0 / sigma2);
  if (kind == CovKind::ExplicitPrecision) return mat.diagonal();
  return precision().diagonal();
}

MembershipCheck check_membership(const Matrix& z, int K, const MembershipTols& tol) {
  MembershipCheck c;
  const int n = static_cast<int>(z.rows());
  c.symmetry_err = (z - z.transpose()).cwiseAbs().maxCoeff();
  c.trace_err = std::abs(z.trace() - static_cast<double>(K));
  c.row_sum_err = (z.rowwise().sum() - Vector::Ones(n)).cwiseAbs().maxCoeff();
  c.min_entry = z.minCoeff();
  Vector w;
  Matrix v;
  eigh(symmetrized(z), w, v);
  c.min_eigenvalue = w(0);
  c.symmetric = c.symmetry_err <= tol.symmetry;
  c.trace_ok = c.trace_err <= tol.trace;
  c.rows_ok = c.row_sum_err <= tol.row_sum;
  c.nonneg_ok = c.min_entry >= -tol.entry;
  c.psd_ok = c.min_eigenvalue >= -tol.min_eig;
  return c;
}

double misclustering_rate(const Assignment& a, const Assignment& b) {
  if (a.n() != b.n()) throw std::invalid_argument("misclustering_rate: length mismatch");
  if (a.K != b.K) throw std::invalid_argument("misclustering_rate: K mismatch");
  const int K = a.K;
  if (K < 1 || K > 8) throw std::invalid_argument("misclustering_rate: K must be in {1..8}");
  a.validate(true);
  b.validate(true);

  std::vector<int> perm(static_cast<size_t>(K));
  std::iota(perm.begin(), perm.end(), 1);
  const int n = a.n();
  int best = n;
  do {
    int mismatches = 0;
    for (int i = 0; i < n; ++i) {
      if (perm[static_cast<size_t>(a.labels[static_cast<size_t>(i)] - 1)] !=
          b.labels[static_cast<size_t>(i)])
        ++mismatches;
    }
    best = std::min(best, mismatches);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(n);
}

Matrix membership_from_labels(const Assignment& a) {
  a.validate(false);
  const int n = a.n();
  const auto sizes = a.sizes();
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a.labels[static_cast<size_t>(i)] == a.labels[static_cast<size_t>(j)])
        z(i, j) = 1.0 / sizes[static_cast<size_t>(a.labels[static_cast<size_t>(i)] - 1)];
    }
  }
  return z;
}

std::pair<int, int> selection_confusion(const FeatureSet& selected,
                                        const FeatureSet& truth_support, int p) {
  auto check = [p](const FeatureSet& s, const char* name) {
    for (int j : s)
      if (j < 1 || j > p)
        throw std::invalid_argument(std::string("selection_confusion: ") + name +
                                    " index out of {1..p}");
  };
  check(selected, "selected");
  check(truth_support, "truth_support");
  std::vector<char> in_truth(static_cast<size_t>(p + 1), 0);
  for (int j : truth_support) in_truth[static_cast<size_t>(j)] = 1;
  int tp = 0, fp = 0;
  for (int j : selected) (in_truth[static_cast<size_t>(j)] ? tp : fp)++;
  return {tp, fp};
}

Matrix rows_subset(const Matrix& x, const FeatureSet& s) {
  Matrix out(static_cast<Eigen::Index>(s.size()), x.cols());
  for (size_t r = 0; r < s.size(); ++r) {
    const int j = s[r];
    if (j < 1 || j > x.rows()) throw std::invalid_argument("rows_subset: index out of range");
    out.row(static_cast<Eigen::Index>(r)) = x.row(j - 1);
  }
  return out;
}

Matrix submatrix(const Matrix& m, const FeatureSet& rows, const FeatureSet& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) {
      if (rows[r] < 1 || rows[r] > m.rows() || cols[c] < 1 || cols[c] > m.cols())
        throw std::invalid_argument("submatrix: index out of range");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(rows[r] - 1, cols[c] - 1);
    }
  return out;
}

}  // namespace sparsekm
