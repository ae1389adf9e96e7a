#include "sparsekm/linalg.hpp"

#include <vector>

#include "sparsekm/errors.hpp"

#ifdef SPARSEKM_HAVE_LAPACKE
#include <lapacke.h>
#endif

#ifdef SPARSEKM_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace sparsekm {

namespace {

void pin_blas_threads() {
#ifdef SPARSEKM_HAVE_OPENBLAS
  // Parallelism lives at the replication level; a threaded BLAS underneath
  // oversubscribes and is slower at these sizes.
  static const bool done = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)done;
#endif
}

#ifdef SPARSEKM_HAVE_LAPACKE
// k largest eigenpairs via dsyevr, returned ascending.
void eigh_range_top(const Matrix& m, int k, Vector& w, Matrix& v) {
  pin_blas_threads();
  const int n = static_cast<int>(m.rows());
  Matrix a = m;
  w.resize(k);
  v.resize(n, k);
  int found = 0;
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(std::max(1, k)));
  Vector wfull(n);
  int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0,
                            n - k + 1, n, 0.0, &found, wfull.data(), v.data(), n,
                            isuppz.data());
  if (info != 0) throw NumericalError("dsyevr failed, info=" + std::to_string(info));
  if (found != k) throw NumericalError("dsyevr returned fewer eigenpairs than requested");
  w = wfull.head(k);
}
#endif

}  // namespace

void eigh(const Matrix& m, Vector& eigenvalues, Matrix& eigenvectors) {
  const int n = static_cast<int>(m.rows());
#ifdef SPARSEKM_HAVE_LAPACKE
  if (n > 32) {
    pin_blas_threads();
    eigenvectors = m;
    eigenvalues.resize(n);
    int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, eigenvectors.data(), n, eigenvalues.data());
    if (info != 0) throw NumericalError("dsyevd failed, info=" + std::to_string(info));
    return;
  }
#endif
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge (n=" + std::to_string(n) + ")");
  eigenvalues = es.eigenvalues();
  eigenvectors = es.eigenvectors();
}

void eigh_largest(const Matrix& m, int count, Vector& eigenvalues, Matrix& eigenvectors) {
  const int n = static_cast<int>(m.rows());
  if (count < 1 || count > n) throw std::invalid_argument("eigh_largest: bad count");
#ifdef SPARSEKM_HAVE_LAPACKE
  if (n > 32 && count < n) {
    eigh_range_top(m, count, eigenvalues, eigenvectors);
    // ascending -> descending
    eigenvalues.reverseInPlace();
    eigenvectors = eigenvectors.rowwise().reverse().eval();
    return;
  }
#endif
  Vector w;
  Matrix v;
  eigh(m, w, v);
  eigenvalues = w.tail(count).reverse();
  eigenvectors = v.rightCols(count).rowwise().reverse();
}

Matrix PsdProjector::project(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  const int pos_hint = (neg_hint_ < 0) ? -1 : n - neg_hint_;

#ifdef SPARSEKM_HAVE_LAPACKE
  // Partial path: the positive rank of ADMM iterates collapses to ~K after a
  // few iterations, so a top-k decomposition covers the whole positive part.
  if (n > 64 && pos_hint >= 0 && pos_hint + 4 <= n / 3) {
    int k = pos_hint + 4;
    while (k <= n / 3) {
      Vector w;
      Matrix v;
      eigh_range_top(m, k, w, v);  // ascending
      if (w(0) > 0.0) {
        k *= 2;  // positive part not fully captured
        continue;
      }
      int first_pos = 0;
      while (first_pos < k && w(first_pos) <= 0.0) ++first_pos;
      const int npos = k - first_pos;
      neg_hint_ = n - npos;
      if (npos == 0) return Matrix::Zero(n, n);
      Matrix vp = v.rightCols(npos);
      Matrix out = vp * w.tail(npos).asDiagonal() * vp.transpose();
      return symmetrized(out);
    }
  }
#endif

  Vector w;
  Matrix v;
  eigh(m, w, v);
  int first_pos = 0;
  while (first_pos < n && w(first_pos) <= 0.0) ++first_pos;
  const int npos = n - first_pos;
  neg_hint_ = first_pos;
  if (npos == 0) return Matrix::Zero(n, n);
  if (first_pos == 0) return m;
  Matrix out;
  if (npos <= first_pos) {
    Matrix vp = v.rightCols(npos);
    out = vp * w.tail(npos).asDiagonal() * vp.transpose();
  } else {
    Matrix vn = v.leftCols(first_pos);
    out = m - vn * w.head(first_pos).asDiagonal() * vn.transpose();
  }
  return symmetrized(out);
}

}  // namespace sparsekm
