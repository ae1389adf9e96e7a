#pragma once

#include <Eigen/Dense>

namespace sparsekm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Full symmetric eigendecomposition, eigenvalues ascending.
// Backed by LAPACKE dsyevd when available, Eigen otherwise.
// Throws NumericalError if the solver does not converge.
void eigh(const Matrix& m, Vector& eigenvalues, Matrix& eigenvectors);

// Top `count` eigenpairs (largest eigenvalues), eigenvalues descending in the
// returned order. count must be in [1, n].
void eigh_largest(const Matrix& m, int count, Vector& eigenvalues, Matrix& eigenvectors);

// Projection of a symmetric matrix onto the PSD cone by eigenvalue clipping.
// Keeps a running estimate of the positive/negative rank so repeated calls on
// slowly changing matrices (ADMM iterates) can use partial decompositions.
class PsdProjector {
 public:
  Matrix project(const Matrix& m);

 private:
  int neg_hint_ = -1;  // -1: unknown, do a full decomposition
};

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace sparsekm
