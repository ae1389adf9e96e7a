#pragma once

#include <functional>
#include <optional>

#include "sparsekm/model.hpp"

namespace sparsekm {

// max <A, Z>  s.t.  Z' = Z, Z PSD, tr(Z) = K, Z 1 = 1, Z >= 0.
struct SdpProblem {
  Matrix A;  // n x n, symmetric within 1e-8
  int K = 2;

  void validate() const;
};

struct SdpOptions {
  double tol = 1e-6;
  int max_iter = 20000;
  // Optional initial Z, e.g. the membership matrix of a previous rounding.
  std::optional<Matrix> warm_start;
};

struct SdpSolution {
  Matrix Z;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Three-block consensus ADMM: PSD cone / affine subspace {symmetric, tr = K,
// row sums = 1} / nonnegative orthant, with residual-balanced penalty. The
// objective is normalized by ||A||_F internally, which makes the iterate
// sequence invariant under positive rescaling of A.
//
// A converged solution satisfies the membership invariants at tolerances
// (symmetry 1e-7, trace 1e-5, row sums 1e-5, entries >= -1e-6, min
// eigenvalue >= -1e-5); convergence is only declared once these hold.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& opts = {});

// Xt_S' * Sigma_SS * Xt_S, symmetrized to kill round-off asymmetry.
Matrix similarity_known_cov(const Matrix& xt_s, const Matrix& sigma_ss);

// Diagnostics hook invoked after every solve(). Install once before
// launching work; the callback itself must be thread-safe when solves run
// concurrently. Pass nullptr to clear.
using SolveObserver = std::function<void(const SdpProblem&, const SdpSolution&)>;
void set_solve_observer(SolveObserver observer);

}  // namespace sparsekm
