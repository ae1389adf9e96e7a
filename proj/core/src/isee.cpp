#include "sparsekm/isee.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sparsekm/errors.hpp"
#include "sparsekm/lasso.hpp"

namespace sparsekm {

BlockPartition BlockPartition::consecutive(int p) {
  if (p < 2) throw std::invalid_argument("BlockPartition: need p >= 2");
  BlockPartition bp;
  const int nblocks = p / 2;
  for (int b = 0; b < nblocks; ++b) bp.blocks.push_back({2 * b, 2 * b + 1});
  if (p % 2 != 0) bp.blocks.back().push_back(p - 1);  // last block gets the odd feature
  return bp;
}

void BlockPartition::validate(int p) const {
  std::vector<char> seen(static_cast<size_t>(p), 0);
  int n3 = 0;
  for (const auto& b : blocks) {
    if (b.size() != 2 && b.size() != 3) throw std::invalid_argument("BlockPartition: block size must be 2 or 3");
    if (b.size() == 3) ++n3;
    for (int j : b) {
      if (j < 0 || j >= p) throw std::invalid_argument("BlockPartition: index out of range");
      if (seen[static_cast<size_t>(j)]) throw std::invalid_argument("BlockPartition: overlapping blocks");
      seen[static_cast<size_t>(j)] = 1;
    }
  }
  if (n3 > 1) throw std::invalid_argument("BlockPartition: at most one block of size 3");
  if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c; }))
    throw std::invalid_argument("BlockPartition: blocks must cover {1..p}");
}

bool IseeEstimate::any_ridged() const {
  return std::any_of(per_block.begin(), per_block.end(),
                     [](const IseeBlockInfo& b) { return b.ridged; });
}

namespace {

struct ClusterView {
  Matrix predictors;  // m x (p - |A|), filled per block
  std::vector<int> members;
};

void process_block(const Matrix& x, const std::vector<int>& block, const std::vector<int>& g1,
                   const std::vector<int>& g2, IseeEstimate& out, IseeBlockInfo& info) {
  const int p = static_cast<int>(x.rows());
  const int n = static_cast<int>(x.cols());
  const int a = static_cast<int>(block.size());
  const int q = p - a;

  std::vector<int> complement;
  complement.reserve(static_cast<size_t>(q));
  {
    std::vector<char> in_block(static_cast<size_t>(p), 0);
    for (int j : block) in_block[static_cast<size_t>(j)] = 1;
    for (int j = 0; j < p; ++j)
      if (!in_block[static_cast<size_t>(j)]) complement.push_back(j);
  }

  Matrix ehat(a, n);  // pooled residuals across both clusters
  Matrix alpha(a, 2);

  for (int cluster = 0; cluster < 2; ++cluster) {
    const auto& members = (cluster == 0) ? g1 : g2;
    const int m = static_cast<int>(members.size());
    Matrix yresp(m, a);
    for (int i = 0; i < m; ++i) {
      const int col = members[static_cast<size_t>(i)];
      for (int j = 0; j < a; ++j) yresp(i, j) = x(block[static_cast<size_t>(j)], col);
    }
    auto& lambdas = (cluster == 0) ? info.lambda1 : info.lambda2;
    if (q == 0) {
      // p equals the block size: intercept-only regression
      const Vector means = yresp.colwise().mean();
      alpha.col(cluster) = means;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < a; ++j)
          ehat(j, members[static_cast<size_t>(i)]) = yresp(i, j) - means(j);
      lambdas.assign(static_cast<size_t>(a), 0.0);
      continue;
    }
    Matrix xpred(m, q);
    for (int i = 0; i < m; ++i) {
      const int col = members[static_cast<size_t>(i)];
      for (int j = 0; j < q; ++j) xpred(i, j) = x(complement[static_cast<size_t>(j)], col);
    }
    const LassoFit fit = lasso_path(xpred, yresp);
    alpha.col(cluster) = fit.intercepts;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < a; ++j) ehat(j, members[static_cast<size_t>(i)]) = fit.residuals(j, i);
    lambdas.assign(fit.lambda.data(), fit.lambda.data() + fit.lambda.size());
  }

  // Residual covariance normalizes by n; both clusters share Omega.
  Matrix cov = (ehat * ehat.transpose()) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  const double emax = es.eigenvalues().maxCoeff();
  const double emin = es.eigenvalues().minCoeff();
  info.residual_cov_cond = (emin > 0.0) ? emax / emin : std::numeric_limits<double>::infinity();
  if (!(info.residual_cov_cond <= 1e12)) {
    const double ridge = std::max(1e-8 * cov.trace(), 1e-12);
    cov.diagonal().array() += ridge;
    info.ridged = true;
  }
  const Matrix omega_aa = cov.inverse();

  const Vector mu1 = omega_aa * alpha.col(0);
  const Vector mu2 = omega_aa * alpha.col(1);
  const Matrix xt_block = omega_aa * ehat;  // mean added below

  std::vector<char> in_g1(static_cast<size_t>(n), 0);
  for (int col : g1) in_g1[static_cast<size_t>(col)] = 1;
  for (int j = 0; j < a; ++j) {
    const int row = block[static_cast<size_t>(j)];
    out.mu1_tilde(row) = mu1(j);
    out.mu2_tilde(row) = mu2(j);
    out.omega_diag(row) = omega_aa(j, j);
    for (int col = 0; col < n; ++col)
      out.Xtilde(row, col) = (in_g1[static_cast<size_t>(col)] ? mu1(j) : mu2(j)) + xt_block(j, col);
  }
  for (int j : block) info.features.push_back(j + 1);
}

}  // namespace

IseeEstimate isee(const Dataset& data, const std::vector<int>& g1, const std::vector<int>& g2,
                  int threads) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  if (p < 2) throw std::invalid_argument("isee: need p >= 2");
  if (g1.size() < 3 || g2.size() < 3)
    throw std::invalid_argument("isee: per-cluster sample count must be >= 3");
  {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    for (const auto* g : {&g1, &g2})
      for (int col : *g) {
        if (col < 0 || col >= n) throw std::invalid_argument("isee: column index out of range");
        if (seen[static_cast<size_t>(col)]) throw std::invalid_argument("isee: clusters overlap");
        seen[static_cast<size_t>(col)] = 1;
      }
    if (g1.size() + g2.size() != static_cast<size_t>(n))
      throw std::invalid_argument("isee: clusters must cover all observations");
  }

  const BlockPartition bp = BlockPartition::consecutive(p);
  IseeEstimate out;
  out.mu1_tilde.resize(p);
  out.mu2_tilde.resize(p);
  out.Xtilde.resize(p, n);
  out.omega_diag.resize(p);
  out.per_block.resize(bp.blocks.size());

  const int nblocks = static_cast<int>(bp.blocks.size());
  const int nworkers = std::max(1, std::min(threads, nblocks));
  if (nworkers == 1) {
    for (int b = 0; b < nblocks; ++b)
      process_block(data.X, bp.blocks[static_cast<size_t>(b)], g1, g2, out,
                    out.per_block[static_cast<size_t>(b)]);
  } else {
    // Blocks write to disjoint rows, so the result is identical for any
    // worker count.
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1))
            process_block(data.X, bp.blocks[static_cast<size_t>(b)], g1, g2, out,
                          out.per_block[static_cast<size_t>(b)]);
        } catch (...) {
          errors[static_cast<size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  if (!out.omega_diag.allFinite() || out.omega_diag.minCoeff() <= 0.0)
    throw NumericalError("isee: non-positive precision diagonal estimate");
  return out;
}

}  // namespace sparsekm
