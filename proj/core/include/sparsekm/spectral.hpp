#pragma once

#include <cstdint>

#include "sparsekm/model.hpp"
#include "sparsekm/rng.hpp"

namespace sparsekm {

// Input to spectral clustering: either a p x n data matrix (embedded through
// the globally centered Gram matrix) or an n x n symmetric nonnegative
// affinity, typically a relaxed membership matrix.
struct AffinityInput {
  enum class Mode { RawData, Membership };
  Mode mode = Mode::RawData;
  Matrix payload;

  static AffinityInput raw_data(Matrix x) { return {Mode::RawData, std::move(x)}; }
  static AffinityInput membership(Matrix z) { return {Mode::Membership, std::move(z)}; }
};

struct KmeansResult {
  std::vector<int> labels;  // 0-based cluster ids
  double sse = 0.0;
  Matrix centers;  // d x K
};

// Lloyd iterations with k-means++ seeding; `restarts` independent starts,
// best within-cluster SSE kept. Empty clusters are repaired by moving the
// point farthest from its centroid. points is d x n.
KmeansResult kmeans(const Matrix& points, int K, Rng& rng, int restarts = 10,
                    int max_iters = 100);

// Eigen-embedding + k-means rounding. RawData mode embeds with the top K-1
// eigenvectors of the centered Gram matrix; Membership mode with the top K
// eigenvectors of the affinity. No output cluster is empty.
Assignment spectral_cluster(const AffinityInput& input, int K, uint64_t seed);

}  // namespace sparsekm
