#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sparsekm/model.hpp"
#include "sparsekm/sdp.hpp"

namespace sparsekm {

struct StoppingPolicy {
  int T = 100;             // max iterations
  int warmup = 10;         // w
  int window = 5;          // eta
  double pi_percent = 1.0; // relative-improvement threshold, in percent

  void validate() const;
};

enum class StopReason { MaxIter, ObjectiveConverged, WindowStalled, EmptySelection };
std::string to_string(StopReason r);

struct IterationRecord {
  FeatureSet selected;
  Assignment assignment;
  double sdp_objective = 0.0;
  double kmeans_objective = 0.0;
  std::optional<double> misclustering;  // vs truth, when known
  bool degenerate = false;              // empty selection kept previous assignment,
                                        // or an ISEE block needed a ridge
  bool sdp_converged = true;
  int sdp_iterations = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::MaxIter;
};

struct StopDecision {
  bool stop = false;
  bool via_relative_change = false;  // clause (1) held for both objectives
};

// Stops iff, for the SDP objective AND the K-means objective, either
//  (1) the relative change |o_t - o_{t-1}| / max(|o_{t-1}|, 1e-12) is below
//      pi_percent/100, or
//  (2) past the warm-up, the best value observed improved by less than
//      pi_percent/100 over the most recent `window` iterations.
StopDecision should_stop(const IterationTrace& trace, const StoppingPolicy& policy);

struct StepResult {
  Assignment assignment;
  SdpSolution sdp;
  double kmeans_objective = 0.0;  // <A, membership(assignment)>
};

// One SDP K-means round: similarity from (Xt_S, Sigma_SS), solve at K = 2,
// round via spectral clustering on the solution as an affinity. Solver
// non-convergence is flagged on the result, not fatal.
StepResult sdp_kmeans_step(const Matrix& xt_s, const Matrix& sigma_ss, uint64_t seed,
                           const SdpOptions& opts = {});

// Iterative SDP K-means with known covariance: spectral init, innovated
// transform computed once, then select / cluster rounds with early stopping.
std::pair<Assignment, IterationTrace> run_known_cov(const Dataset& data,
                                                    const CovarianceModel& cov,
                                                    const StoppingPolicy& policy, uint64_t seed);

enum class SelectRule { IseeRate, IseeMaximal };

// Unknown covariance: ISEE re-estimates the transformed data each iteration;
// the clustering step uses the pooled within-cluster covariance of the raw
// data on the selected features.
std::pair<Assignment, IterationTrace> run_unknown_cov(const Dataset& data,
                                                      const StoppingPolicy& policy,
                                                      SelectRule rule, uint64_t seed);

// (sum_k sum_{i in G_k} (x_i - xbar_k)(x_i - xbar_k)') / (n - K)
Matrix pooled_covariance(const Matrix& x, const std::vector<std::vector<int>>& groups);

}  // namespace sparsekm
