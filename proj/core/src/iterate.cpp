#include "sparsekm/iterate.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsekm/errors.hpp"
#include "sparsekm/isee.hpp"
#include "sparsekm/select.hpp"
#include "sparsekm/spectral.hpp"

namespace sparsekm {

void StoppingPolicy::validate() const {
  if (T < 1) throw std::invalid_argument("StoppingPolicy: T >= 1");
  if (warmup < 0) throw std::invalid_argument("StoppingPolicy: warmup >= 0");
  if (window < 1) throw std::invalid_argument("StoppingPolicy: window >= 1");
  if (!(pi_percent > 0.0)) throw std::invalid_argument("StoppingPolicy: pi_percent > 0");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxIter:
      return "max-iter";
    case StopReason::ObjectiveConverged:
      return "objective-converged";
    case StopReason::WindowStalled:
      return "window-stalled";
    case StopReason::EmptySelection:
      return "empty-selection";
  }
  throw std::logic_error("unreachable");
}

namespace {

double relative_change(double current, double previous) {
  return std::abs(current - previous) / std::max(std::abs(previous), 1e-12);
}

// Clause evaluation for one objective sequence (values are maximized).
struct ClauseResult {
  bool clause1 = false;
  bool clause2 = false;
  bool any() const { return clause1 || clause2; }
};

ClauseResult evaluate_clauses(const std::vector<double>& obj, const StoppingPolicy& policy) {
  ClauseResult res;
  const int t = static_cast<int>(obj.size());
  const double pi = policy.pi_percent / 100.0;
  if (t >= 2)
    res.clause1 = relative_change(obj[static_cast<size_t>(t - 1)], obj[static_cast<size_t>(t - 2)]) < pi;
  if (t > policy.warmup && t - policy.window >= 1) {
    double best_now = obj[0], best_then = obj[0];
    for (int i = 0; i < t; ++i) best_now = std::max(best_now, obj[static_cast<size_t>(i)]);
    for (int i = 0; i < t - policy.window; ++i)
      best_then = std::max(best_then, obj[static_cast<size_t>(i)]);
    res.clause2 = (best_now - best_then) / std::max(std::abs(best_then), 1e-12) < pi;
  }
  return res;
}

std::vector<std::vector<int>> groups_of(const Assignment& a) { return a.groups(); }

Matrix sigma_submatrix(const CovarianceModel& cov, const FeatureSet& s) {
  if (cov.kind == CovKind::IdentityScaled) {
    Matrix m = cov.sigma2 * Matrix::Identity(static_cast<Eigen::Index>(s.size()),
                                             static_cast<Eigen::Index>(s.size()));
    return m;
  }
  const Matrix sigma = cov.covariance();
  return submatrix(sigma, s, s);
}

Vector transformed_mean_difference(const Matrix& xt, const std::vector<std::vector<int>>& groups) {
  Vector m1 = Vector::Zero(xt.rows());
  Vector m2 = Vector::Zero(xt.rows());
  for (int i : groups[0]) m1 += xt.col(i);
  for (int i : groups[1]) m2 += xt.col(i);
  m1 /= static_cast<double>(groups[0].size());
  m2 /= static_cast<double>(groups[1].size());
  return m1 - m2;
}

}  // namespace

StopDecision should_stop(const IterationTrace& trace, const StoppingPolicy& policy) {
  policy.validate();
  if (trace.records.empty()) throw std::invalid_argument("should_stop: empty trace");
  std::vector<double> sdp_obj, km_obj;
  sdp_obj.reserve(trace.records.size());
  km_obj.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    sdp_obj.push_back(r.sdp_objective);
    km_obj.push_back(r.kmeans_objective);
  }
  const ClauseResult cs = evaluate_clauses(sdp_obj, policy);
  const ClauseResult ck = evaluate_clauses(km_obj, policy);
  StopDecision d;
  d.stop = cs.any() && ck.any();
  d.via_relative_change = cs.clause1 && ck.clause1;
  return d;
}

StepResult sdp_kmeans_step(const Matrix& xt_s, const Matrix& sigma_ss, uint64_t seed,
                           const SdpOptions& opts) {
  if (xt_s.rows() < 1) throw std::invalid_argument("sdp_kmeans_step: need |S| >= 1");
  StepResult res;
  SdpProblem problem;
  problem.A = similarity_known_cov(xt_s, sigma_ss);
  problem.K = 2;
  res.sdp = solve(problem, opts);
  res.assignment = spectral_cluster(AffinityInput::membership(res.sdp.Z), 2, seed);
  res.kmeans_objective =
      (problem.A.array() * membership_from_labels(res.assignment).array()).sum();
  return res;
}

namespace {

// Shared driver for the known- and unknown-covariance loops; `iteration_body`
// computes (mu_diff or beta_hat, selection, Xt_S, Sigma_SS) for iteration t.
template <typename SelectAndPrepare>
std::pair<Assignment, IterationTrace> run_iterative(const Dataset& data,
                                                    const StoppingPolicy& policy, uint64_t seed,
                                                    SelectAndPrepare&& prepare) {
  policy.validate();
  data.validate();
  const int n = data.n();

  Assignment current = spectral_cluster(AffinityInput::raw_data(data.X), 2,
                                        Rng::derive(seed, 0x1217u).next_u64());
  IterationTrace trace;

  for (int t = 1; t <= policy.T; ++t) {
    auto groups = groups_of(current);
    FeatureSet selected;
    Matrix xt_s, sigma_ss;
    bool degenerate_block = false;
    prepare(groups, selected, xt_s, sigma_ss, degenerate_block);

    if (selected.empty()) {
      IterationRecord rec;
      rec.assignment = current;
      rec.degenerate = true;
      if (!trace.records.empty()) {
        rec.sdp_objective = trace.records.back().sdp_objective;
        rec.kmeans_objective = trace.records.back().kmeans_objective;
      }
      if (data.truth) rec.misclustering = misclustering_rate(current, *data.truth);
      trace.records.push_back(std::move(rec));
      trace.stop_reason = StopReason::EmptySelection;
      return {current, trace};
    }

    SdpOptions opts;
    if (!trace.records.empty() &&
        trace.records.back().selected.size() == selected.size())
      opts.warm_start = membership_from_labels(current);

    StepResult step =
        sdp_kmeans_step(xt_s, sigma_ss, Rng::derive(seed, 0xc1u, static_cast<uint64_t>(t)).next_u64(), opts);

    IterationRecord rec;
    rec.selected = std::move(selected);
    rec.assignment = step.assignment;
    rec.sdp_objective = step.sdp.objective;
    rec.kmeans_objective = step.kmeans_objective;
    rec.sdp_converged = step.sdp.converged;
    rec.sdp_iterations = step.sdp.iterations;
    rec.degenerate = degenerate_block;
    if (data.truth) rec.misclustering = misclustering_rate(step.assignment, *data.truth);
    current = step.assignment;
    trace.records.push_back(std::move(rec));

    if (t < policy.T) {
      const StopDecision d = should_stop(trace, policy);
      if (d.stop) {
        trace.stop_reason =
            d.via_relative_change ? StopReason::ObjectiveConverged : StopReason::WindowStalled;
        return {current, trace};
      }
    }
  }
  trace.stop_reason = StopReason::MaxIter;
  (void)n;
  return {current, trace};
}

}  // namespace

std::pair<Assignment, IterationTrace> run_known_cov(const Dataset& data,
                                                    const CovarianceModel& cov,
                                                    const StoppingPolicy& policy, uint64_t seed) {
  cov.validate();
  if (cov.p != data.p()) throw std::invalid_argument("run_known_cov: covariance dimension != p");
  const int n = data.n();
  const int p = data.p();

  // Transform once: Xt = Sigma^{-1} X.
  Matrix xt;
  Vector omega_diag;
  if (cov.kind == CovKind::IdentityScaled) {
    xt = data.X / cov.sigma2;
    omega_diag = Vector::Constant(p, 1.0 / cov.sigma2);
  } else {
    const Matrix omega = cov.precision();
    xt = omega * data.X;
    omega_diag = omega.diagonal();
  }

  return run_iterative(
      data, policy, seed,
      [&](const std::vector<std::vector<int>>& groups, FeatureSet& selected, Matrix& xt_s,
          Matrix& sigma_ss, bool& degenerate) {
        degenerate = false;
        const Vector beta_hat = transformed_mean_difference(xt, groups);
        selected = select_known_cov(beta_hat, omega_diag, n, p,
                                    static_cast<int>(groups[0].size()),
                                    static_cast<int>(groups[1].size()));
        if (selected.empty()) return;
        xt_s = rows_subset(xt, selected);
        sigma_ss = sigma_submatrix(cov, selected);
      });
}

std::pair<Assignment, IterationTrace> run_unknown_cov(const Dataset& data,
                                                      const StoppingPolicy& policy,
                                                      SelectRule rule, uint64_t seed) {
  const int n = data.n();
  const int p = data.p();

  return run_iterative(
      data, policy, seed,
      [&](const std::vector<std::vector<int>>& groups, FeatureSet& selected, Matrix& xt_s,
          Matrix& sigma_ss, bool& degenerate) {
        if (groups[0].size() < 3 || groups[1].size() < 3)
          throw std::invalid_argument("run_unknown_cov: per-cluster count must be >= 3");
        const IseeEstimate est = isee(data, groups[0], groups[1]);
        degenerate = est.any_ridged();
        const Vector mu_diff = est.mu1_tilde - est.mu2_tilde;
        selected = (rule == SelectRule::IseeRate)
                       ? select_isee(mu_diff, n, p)
                       : select_isee_maximal(mu_diff, est.omega_diag, n, p,
                                             static_cast<int>(groups[0].size()),
                                             static_cast<int>(groups[1].size()));
        if (selected.empty()) return;
        xt_s = rows_subset(est.Xtilde, selected);
        const Matrix x_s = rows_subset(data.X, selected);
        sigma_ss = pooled_covariance(x_s, groups);
      });
}

Matrix pooled_covariance(const Matrix& x, const std::vector<std::vector<int>>& groups) {
  const int d = static_cast<int>(x.rows());
  const int K = static_cast<int>(groups.size());
  int n = 0;
  Matrix acc = Matrix::Zero(d, d);
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("pooled_covariance: empty cluster");
    n += static_cast<int>(g.size());
    Vector mean = Vector::Zero(d);
    for (int i : g) mean += x.col(i);
    mean /= static_cast<double>(g.size());
    for (int i : g) {
      const Vector c = x.col(i) - mean;
      acc.selfadjointView<Eigen::Lower>().rankUpdate(c, 1.0);
    }
  }
  if (n <= K) throw std::invalid_argument("pooled_covariance: need n > K");
  acc = acc.selfadjointView<Eigen::Lower>();
  Matrix out = acc / static_cast<double>(n - K);
  // PSD by construction up to round-off.
  Eigen::SelfAdjointEigenSolver<Matrix> es(out, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-10 * std::max(1.0, out.norm()))
    throw NumericalError("pooled_covariance: negative eigenvalue beyond tolerance");
  return out;
}

}  // namespace sparsekm
