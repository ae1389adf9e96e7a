#include "sparsekm/certificate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsekm/errors.hpp"

namespace sparsekm {

void CertificateInput::validate() const {
  truth.validate(false);
  if (X_S.cols() != truth.n())
    throw std::invalid_argument("CertificateInput: X_S columns != labeled observations");
  for (int sz : truth.sizes())
    if (sz < 2) throw std::invalid_argument("CertificateInput: cluster sizes must be >= 2");
  if (!lambda && !s_cap_s0_sep)
    throw std::invalid_argument(
        "CertificateInput: provide lambda or the restricted separation for lambda_dot");
}

bool CertificateReport::all_pass() const {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return true;
}

namespace {

Matrix cluster_centroids(const Matrix& x_s, const std::vector<std::vector<int>>& groups) {
  Matrix centers(x_s.rows(), static_cast<Eigen::Index>(groups.size()));
  for (size_t k = 0; k < groups.size(); ++k) {
    Vector m = Vector::Zero(x_s.rows());
    for (int i : groups[k]) m += x_s.col(i);
    centers.col(static_cast<Eigen::Index>(k)) = m / static_cast<double>(groups[k].size());
  }
  return centers;
}

double resolve_lambda(const CertificateInput& input) {
  if (input.lambda) return *input.lambda;
  const double m = pairwise_min_m(input.truth);
  return lambda_dot(input.sigma2, static_cast<int>(input.X_S.rows()), m, *input.s_cap_s0_sep);
}

}  // namespace

double compute_D(const Matrix& x_s, const Assignment& truth, int k, int l, int i) {
  truth.validate(false);
  if (k == l) throw std::invalid_argument("compute_D: need k != l");
  if (k < 1 || k > truth.K || l < 1 || l > truth.K)
    throw std::invalid_argument("compute_D: cluster id out of range");
  if (i < 0 || i >= truth.n()) throw std::invalid_argument("compute_D: observation out of range");
  if (truth.labels[static_cast<size_t>(i)] != k)
    throw std::invalid_argument("compute_D: observation not in cluster k");
  const auto groups = truth.groups();
  const Matrix centers = cluster_centroids(x_s, groups);
  return (centers.col(l - 1) - x_s.col(i)).squaredNorm() -
         (centers.col(k - 1) - x_s.col(i)).squaredNorm();
}

double compute_U(const Matrix& x_s, const Assignment& truth) {
  truth.validate(false);
  const auto groups = truth.groups();
  const Matrix centers = cluster_centroids(x_s, groups);
  const int K = truth.K;
  double u = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      if (k == l) continue;
      const double factor =
          1.0 / (1.0 / static_cast<double>(groups[static_cast<size_t>(k)].size()) +
                 1.0 / static_cast<double>(groups[static_cast<size_t>(l)].size()));
      double dmin = std::numeric_limits<double>::infinity();
      for (int i : groups[static_cast<size_t>(k)]) {
        const double d = (centers.col(l) - x_s.col(i)).squaredNorm() -
                         (centers.col(k) - x_s.col(i)).squaredNorm();
        dmin = std::min(dmin, d);
      }
      u = std::min(u, factor * dmin);
    }
  }
  return u;
}

double compute_L1(const Matrix& x_s, const Assignment& truth, const Matrix& centers) {
  truth.validate(false);
  if (centers.rows() != x_s.rows() || centers.cols() != truth.K)
    throw std::invalid_argument("compute_L1: centers must be |S| x K");
  const int n = truth.n();
  Matrix noise(x_s.rows(), n);
  for (int i = 0; i < n; ++i)
    noise.col(i) = x_s.col(i) - centers.col(truth.labels[static_cast<size_t>(i)] - 1);
  // Projector onto span(1_{G_k})^perp is I - Z*; it also makes the value
  // invariant to cluster-wise constant shifts of the centers.
  const Matrix proj = Matrix::Identity(n, n) - membership_from_labels(truth);
  const Matrix quad = proj * noise.transpose() * noise * proj;
  Vector w;
  Matrix v;
  eigh(symmetrized(quad), w, v);
  return w(n - 1);
}

double pairwise_min_m(const Assignment& truth) {
  truth.validate(false);
  const auto sizes = truth.sizes();
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < sizes.size(); ++k)
    for (size_t l = 0; l < sizes.size(); ++l) {
      if (k == l) continue;
      best = std::min(best, 1.0 / (1.0 / sizes[k] + 1.0 / sizes[l]));
    }
  return 2.0 * best;
}

double lambda_dot(double sigma2, int s_size, double m, double delta2) {
  if (sigma2 < 0 || s_size < 0 || m < 0 || delta2 < 0)
    throw std::invalid_argument("lambda_dot: inputs must be >= 0");
  return sigma2 * s_size + m * delta2 / 4.0;
}

DualCertificate build_certificate(const CertificateInput& input) {
  input.validate();
  const double lambda = resolve_lambda(input);
  const Matrix& x = input.X_S;
  const int n = input.truth.n();
  const int K = input.truth.K;
  const auto groups = input.truth.groups();
  const Matrix centers = cluster_centroids(x, groups);
  const double scale = (x.transpose() * x).norm();

  DualCertificate cert;
  cert.alpha.resize(n);
  for (int k = 0; k < K; ++k) {
    const double gk = static_cast<double>(groups[static_cast<size_t>(k)].size());
    const double center_sq = centers.col(k).squaredNorm();
    for (int i : groups[static_cast<size_t>(k)])
      cert.alpha(i) = 2.0 * x.col(i).dot(centers.col(k)) - lambda / gk - center_sq;
  }

  // r^{(k,l)}_i = -((g_k+g_l)/(2 g_k)) lambda + (g_l/2) D_{kli}
  std::vector<std::vector<Vector>> r(static_cast<size_t>(K),
                                     std::vector<Vector>(static_cast<size_t>(K)));
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      if (k == l) continue;
      const double gk = static_cast<double>(groups[static_cast<size_t>(k)].size());
      const double gl = static_cast<double>(groups[static_cast<size_t>(l)].size());
      Vector rv(static_cast<Eigen::Index>(groups[static_cast<size_t>(k)].size()));
      for (size_t idx = 0; idx < groups[static_cast<size_t>(k)].size(); ++idx) {
        const int i = groups[static_cast<size_t>(k)][idx];
        const double d = (centers.col(l) - x.col(i)).squaredNorm() -
                         (centers.col(k) - x.col(i)).squaredNorm();
        rv(static_cast<Eigen::Index>(idx)) = -((gk + gl) / (2.0 * gk)) * lambda + 0.5 * gl * d;
      }
      r[static_cast<size_t>(k)][static_cast<size_t>(l)] = std::move(rv);
    }

  cert.B = Matrix::Zero(n, n);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < K; ++l) {
      if (k == l) continue;
      const Vector& rkl = r[static_cast<size_t>(k)][static_cast<size_t>(l)];
      const Vector& rlk = r[static_cast<size_t>(l)][static_cast<size_t>(k)];
      const double denom = rlk.sum();
      if (std::abs(denom) < 1e-12 * std::max(scale, 1.0))
        throw NumericalError("build_certificate: degenerate row-sum denominator for block (" +
                             std::to_string(l + 1) + "," + std::to_string(k + 1) + ")");
      for (size_t a = 0; a < groups[static_cast<size_t>(k)].size(); ++a)
        for (size_t b = 0; b < groups[static_cast<size_t>(l)].size(); ++b)
          cert.B(groups[static_cast<size_t>(k)][a], groups[static_cast<size_t>(l)][b]) =
              rkl(static_cast<Eigen::Index>(a)) * rlk(static_cast<Eigen::Index>(b)) / denom;
    }

  cert.W = lambda * Matrix::Identity(n, n) - cert.B +
           0.5 * (Vector::Ones(n) * cert.alpha.transpose() +
                  cert.alpha * Eigen::RowVectorXd::Ones(n)) -
           x.transpose() * x;
  return cert;
}

CertificateReport check_conditions(const CertificateInput& input) {
  input.validate();
  const DualCertificate cert = build_certificate(input);
  const Matrix gram = input.X_S.transpose() * input.X_S;
  const double scale = gram.norm();
  const Matrix zstar = membership_from_labels(input.truth);
  const auto groups = input.truth.groups();

  CertificateReport rep;
  rep.lambda_used = resolve_lambda(input);
  rep.U_S = compute_U(input.X_S, input.truth);
  rep.L1_S = compute_L1(input.X_S, input.truth, cluster_centroids(input.X_S, groups));

  // C1: B >= 0 entrywise
  const double min_entry = cert.B.minCoeff();
  rep.conditions[0].margin = min_entry + 1e-8 * scale;
  rep.conditions[0].pass = rep.conditions[0].margin >= 0.0;

  // C2: W PSD (symmetrized)
  Vector w_eigs;
  Matrix w_vecs;
  eigh(symmetrized(cert.W), w_eigs, w_vecs);
  rep.W_min_eig = w_eigs(0);
  rep.conditions[1].margin = rep.W_min_eig + 1e-6 * cert.W.norm();
  rep.conditions[1].pass = rep.conditions[1].margin >= 0.0;

  // C3 / C4: complementary slackness
  const double wz = (cert.W.array() * zstar.array()).sum();
  rep.conditions[2].margin = 1e-6 * scale - std::abs(wz);
  rep.conditions[2].pass = rep.conditions[2].margin >= 0.0;
  const double bz = (cert.B.array() * zstar.array()).sum();
  rep.conditions[3].margin = 1e-6 * scale - std::abs(bz);
  rep.conditions[3].pass = rep.conditions[3].margin >= 0.0;

  // C5: strict positivity of the off-diagonal blocks
  double min_off = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < groups.size(); ++k)
    for (size_t l = 0; l < groups.size(); ++l) {
      if (k == l) continue;
      for (int a : groups[k])
        for (int b : groups[l]) min_off = std::min(min_off, cert.B(a, b));
    }
  rep.conditions[4].margin = min_off - 1e-10 * scale;
  rep.conditions[4].pass = rep.conditions[4].margin > 0.0;
  return rep;
}

std::vector<std::pair<double, CertificateReport>> scan_lambda(const CertificateInput& input,
                                                              int count) {
  if (count < 2) throw std::invalid_argument("scan_lambda: need count >= 2");
  input.validate();
  const auto groups = input.truth.groups();
  const double u = compute_U(input.X_S, input.truth);
  const double l1 =
      compute_L1(input.X_S, input.truth, cluster_centroids(input.X_S, groups));
  const double lo = std::min(l1, u);
  const double hi = std::max(l1, u);
  std::vector<std::pair<double, CertificateReport>> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    CertificateInput probe = input;
    probe.lambda = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
    out.emplace_back(*probe.lambda, check_conditions(probe));
  }
  return out;
}

}  // namespace sparsekm
