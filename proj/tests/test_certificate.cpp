#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsekm/certificate.hpp"
#include "sparsekm/errors.hpp"
#include "sparsekm/sdp.hpp"
#include "sparsekm/spectral.hpp"

using namespace sparsekm;

namespace {

// 1-d fixture: clusters {0.0, 0.2} and {10.0, 10.2}.
Matrix fixture_x() {
  Matrix x(1, 4);
  x << 0.0, 0.2, 10.0, 10.2;
  return x;
}

Assignment fixture_truth() {
  Assignment t;
  t.labels = {1, 1, 2, 2};
  t.K = 2;
  return t;
}

CertificateInput fixture_input(double lambda) {
  CertificateInput in;
  in.X_S = fixture_x();
  in.truth = fixture_truth();
  in.lambda = lambda;
  return in;
}

}  // namespace

TEST_CASE("compute_D on the 1-d fixture") {
  const Matrix x = fixture_x();
  const Assignment t = fixture_truth();
  // centroids 0.1 and 10.1; for i = 0.0: 10.1^2 - 0.1^2 = 102.0
  CHECK(compute_D(x, t, 1, 2, 0) == doctest::Approx(102.0).epsilon(1e-12));
  CHECK(compute_D(x, t, 1, 2, 1) == doctest::Approx(98.0).epsilon(1e-12));
  // i must belong to cluster k
  CHECK_THROWS_AS(compute_D(x, t, 2, 1, 0), std::invalid_argument);
}

TEST_CASE("compute_D: equidistant point gives zero, antisymmetry in (k,l)") {
  Matrix x(1, 4);
  x << -1.0, 1.0, -2.0, 2.0;  // centroids of both clusters at 0
  Assignment t;
  t.labels = {1, 1, 2, 2};
  t.K = 2;
  CHECK(compute_D(x, t, 1, 2, 0) == doctest::Approx(0.0));

  const Matrix xf = fixture_x();
  const Assignment tf = fixture_truth();
  // antisymmetry checked through the shared formula on a cluster-2 point
  const double d_2_1 = compute_D(xf, tf, 2, 1, 2);
  const double direct = std::pow(0.1 - 10.0, 2) - std::pow(10.1 - 10.0, 2);
  CHECK(d_2_1 == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("compute_U on the 1-d fixture") {
  // harmonic factor (1/2 + 1/2)^{-1} = 1; candidate D values are
  // 102.0, 98.0 (cluster 1) and 102.0, 98.0 (cluster 2) => U = 98.0
  CHECK(compute_U(fixture_x(), fixture_truth()) == doctest::Approx(98.0).epsilon(1e-12));
}

TEST_CASE("compute_U: degenerate and scaling cases") {
  Matrix x = Matrix::Zero(2, 4);
  Assignment t = fixture_truth();
  CHECK(compute_U(x, t) == doctest::Approx(0.0));

  const double u1 = compute_U(fixture_x(), fixture_truth());
  const double u3 = compute_U(3.0 * fixture_x(), fixture_truth());
  CHECK(u3 == doctest::Approx(9.0 * u1).epsilon(1e-12));
}

TEST_CASE("compute_L1: zero noise and singleton clusters") {
  const Assignment t = fixture_truth();
  Matrix centers(1, 2);
  centers << 0.1, 10.1;
  Matrix exact(1, 4);
  exact << 0.1, 0.1, 10.1, 10.1;
  CHECK(compute_L1(exact, t, centers) == doctest::Approx(0.0));

  // n = 2 singletons: Gamma_K = {0}
  Matrix x2(1, 2);
  x2 << 3.0, -4.0;
  Assignment singletons;
  singletons.labels = {1, 2};
  singletons.K = 2;
  Matrix c2(1, 2);
  c2 << 0.0, 0.0;
  CHECK(compute_L1(x2, singletons, c2) == doctest::Approx(0.0));
}

TEST_CASE("compute_L1 dominates random sampling over Gamma_K") {
  Rng rng(17);
  const int n = 4;
  Matrix x(2, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) x(j, i) = rng.normal();
  Assignment t = fixture_truth();
  Matrix centers = Matrix::Zero(2, 2);
  const double l1 = compute_L1(x, t, centers);

  double sampled = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const Vector v = oracle::random_unit_in_gamma(t, rng);
    sampled = std::max(sampled, (x * v).squaredNorm());
  }
  CHECK(l1 >= sampled - 1e-6);
  CHECK(l1 <= sampled + 0.5 * std::abs(l1) + 1e-6);  // sampling gets close in 2 dims
}

TEST_CASE("lambda_dot") {
  CHECK(lambda_dot(1.0, 5, 100.0, 4.0) == doctest::Approx(105.0));
  CHECK(lambda_dot(0.0, 5, 100.0, 0.0) == doctest::Approx(0.0));
  // balanced K = 2 with sizes n/2: m = n/2
  Assignment t;
  t.K = 2;
  t.labels.assign(20, 1);
  for (int i = 10; i < 20; ++i) t.labels[static_cast<size_t>(i)] = 2;
  CHECK(pairwise_min_m(t) == doctest::Approx(10.0));
  CHECK_THROWS_AS(lambda_dot(-1.0, 1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("build_certificate: r entry, row sums, and structural zeros") {
  const DualCertificate cert = build_certificate(fixture_input(1.0));

  // hand value: r^{(1,2)} entry for i = 0.0 at lambda = 1:
  // -(4/(2*2))*1 + (2/2)*102.0 = 101.0. Row sums of the (1,2) block equal
  // r^{(1,2)} exactly by the rank-one construction.
  const Assignment t = fixture_truth();
  const auto groups = t.groups();
  Vector block_rowsum = Vector::Zero(2);
  for (size_t a = 0; a < 2; ++a)
    for (size_t b = 0; b < 2; ++b)
      block_rowsum(static_cast<Eigen::Index>(a)) += cert.B(groups[0][a], groups[1][b]);
  CHECK(block_rowsum(0) == doctest::Approx(101.0).epsilon(1e-10));
  CHECK(block_rowsum(1) == doctest::Approx(97.0).epsilon(1e-10));

  // diagonal blocks are zero
  CHECK(cert.B(0, 1) == 0.0);
  CHECK(cert.B(2, 3) == 0.0);

  // <B, Z*> = 0 for any lambda (block structure)
  const Matrix zstar = membership_from_labels(t);
  CHECK(std::abs((cert.B.array() * zstar.array()).sum()) < 1e-10);
}

TEST_CASE("W annihilates cluster indicators and Z* for any lambda") {
  for (double lambda : {0.5, 25.0, 70.0, 98.0}) {
    const DualCertificate cert = build_certificate(fixture_input(lambda));
    const Assignment t = fixture_truth();
    const double scale = (fixture_x().transpose() * fixture_x()).norm();
    for (const auto& group : t.groups()) {
      Vector indicator = Vector::Zero(4);
      for (int i : group) indicator(i) = 1.0;
      CHECK((cert.W * indicator).cwiseAbs().maxCoeff() <= 1e-8 * scale);
    }
    const Matrix zstar = membership_from_labels(t);
    CHECK(std::abs((cert.W.array() * zstar.array()).sum()) <= 1e-8 * scale);
  }
}

TEST_CASE("homogeneity: scaling X by c and lambda by c^2 scales the certificate by c^2") {
  const double c = 3.0;
  const DualCertificate base = build_certificate(fixture_input(10.0));
  CertificateInput scaled_in = fixture_input(10.0 * c * c);
  scaled_in.X_S = c * fixture_x();
  const DualCertificate scaled = build_certificate(scaled_in);
  CHECK((scaled.alpha - c * c * base.alpha).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((scaled.B - c * c * base.B).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((scaled.W - c * c * base.W).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("check_conditions: all pass at lambda_dot and the solver agrees") {
  CertificateInput in;
  in.X_S = fixture_x();
  in.truth = fixture_truth();
  in.sigma2 = 0.01;          // noise variance of the +-0.1 perturbations
  in.s_cap_s0_sep = 100.0;   // separation of the true centers 0.1 vs 10.1
  const CertificateReport rep = check_conditions(in);
  CHECK(rep.lambda_used == doctest::Approx(0.01 + 2.0 * 100.0 / 4.0));
  CHECK(rep.U_S == doctest::Approx(98.0));
  CHECK(rep.all_pass());

  // cross-check: the SDP on the same data recovers the truth
  SdpProblem prob;
  prob.A = symmetrized(in.X_S.transpose() * in.X_S);
  prob.K = 2;
  const SdpSolution sol = solve(prob);
  REQUIRE(sol.converged);
  const Matrix zstar = membership_from_labels(in.truth);
  CHECK((sol.Z - zstar).norm() <= 1e-3 * zstar.norm());
}

TEST_CASE("check_conditions: lambda just above U breaks C1 or C5") {
  const double u = compute_U(fixture_x(), fixture_truth());
  const CertificateReport rep = check_conditions(fixture_input(1.01 * u));
  CHECK((!rep.conditions[0].pass || !rep.conditions[4].pass));
}

TEST_CASE("overlapping clusters fail at lambda_dot in nearly all draws") {
  Rng rng(2718);
  int failures = 0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    const int n = 20;
    Matrix x(1, n);
    Assignment t;
    t.K = 2;
    t.labels.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      x(0, i) = rng.normal();  // zero separation, sigma = 1
      t.labels[static_cast<size_t>(i)] = (i < n / 2) ? 1 : 2;
    }
    CertificateInput in;
    in.X_S = x;
    in.truth = t;
    in.sigma2 = 1.0;
    in.s_cap_s0_sep = 0.0;
    bool all_pass;
    try {
      all_pass = check_conditions(in).all_pass();
    } catch (const NumericalError&) {
      all_pass = false;  // degenerate certificate counts as failure to certify
    }
    if (!all_pass) ++failures;
  }
  CHECK(failures >= 19);
}

TEST_CASE("degenerate denominator is reported with the offending block") {
  // Symmetric instance engineered so sum(r^{(l,k)}) = 0: with lambda equal to
  // the average scaled D over a block the denominator collapses.
  Matrix x(1, 4);
  x << -1.0, 1.0, -1.0, 1.0;  // both clusters have centroid 0 and D = 0
  CertificateInput in;
  in.X_S = x;
  in.truth = fixture_truth();
  in.lambda = 0.0;
  CHECK_THROWS_AS(build_certificate(in), NumericalError);
}

TEST_CASE("scan_lambda sweeps [L1, U]") {
  CertificateInput in = fixture_input(50.0);
  const auto scans = scan_lambda(in, 5);
  REQUIRE(scans.size() == 5);
  CHECK(scans.front().first <= scans.back().first);
  // interior lambdas between L1 and U certify on this well-separated fixture
  bool any_pass = false;
  for (const auto& [lambda, rep] : scans) any_pass = any_pass || rep.all_pass();
  CHECK(any_pass);
}

TEST_CASE("certificate input validation") {
  CertificateInput in;
  in.X_S = fixture_x();
  in.truth = fixture_truth();
  CHECK_THROWS_AS(in.validate(), std::invalid_argument);  // no lambda, no separation

  in.lambda = 1.0;
  in.truth.labels = {1, 2, 2, 2};  // cluster of size 1
  CHECK_THROWS_AS(build_certificate(in), std::invalid_argument);
}
