#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sparsekm/csv.hpp"
#include "sparsekm/errors.hpp"
#include "sparsekm/simgen.hpp"

using namespace sparsekm;

namespace {
ScenarioSpec spec_of(Scenario sc, int p, int n, int s, double sep, double rho, uint64_t seed) {
  ScenarioSpec spec;
  spec.scenario = sc;
  spec.p = p;
  spec.n = n;
  spec.s = s;
  spec.separation = sep;
  spec.rho = rho;
  spec.seed = seed;
  return spec;
}
}  // namespace

TEST_CASE("make_covariance: chain precision matches the tridiagonal form") {
  const auto cov = make_covariance(spec_of(Scenario::ChainPrecision, 3, 8, 2, 1.0, 0.45, 0));
  REQUIRE(cov.kind == CovKind::ExplicitPrecision);
  Matrix expected(3, 3);
  expected << 1, 0.45, 0, 0.45, 1, 0.45, 0, 0.45, 1;
  CHECK(cov.mat == expected);
}

TEST_CASE("make_covariance: isotropic and AR(1)") {
  const auto iso = make_covariance(spec_of(Scenario::Isotropic, 5, 8, 2, 1.0, 0.0, 0));
  CHECK(iso.kind == CovKind::IdentityScaled);
  CHECK(iso.sigma2 == 1.0);
  CHECK(iso.covariance().isApprox(Matrix::Identity(5, 5)));

  const auto ar1 = make_covariance(spec_of(Scenario::Ar1Covariance, 3, 8, 2, 1.0, 0.5, 0));
  Matrix expected(3, 3);
  expected << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
  CHECK(ar1.mat == expected);
}

TEST_CASE("make_covariance rejects a non-PD chain construction") {
  // For p = 3 positive definiteness needs |rho| < 1/(2 cos(pi/4)) ~ 0.7071.
  CHECK_THROWS_AS(make_covariance(spec_of(Scenario::ChainPrecision, 3, 8, 2, 1.0, 0.72, 0)),
                  std::invalid_argument);
  CHECK_NOTHROW(make_covariance(spec_of(Scenario::ChainPrecision, 3, 8, 2, 1.0, 0.70, 0)));
}

TEST_CASE("make_centers: isotropic solves ||2 mu||_2 = separation") {
  const auto spec = spec_of(Scenario::Isotropic, 40, 8, 10, 5.0, 0.0, 0);
  const auto [mu, beta] = make_centers(spec, make_covariance(spec));
  const double expect = 5.0 / (2.0 * std::sqrt(10.0));
  for (int j = 0; j < 10; ++j) CHECK(mu(j) == doctest::Approx(expect).epsilon(1e-12));
  for (int j = 10; j < 40; ++j) CHECK(mu(j) == 0.0);
  CHECK(mu.isApprox(beta));
  CHECK((2.0 * mu.norm()) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("make_centers: single-coordinate support") {
  const auto spec = spec_of(Scenario::Isotropic, 6, 8, 1, 2.0, 0.0, 0);
  const auto [mu, beta] = make_centers(spec, make_covariance(spec));
  (void)beta;
  CHECK(mu(0) == doctest::Approx(1.0).epsilon(1e-14));
  for (int j = 1; j < 6; ++j) CHECK(mu(j) == 0.0);
}

TEST_CASE("make_centers: chain with rho = 0 reduces to the isotropic solve") {
  const auto spec = spec_of(Scenario::ChainPrecision, 3, 8, 2, 2.0, 0.0, 0);
  const auto [mu, beta] = make_centers(spec, make_covariance(spec));
  (void)beta;
  CHECK(mu(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(mu(1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(mu(2) == doctest::Approx(0.0));
}

TEST_CASE("make_centers: support is exactly {1..s} with constant magnitude") {
  for (auto sc : {Scenario::ChainPrecision, Scenario::Ar1Covariance}) {
    const auto spec = spec_of(sc, 12, 8, 5, 3.0, 0.3, 0);
    const auto cov = make_covariance(spec);
    const auto [mu, beta] = make_centers(spec, cov);
    for (int j = 0; j < 5; ++j) CHECK(std::abs(beta(j)) == doctest::Approx(std::abs(beta(0))));
    for (int j = 5; j < 12; ++j) CHECK(beta(j) == 0.0);
    // Mahalanobis separation: 2 sqrt(mu' Omega mu) = separation
    const double quad = beta.dot(mu);  // beta' Sigma beta = mu' Omega mu
    CHECK(2.0 * std::sqrt(quad) == doctest::Approx(3.0).epsilon(1e-10));
  }
}

TEST_CASE("chain covariance re-inverts to the precision matrix") {
  const auto spec = spec_of(Scenario::ChainPrecision, 20, 8, 5, 3.0, 0.45, 0);
  const auto cov = make_covariance(spec);
  const Matrix sigma = cov.covariance();
  const Matrix omega_back = sigma.llt().solve(Matrix::Identity(20, 20));
  CHECK((omega_back - cov.mat).norm() <= 1e-8);
}

TEST_CASE("generate: deterministic given the seed") {
  const auto spec = spec_of(Scenario::ChainPrecision, 7, 12, 3, 2.0, 0.45, 99);
  const Dataset a = generate(spec), b = generate(spec);
  CHECK(a.X == b.X);
  REQUIRE(a.truth.has_value());
  CHECK(a.truth->labels == b.truth->labels);
  CHECK(a.truth->labels[0] == 1);
  CHECK(a.truth->labels[11] == 2);
}

TEST_CASE("generate: zero separation keeps the grand mean near zero") {
  const Dataset ds = generate(spec_of(Scenario::Isotropic, 4, 20000, 2, 0.0, 0.0, 3));
  CHECK(ds.X.rowwise().mean().cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("generate: per-cluster empirical means match the centers") {
  const auto spec = spec_of(Scenario::Isotropic, 2, 10000, 2, 4.0, 0.0, 17);
  const Dataset ds = generate(spec);
  const auto [mu, beta] = make_centers(spec, make_covariance(spec));
  (void)beta;
  const int half = spec.n / 2;
  const Vector m1 = ds.X.leftCols(half).rowwise().mean();
  const Vector m2 = ds.X.rightCols(half).rowwise().mean();
  // CLT at 3 sigma / sqrt(n/2) ~ 0.042
  CHECK((m1 - mu).cwiseAbs().maxCoeff() < 0.05);
  CHECK((m2 + mu).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("generate: empirical noise covariance converges to Sigma") {
  const auto spec = spec_of(Scenario::ChainPrecision, 5, 2000, 2, 3.0, 0.45, 11);
  const Dataset ds = generate(spec);
  const auto cov = make_covariance(spec);
  const auto [mu, beta] = make_centers(spec, cov);
  (void)beta;
  Matrix noise = ds.X;
  noise.leftCols(spec.n / 2).colwise() -= mu;
  noise.rightCols(spec.n / 2).colwise() += mu;
  const Matrix emp = noise * noise.transpose() / spec.n;
  CHECK((emp - cov.covariance()).norm() <= 5.0 * spec.p / std::sqrt(spec.n));
}

TEST_CASE("scenario spec JSON round trip") {
  const auto spec = spec_of(Scenario::Ar1Covariance, 30, 100, 10, 4.0, 0.5, 12345);
  const auto back = ScenarioSpec::from_json(spec.to_json());
  CHECK(back.scenario == spec.scenario);
  CHECK(back.p == spec.p);
  CHECK(back.n == spec.n);
  CHECK(back.s == spec.s);
  CHECK(back.separation == spec.separation);
  CHECK(back.rho == spec.rho);
  CHECK(back.seed == spec.seed);
}

TEST_CASE("dataset CSV round trip is bit exact") {
  const Dataset ds = generate(spec_of(Scenario::ChainPrecision, 5, 10, 2, 2.0, 0.3, 4));
  const std::string path = "simgen_roundtrip.csv";
  write_dataset_csv(ds, path);
  const Dataset back = read_dataset_csv(path);
  CHECK(back.X == ds.X);
  REQUIRE(back.truth.has_value());
  CHECK(back.truth->labels == ds.truth->labels);
  std::remove(path.c_str());
}

TEST_CASE("CSV errors carry line numbers") {
  {
    std::ofstream out("bad_header.csv");
    out << "a,b\n1,2\n1,2\n";
  }
  CHECK_THROWS_AS(read_dataset_csv("bad_header.csv"), CsvError);
  std::remove("bad_header.csv");

  {
    std::ofstream out("bad_cell.csv");
    out << "x1,x2\n1,2\n1,zzz\n1,2\n";
  }
  try {
    read_dataset_csv("bad_cell.csv");
    CHECK(false);
  } catch (const CsvError& e) {
    CHECK(e.line() == 3);
  }
  std::remove("bad_cell.csv");
}
