#include "sparsekm/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "sparsekm/errors.hpp"
#include "sparsekm/rng.hpp"

namespace sparsekm {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Isotropic:
      return "isotropic";
    case Scenario::ChainPrecision:
      return "chain-precision";
    case Scenario::Ar1Covariance:
      return "ar1-covariance";
  }
  throw std::logic_error("unreachable");
}

Scenario scenario_from_string(const std::string& s) {
  if (s == "isotropic") return Scenario::Isotropic;
  if (s == "chain-precision") return Scenario::ChainPrecision;
  if (s == "ar1-covariance") return Scenario::Ar1Covariance;
  throw std::invalid_argument("unknown scenario: " + s);
}

void ScenarioSpec::validate() const {
  if (p < 1) throw std::invalid_argument("ScenarioSpec: p must be >= 1");
  if (n < 4) throw std::invalid_argument("ScenarioSpec: n must be >= 4");
  if (n % 2 != 0) throw std::invalid_argument("ScenarioSpec: n must be even");
  if (s < 1 || s > p) throw std::invalid_argument("ScenarioSpec: need 1 <= s <= p");
  if (!(separation >= 0.0)) throw std::invalid_argument("ScenarioSpec: separation must be >= 0");
  if (scenario != Scenario::Isotropic && !(std::abs(rho) < 1.0))
    throw std::invalid_argument("ScenarioSpec: |rho| must be < 1");
}

std::string ScenarioSpec::to_json() const {
  nlohmann::json j;
  j["scenario"] = to_string(scenario);
  j["p"] = p;
  j["n"] = n;
  j["s"] = s;
  j["separation"] = separation;
  j["rho"] = rho;
  j["seed"] = seed;
  return j.dump();
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ScenarioSpec spec;
  spec.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  spec.p = j.at("p").get<int>();
  spec.n = j.at("n").get<int>();
  spec.s = j.value("s", 10);
  spec.separation = j.at("separation").get<double>();
  spec.rho = j.value("rho", 0.0);
  spec.seed = j.value("seed", static_cast<uint64_t>(0));
  spec.validate();
  return spec;
}

CovarianceModel make_covariance(const ScenarioSpec& spec) {
  spec.validate();
  switch (spec.scenario) {
    case Scenario::Isotropic:
      return CovarianceModel::identity_scaled(spec.p, 1.0);
    case Scenario::ChainPrecision: {
      Matrix omega = Matrix::Identity(spec.p, spec.p);
      for (int i = 0; i + 1 < spec.p; ++i) {
        omega(i, i + 1) = spec.rho;
        omega(i + 1, i) = spec.rho;
      }
      // explicit_precision rejects the construction unless the tridiagonal
      // matrix is positive definite, i.e. |rho| < 1/(2 cos(pi/(p+1))).
      return CovarianceModel::explicit_precision(std::move(omega));
    }
    case Scenario::Ar1Covariance: {
      Matrix sigma(spec.p, spec.p);
      for (int i = 0; i < spec.p; ++i)
        for (int j = 0; j < spec.p; ++j) sigma(i, j) = std::pow(spec.rho, std::abs(i - j));
      return CovarianceModel::explicit_covariance(std::move(sigma));
    }
  }
  throw std::logic_error("unreachable");
}

std::pair<Vector, Vector> make_centers(const ScenarioSpec& spec, const CovarianceModel& cov) {
  spec.validate();
  Vector support = Vector::Zero(spec.p);
  support.head(spec.s).setOnes();

  // mu = Sigma*beta; mu' Omega mu = beta' Sigma beta, so no inversion needed.
  Vector sigma_support;
  if (cov.kind == CovKind::IdentityScaled) {
    sigma_support = cov.sigma2 * support;
  } else if (cov.kind == CovKind::ExplicitCovariance) {
    sigma_support = cov.mat * support;
  } else {
    Eigen::LLT<Matrix> llt(cov.mat);
    if (llt.info() != Eigen::Success) throw NumericalError("make_centers: Cholesky failed");
    sigma_support = llt.solve(support);
  }
  const double quad = support.dot(sigma_support);
  if (!(quad > 0.0)) throw NumericalError("make_centers: degenerate support quadratic form");
  const double c = spec.separation / (2.0 * std::sqrt(quad));
  Vector beta = c * support;
  Vector mu = c * sigma_support;
  return {mu, beta};
}

Dataset generate(const ScenarioSpec& spec) {
  spec.validate();
  const CovarianceModel cov = make_covariance(spec);
  const auto [mu, beta] = make_centers(spec, cov);
  (void)beta;

  const bool scaled_identity = cov.kind == CovKind::IdentityScaled;
  Matrix chol_l;
  if (!scaled_identity) {
    const Matrix sigma = cov.covariance();
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("generate: Cholesky of Sigma failed");
    chol_l = llt.matrixL();
  }
  const double noise_sd = std::sqrt(cov.sigma2);

  Rng rng(spec.seed);
  Dataset ds;
  ds.X.resize(spec.p, spec.n);
  Vector z(spec.p);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.p; ++j) z(j) = rng.normal();
    const double sign = (i < spec.n / 2) ? 1.0 : -1.0;
    if (scaled_identity)
      ds.X.col(i) = sign * mu + noise_sd * z;
    else
      ds.X.col(i) = sign * mu + chol_l * z;
  }
  Assignment truth;
  truth.K = 2;
  truth.labels.assign(static_cast<size_t>(spec.n), 1);
  for (int i = spec.n / 2; i < spec.n; ++i) truth.labels[static_cast<size_t>(i)] = 2;
  ds.truth = std::move(truth);
  ds.gen = std::make_shared<ScenarioSpec>(spec);
  return ds;
}

}  // namespace sparsekm
