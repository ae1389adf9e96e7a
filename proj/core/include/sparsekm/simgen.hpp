#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sparsekm/model.hpp"

namespace sparsekm {

enum class Scenario { Isotropic, ChainPrecision, Ar1Covariance };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Symmetric two-cluster Gaussian mixture: n/2 draws from N(+mu, Sigma) and
// n/2 from N(-mu, Sigma), with the discriminating direction beta = Omega*mu
// supported on the first `s` features.
struct ScenarioSpec {
  Scenario scenario = Scenario::Isotropic;
  int p = 0;
  int n = 0;  // even
  int s = 10;
  // Isotropic: l2 distance between the two centers.
  // Chain/AR1: Mahalanobis distance 2*sqrt(mu' Omega mu).
  double separation = 0.0;
  double rho = 0.0;  // chain / AR1 parameter, ignored for isotropic
  uint64_t seed = 0;

  void validate() const;

  // JSON object with exactly these field names:
  // scenario, p, n, s, separation, rho, seed.
  std::string to_json() const;
  static ScenarioSpec from_json(const std::string& text);
};

CovarianceModel make_covariance(const ScenarioSpec& spec);

// (mu, beta): beta has equal-magnitude entries on {1..s}; mu = Sigma * beta,
// scaled so 2*sqrt(mu' Omega mu) equals spec.separation.
std::pair<Vector, Vector> make_centers(const ScenarioSpec& spec, const CovarianceModel& cov);

// Deterministic given spec.seed. Truth labels are [1]*n/2 ++ [2]*n/2.
Dataset generate(const ScenarioSpec& spec);

}  // namespace sparsekm
