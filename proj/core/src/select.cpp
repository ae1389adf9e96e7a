#include "sparsekm/select.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsekm {

FeatureSet select_known_cov(const Vector& beta_hat, const Vector& omega_diag, int n, int p,
                            int n1, int n2) {
  if (p != beta_hat.size() || p != omega_diag.size())
    throw std::invalid_argument("select_known_cov: length mismatch");
  if (n1 < 1 || n2 < 1 || n1 + n2 != n)
    throw std::invalid_argument("select_known_cov: need n1, n2 >= 1 with n1 + n2 = n");
  if (omega_diag.minCoeff() <= 0.0)
    throw std::invalid_argument("select_known_cov: omega_diag must be positive");
  const double base = std::sqrt(2.0 * n * std::log(2.0 * p)) /
                      std::sqrt(static_cast<double>(n1) * static_cast<double>(n2));
  FeatureSet out;
  for (int j = 0; j < p; ++j)
    if (std::abs(beta_hat(j)) > base * std::sqrt(omega_diag(j))) out.push_back(j + 1);
  return out;
}

FeatureSet select_isee(const Vector& mu_diff, int n, int p) {
  if (p != mu_diff.size()) throw std::invalid_argument("select_isee: length mismatch");
  if (n < 2 || p < 2) throw std::invalid_argument("select_isee: need n >= 2 and p >= 2");
  const double threshold = std::sqrt(std::log(static_cast<double>(n)) *
                                     std::log(static_cast<double>(p)) / n);
  FeatureSet out;
  for (int j = 0; j < p; ++j)
    if (std::abs(mu_diff(j)) > threshold) out.push_back(j + 1);
  return out;
}

FeatureSet select_isee_maximal(const Vector& mu_diff, const Vector& omega_diag, int n, int p,
                               int n1, int n2) {
  return select_known_cov(mu_diff, omega_diag, n, p, n1, n2);
}

}  // namespace sparsekm
