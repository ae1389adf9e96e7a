#include <doctest.h>

#include <algorithm>

#include "sparsekm/model.hpp"
#include "sparsekm/rng.hpp"

using namespace sparsekm;

namespace {
Assignment assign(std::vector<int> labels, int K) {
  Assignment a;
  a.labels = std::move(labels);
  a.K = K;
  return a;
}
}  // namespace

TEST_CASE("misclustering_rate examples") {
  CHECK(misclustering_rate(assign({1, 1, 2, 2}, 2), assign({1, 1, 2, 2}, 2)) == 0.0);
  CHECK(misclustering_rate(assign({1, 1, 2, 2}, 2), assign({2, 2, 1, 1}, 2)) == 0.0);
  CHECK(misclustering_rate(assign({1, 1, 2, 2}, 2), assign({1, 2, 2, 2}, 2)) ==
        doctest::Approx(0.25));
}

TEST_CASE("misclustering_rate errors") {
  CHECK_THROWS_AS(misclustering_rate(assign({1, 2}, 2), assign({1, 2, 1}, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(misclustering_rate(assign({1}, 9), assign({1}, 9)), std::invalid_argument);
}

TEST_CASE("misclustering_rate symmetry and relabeling invariance") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int K = 2 + rng.uniform_int(3);
    const int n = K + rng.uniform_int(12);
    auto draw = [&] {
      std::vector<int> l(static_cast<size_t>(n));
      for (auto& v : l) v = 1 + rng.uniform_int(K);
      return assign(l, K);
    };
    Assignment a = draw(), b = draw();
    const double r1 = misclustering_rate(a, b);
    CHECK(r1 == misclustering_rate(b, a));
    CHECK(misclustering_rate(a, a) == 0.0);
    CHECK(r1 <= 1.0 - 1.0 / K + 1e-12);

    // apply a random relabeling permutation to a
    std::vector<int> perm(static_cast<size_t>(K));
    for (int k = 0; k < K; ++k) perm[static_cast<size_t>(k)] = k + 1;
    for (int k = K - 1; k > 0; --k) std::swap(perm[static_cast<size_t>(k)],
                                              perm[static_cast<size_t>(rng.uniform_int(k + 1))]);
    Assignment ap = a;
    for (auto& lab : ap.labels) lab = perm[static_cast<size_t>(lab - 1)];
    CHECK(misclustering_rate(ap, b) == doctest::Approx(r1));
  }
}

TEST_CASE("membership_from_labels examples") {
  CHECK(membership_from_labels(assign({1, 2}, 2)).isApprox(Matrix::Identity(2, 2)));
  CHECK(membership_from_labels(assign({1, 1}, 1)).isApprox(Matrix::Constant(2, 2, 0.5)));

  Matrix expected = Matrix::Zero(4, 4);
  expected.block(0, 0, 2, 2).setConstant(0.5);
  expected.block(2, 2, 2, 2).setConstant(0.5);
  CHECK(membership_from_labels(assign({1, 1, 2, 2}, 2)) == expected);
}

TEST_CASE("membership invariants hold exactly for dyadic cluster sizes") {
  const Matrix z = membership_from_labels(assign({1, 1, 2, 2, 2, 2, 3, 3}, 3));
  const MembershipCheck c = check_membership(z, 3);
  CHECK(c.symmetry_err == 0.0);
  CHECK(c.trace_err == 0.0);
  CHECK(c.row_sum_err == 0.0);
  CHECK(c.min_entry == 0.0);
  CHECK(c.min_eigenvalue >= -1e-12);
  CHECK(c.all());
}

TEST_CASE("membership_from_labels rejects empty clusters") {
  CHECK_THROWS_AS(membership_from_labels(assign({1, 1}, 2)), std::invalid_argument);
}

TEST_CASE("selection_confusion") {
  FeatureSet ten;
  for (int j = 1; j <= 10; ++j) ten.push_back(j);
  CHECK(selection_confusion({1, 2, 11}, ten, 400) == std::pair<int, int>{2, 1});
  CHECK(selection_confusion({}, ten, 400) == std::pair<int, int>{0, 0});
  CHECK(selection_confusion(ten, ten, 400) == std::pair<int, int>{10, 0});
  CHECK_THROWS_AS(selection_confusion({401}, ten, 400), std::invalid_argument);
}

TEST_CASE("rng determinism and stream splitting") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng s1 = Rng::derive(42, 0, 0), s2 = Rng::derive(42, 0, 1), s3 = Rng::derive(42, 1, 0);
  CHECK(s1.next_u64() != s2.next_u64());
  CHECK(s1.next_u64() != s3.next_u64());

  Rng g(5);
  double sum = 0, sum2 = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = g.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / draws) < 0.01);
  CHECK(std::abs(sum2 / draws - 1.0) < 0.02);
}
