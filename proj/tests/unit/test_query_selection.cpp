#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "sggmech/error.hpp"
#include "sggmech/query_selection.hpp"
#include "support.hpp"

using namespace sggmech;

namespace {

double sigma(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TokenMatrix tokens(std::size_t r, std::size_t c, std::vector<double> v, TokenRole role = TokenRole::Visual) {
  return TokenMatrix(Matrix(r, c, std::move(v)), role);
}

TokenMatrix random_tm(Rng& rng, std::size_t r, std::size_t c, TokenRole role) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return TokenMatrix(std::move(m), role);
}

// Full sort by (score desc, index asc), first k.
std::vector<std::size_t> sort_oracle(const std::vector<double>& s, std::size_t k) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
  idx.resize(k);
  return idx;
}

std::vector<double> max_dots(const TokenMatrix& v, const TokenMatrix& keys) {
  std::vector<double> out(v.rows(), -INFINITY);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < keys.rows(); ++j) {
      double s = 0;
      for (std::size_t c = 0; c < v.dim(); ++c) s += v.row(i)[c] * keys.row(j)[c];
      out[i] = std::max(out[i], s);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("query_selection") {
  TEST_CASE("step1 fixtures") {
    const auto v = tokens(1, 2, {1, 0});
    const auto to = tokens(2, 2, {1, 0, 0, 1}, TokenRole::ObjectClass);
    const auto tr = tokens(1, 2, {0.5, 0}, TokenRole::RelationClass);
    const auto s = step1_scores(v, to, tr, 0.5);
    CHECK(s[0] == doctest::Approx(std::sqrt(sigma(1.0) * sigma(0.5))).epsilon(1e-14));
    CHECK(s[0] == doctest::Approx(0.67456).epsilon(1e-4));

    const auto orth = tokens(1, 3, {0, 0, 1});
    const auto to3 = tokens(1, 3, {1, 0, 0}, TokenRole::ObjectClass);
    const auto tr3 = tokens(1, 3, {0, 1, 0}, TokenRole::RelationClass);
    CHECK(step1_scores(orth, to3, tr3, 0.3)[0] == doctest::Approx(0.5).epsilon(1e-15));

    const auto g1 = step1_scores(v, to, tr, 1.0);
    CHECK(g1[0] == doctest::Approx(sigma(1.0)).epsilon(1e-15));
  }

  TEST_CASE("step1 rejects bad inputs") {
    const auto v = tokens(1, 2, {1, 0});
    const auto to = tokens(1, 3, {1, 0, 0}, TokenRole::ObjectClass);
    const auto tr = tokens(1, 2, {1, 0}, TokenRole::RelationClass);
    try {
      step1_scores(v, to, tr, 0.5);
      FAIL("expected DimMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DimMismatch);
    }
    CHECK_THROWS_AS(step1_scores(v, tokens(1, 2, {1, 0}), tr, 1.5), Error);
  }

  TEST_CASE("top_k fixtures") {
    const std::vector<double> s{0.1, 0.9, 0.9, 0.2};
    CHECK(top_k(s, 2) == std::vector<std::size_t>{1, 2});
    CHECK(top_k(s, 4) == std::vector<std::size_t>{1, 2, 3, 0});
    CHECK(top_k(std::vector<double>{5}, 1) == std::vector<std::size_t>{0});
    for (std::size_t bad : {std::size_t{0}, std::size_t{5}}) {
      try {
        top_k(s, bad);
        FAIL("expected KOutOfRange");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::KOutOfRange);
      }
    }
  }

  TEST_CASE("top_k equals the full-sort oracle, ties included") {
    Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 1 + rng.below(40);
      std::vector<double> s(n);
      // Coarse values force frequent ties.
      for (double& x : s) x = static_cast<double>(rng.below(6)) / 5.0;
      const std::size_t k = 1 + rng.below(n);
      REQUIRE(top_k(s, k) == sort_oracle(s, k));
    }
  }

  TEST_CASE("interaction scores") {
    const auto v = tokens(1, 2, {1, 0});
    CHECK(interaction_scores(v, tokens(2, 2, {0, 1, 0.4, 0}, TokenRole::Interaction))[0] == doctest::Approx(0.4));
    CHECK(interaction_scores(tokens(1, 2, {0, 0}), tokens(1, 2, {3, 4}, TokenRole::Interaction))[0] == 0.0);
    CHECK(interaction_scores(v, tokens(1, 2, {1, 0}, TokenRole::Interaction))[0] == 1.0);
    try {
      interaction_scores(v, TokenMatrix(Matrix(0, 2), TokenRole::Interaction));
      FAIL("expected EmptyInteractionSet");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyInteractionSet);
    }
  }

  TEST_CASE("step2 fixtures") {
    const auto v = tokens(4, 2, {0.9, 0.1, 0.8, 0.2, 0.1, 1.0, 0.7, 0.3});
    const auto tin = tokens(1, 2, {0, 1}, TokenRole::Interaction);
    const auto to = tokens(1, 2, {1, 0}, TokenRole::ObjectClass);
    const auto tr = tokens(1, 2, {1, 1}, TokenRole::RelationClass);
    const auto s = step2_select(v, tin, to, 3, 1, 0.5, tr);
    REQUIRE(s.indices.size() == 3);
    CHECK(s.indices[0] == 2);
    CHECK(s.interaction_count == 1);
    CHECK(s.indices == std::vector<std::size_t>{2, 0, 1});

    const auto l0 = step2_select(v, tin, to, 3, 0, 0.5, tr);
    CHECK(l0.indices == sort_oracle(max_dots(v, to), 3));
    const auto lk = step2_select(v, tin, to, 3, 3, 0.5, tr);
    CHECK(lk.indices == sort_oracle(max_dots(v, tin), 3));
    CHECK(lk.interaction_count == 3);

    const auto empty = step2_select(v, TokenMatrix(Matrix(0, 2), TokenRole::Interaction), to, 2, 1, 0.5, tr);
    CHECK(empty.interaction_count == 0);
    CHECK(empty.indices == top_k(step1_scores(v, to, tr, 0.5), 2));

    CHECK_THROWS_AS(step2_select(v, tin, to, 5, 1, 0.5, tr), Error);
    CHECK_THROWS_AS(step2_select(v, tin, to, 2, 3, 0.5, tr), Error);
  }

  TEST_CASE("step2 prefix and remainder match independent rankings") {
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 2 + rng.below(30), d = 1 + rng.below(6);
      const auto v = random_tm(rng, n, d, TokenRole::Visual);
      const auto tin = random_tm(rng, 1 + rng.below(4), d, TokenRole::Interaction);
      const auto to = random_tm(rng, 1 + rng.below(5), d, TokenRole::ObjectClass);
      const auto tr = random_tm(rng, 1 + rng.below(5), d, TokenRole::RelationClass);
      const std::size_t k = 1 + rng.below(n);
      const std::size_t l = rng.below(k + 1);
      const auto s = step2_select(v, tin, to, k, l, rng.uniform(), tr);
      REQUIRE(s.indices.size() == k);
      REQUIRE(std::set<std::size_t>(s.indices.begin(), s.indices.end()).size() == k);
      REQUIRE(s.interaction_count == l);

      const auto prefix = sort_oracle(max_dots(v, tin), l);
      REQUIRE(std::equal(prefix.begin(), prefix.end(), s.indices.begin()));
      auto obj = max_dots(v, to);
      for (std::size_t p : prefix) obj[p] = -INFINITY;
      const auto rest = sort_oracle(obj, k);
      REQUIRE(std::equal(s.indices.begin() + static_cast<std::ptrdiff_t>(l), s.indices.end(), rest.begin()));
    }
  }

  TEST_CASE("gamma extremes rank like single-vocabulary similarity") {
    Rng rng(43);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.below(30);
      const auto v = random_tm(rng, n, 4, TokenRole::Visual);
      const auto to = random_tm(rng, 3, 4, TokenRole::ObjectClass);
      const auto tr = random_tm(rng, 3, 4, TokenRole::RelationClass);
      REQUIRE(top_k(step1_scores(v, to, tr, 1.0), n) == sort_oracle(max_dots(v, to), n));
      REQUIRE(top_k(step1_scores(v, to, tr, 0.0), n) == sort_oracle(max_dots(v, tr), n));
    }
  }

  TEST_CASE("positive scaling keeps the interaction ranking") {
    Rng rng(44);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.below(20);
      const auto v = random_tm(rng, n, 3, TokenRole::Visual);
      const auto tin = random_tm(rng, 2, 3, TokenRole::Interaction);
      // Powers of two scale exactly, so ties survive as ties.
      Matrix scaled = v.values;
      for (double& x : scaled.data()) x *= 4.0;
      REQUIRE(top_k(interaction_scores(v, tin), n) ==
              top_k(interaction_scores(TokenMatrix(scaled, TokenRole::Visual), tin), n));
    }
  }

  TEST_CASE("scaled budget") {
    auto b = scaled_budget(kDefaultQueryCount, kDefaultInteractionQueries, 15);
    CHECK(b.k == 15);
    CHECK(b.l == 15);
    b = scaled_budget(900, 200, 5000);
    CHECK(b.k == 900);
    CHECK(b.l == 200);
    b = scaled_budget(6, 4, 15);
    CHECK(b.k == 6);
    CHECK(b.l == 4);
  }
}
