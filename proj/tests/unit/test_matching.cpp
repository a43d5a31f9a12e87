#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "sggmech/error.hpp"
#include "sggmech/losses.hpp"
#include "sggmech/matching.hpp"
#include "sggmech/rng.hpp"

using namespace sggmech;

namespace {

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

struct Best {
  Pairs pairs;
  double cost = std::numeric_limits<double>::infinity();
};

// Enumerates permutations of the larger side; the first min(r, c) slots form an
// injection. Keeps the (cost, pairs) lexicographic minimum.
Best enumerate(const Matrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  const bool wide = r <= c;
  const std::size_t big = wide ? c : r, small = wide ? r : c;
  std::vector<std::size_t> perm(big);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Best best;
  do {
    Pairs p;
    for (std::size_t s = 0; s < small; ++s) p.emplace_back(wide ? s : perm[s], wide ? perm[s] : s);
    std::sort(p.begin(), p.end());
    double cost = 0;
    for (auto [q, g] : p) cost += m(q, g);
    if (cost < best.cost || (cost == best.cost && p < best.pairs)) best = {p, cost};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Matrix random_cost(Rng& rng, std::size_t r, std::size_t c, bool integral) {
  Matrix m(r, c);
  for (double& v : m.data()) v = integral ? static_cast<double>(rng.below(4)) : rng.uniform(-1.0, 3.0);
  return m;
}

}  // namespace

TEST_SUITE("matching") {
  TEST_CASE("fixtures") {
    auto a = hungarian(Matrix(1, 1, std::vector<double>{0}));
    CHECK(a.pairs == Pairs{{0, 0}});
    CHECK(a.total_cost == 0.0);
    a = hungarian(Matrix(2, 2, std::vector<double>{1, 2, 2, 1}));
    CHECK(a.pairs == Pairs{{0, 0}, {1, 1}});
    CHECK(a.total_cost == 2.0);
    a = brute_force_assignment(Matrix(2, 2, std::vector<double>{3, 1, 1, 3}));
    CHECK(a.pairs == Pairs{{0, 1}, {1, 0}});
    CHECK(a.total_cost == 2.0);
    CHECK(brute_force_assignment(Matrix(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6})).pairs.size() == 2);
    CHECK(hungarian(Matrix(0, 3)).pairs.empty());
  }

  TEST_CASE("ties resolve to the lexicographically smallest pair list") {
    CHECK(hungarian(Matrix(3, 3, 0.0)).pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
    CHECK(hungarian(Matrix(3, 2, 1.0)).pairs == Pairs{{0, 0}, {1, 1}});
    CHECK(hungarian(Matrix(2, 3, 1.0)).pairs == Pairs{{0, 0}, {1, 1}});
    CHECK(brute_force_assignment(Matrix(3, 3, 0.0)).pairs == Pairs{{0, 0}, {1, 1}, {2, 2}});
    // Both diagonals cost 2; the main one is smaller.
    CHECK(hungarian(Matrix(2, 2, std::vector<double>{1, 1, 1, 1})).pairs == Pairs{{0, 0}, {1, 1}});
    CHECK(hungarian(Matrix(2, 3, std::vector<double>{5, 0, 0, 5, 0, 0})).pairs == Pairs{{0, 1}, {1, 2}});
  }

  TEST_CASE("hungarian and brute force agree with an enumeration oracle") {
    Rng rng(51);
    for (int trial = 0; trial < 600; ++trial) {
      const std::size_t r = 1 + rng.below(6), c = 1 + rng.below(6);
      const bool integral = trial % 2 == 0;
      const Matrix m = random_cost(rng, r, c, integral);
      const auto oracle = enumerate(m);
      const auto h = hungarian(m);
      const auto b = brute_force_assignment(m);
      REQUIRE(b.total_cost == oracle.cost);
      REQUIRE(b.pairs == oracle.pairs);
      REQUIRE(h.total_cost == oracle.cost);
      REQUIRE(h.pairs == oracle.pairs);
      REQUIRE(h.total_cost == assignment_cost(m, h.pairs));
    }
  }

  TEST_CASE("hungarian equals brute force up to 8x8") {
    Rng rng(52);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t r = 1 + rng.below(8), c = 1 + rng.below(8);
      const Matrix m = random_cost(rng, r, c, trial % 3 == 0);
      const auto h = hungarian(m);
      const auto b = brute_force_assignment(m);
      REQUIRE(h.total_cost == b.total_cost);
      REQUIRE(h.pairs == b.pairs);
      REQUIRE(h.pairs.size() == std::min(r, c));
    }
  }

  TEST_CASE("constant shift keeps the pair set") {
    Rng rng(53);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t r = 1 + rng.below(7), c = 1 + rng.below(7);
      Matrix m = random_cost(rng, r, c, true);
      const auto before = hungarian(m);
      for (double& v : m.data()) v += 3.0;
      const auto after = hungarian(m);
      REQUIRE(after.pairs == before.pairs);
      REQUIRE(after.total_cost == before.total_cost + 3.0 * static_cast<double>(std::min(r, c)));
    }
  }

  TEST_CASE("row permutation permutes the assignment") {
    Rng rng(54);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t r = 1 + rng.below(7), c = 1 + rng.below(7);
      const Matrix m = random_cost(rng, r, c, false);
      std::vector<std::size_t> perm(r);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(perm);
      Matrix pm(r, c);
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) pm(i, j) = m(perm[i], j);
      }
      Pairs mapped;
      for (auto [q, g] : hungarian(pm).pairs) mapped.emplace_back(perm[q], g);
      std::sort(mapped.begin(), mapped.end());
      REQUIRE(mapped == hungarian(m).pairs);
    }
  }

  TEST_CASE("errors") {
    Matrix bad(2, 2, 0.0);
    bad(1, 0) = std::numeric_limits<double>::quiet_NaN();
    for (const auto& m : {bad, Matrix(1, 1, std::numeric_limits<double>::infinity())}) {
      try {
        hungarian(m);
        FAIL("expected NonFiniteCost");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonFiniteCost);
      }
    }
    try {
      brute_force_assignment(Matrix(10, 10, 0.0));
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooLarge);
    }
  }

  TEST_CASE("pair cost") {
    QueryPrediction q;
    q.box = {0.2, 0.2, 0.6, 0.6};
    q.class_probs = {0.0, 1.0};
    GroundTruthObject g{1, {0.2, 0.2, 0.6, 0.6}};
    CHECK(pair_cost(q, g) == 0.0);

    QueryPrediction shifted = q;
    shifted.box.x1 = 0.1;
    CHECK(pair_cost(shifted, g, MatchWeights{2, 5, 0}) == doctest::Approx(0.5).epsilon(1e-12));

    GroundTruthObject g0{0, g.box};
    CHECK(pair_cost(q, g0) == doctest::Approx(2.0));

    // Pixel boxes normalized by the image extent.
    QueryPrediction px = q;
    px.box = {20, 20, 60, 60};
    GroundTruthObject gpx{1, {10, 20, 60, 60}};
    CHECK(pair_cost(px, gpx, MatchWeights{0, 1, 0}, 100, 50) == doctest::Approx(0.1));
    const MatchWeights w{2, 5, 2};
    CHECK(pair_cost(px, gpx, w, 100, 50) ==
          doctest::Approx(2 * 0.0 + 5 * 0.1 + 2 * giou_loss(px.box, gpx.box)).epsilon(1e-12));

    try {
      pair_cost(q, GroundTruthObject{2, g.box});
      FAIL("expected UnknownClass");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownClass);
    }

    const auto m = cost_matrix({q, shifted}, {g, g0});
    CHECK(m.rows() == 2);
    CHECK(m(1, 0) == pair_cost(shifted, g));
    CHECK(m(0, 1) == pair_cost(q, g0));
  }
}
