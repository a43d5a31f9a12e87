#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "sggmech/kernels.hpp"
#include "sggmech/parallel.hpp"
#include "support.hpp"

using namespace sggmech;

namespace {
Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.normal();
  return m;
}
}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const auto v = random_matrix(rng, 200 + rng.below(50), 16);
      const auto o = random_matrix(rng, 24, 16);
      const auto r = random_matrix(rng, 12, 16);
      const double gamma = rng.uniform();
      CHECK(kernels::serial::max_similarity(v, o) == kernels::parallel::max_similarity(v, o));
      CHECK(kernels::serial::step1_scores(v, o, r, gamma) == kernels::parallel::step1_scores(v, o, r, gamma));
      CHECK(kernels::serial::cosine_similarity(o) == kernels::parallel::cosine_similarity(o));
    }
  }

  TEST_CASE("max_similarity against a direct oracle") {
    Rng rng(32);
    const auto v = random_matrix(rng, 30, 5);
    const auto k = random_matrix(rng, 7, 5);
    const auto got = kernels::serial::max_similarity(v, k);
    for (std::size_t i = 0; i < v.rows(); ++i) {
      double best = -INFINITY;
      for (std::size_t j = 0; j < k.rows(); ++j) {
        double s = 0;
        for (std::size_t c = 0; c < 5; ++c) s += v(i, c) * k(j, c);
        best = std::max(best, s);
      }
      CHECK(got[i] == doctest::Approx(best).epsilon(1e-14));
    }
  }

  TEST_CASE("cosine matrix is symmetric, bounded, unit diagonal") {
    Rng rng(33);
    auto m = random_matrix(rng, 9, 6);
    for (double& x : m.row(4)) x = 0.0;
    const auto c = kernels::serial::cosine_similarity(m);
    for (std::size_t i = 0; i < 9; ++i) {
      CHECK(c(i, i) == (i == 4 ? 0.0 : 1.0));
      for (std::size_t j = 0; j < 9; ++j) {
        CHECK(c(i, j) == c(j, i));
        CHECK(std::abs(c(i, j)) <= 1.0);
        if (i == 4 || j == 4) CHECK(c(i, j) == 0.0);
      }
    }
  }

  TEST_CASE("logistic") {
    CHECK(kernels::logistic(0.0) == 0.5);
    CHECK(kernels::logistic(1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
    CHECK(kernels::logistic(-800.0) >= 0.0);
    CHECK(kernels::logistic(800.0) == 1.0);
  }

  TEST_CASE("thread cap follows the environment") {
    ::setenv("SGG_MECH_THREADS", "3", 1);
    CHECK(worker_threads() == 3);
    ::setenv("SGG_MECH_THREADS", "0", 1);
    CHECK(worker_threads() >= 1);
    ::unsetenv("SGG_MECH_THREADS");
    CHECK(worker_threads() >= 1);
  }
}
