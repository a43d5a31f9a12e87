#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sggmech {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;
// Returns true when coordinate `k` of `x` sits within `step` of a kink.
using KinkFn = std::function<bool(std::span<const double> x, std::size_t k, double step)>;

struct GradCheckReport {
  std::string name;
  std::size_t points = 0;
  std::size_t compared = 0;
  std::size_t skipped = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

// |a - n| / max(|a|, |n|, 1e-6)
double relative_error(double analytic, double numeric) noexcept;

// Central differences on every coordinate of `point` not flagged by `near_kink`.
GradCheckReport finite_diff_grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> point,
                                       double step, double tolerance, const KinkFn& near_kink = {});

// Folds a per-point report into a running one.
void merge_into(GradCheckReport& total, const GradCheckReport& part);

// f(x) = sum a_i x_i^2 + b_i x_i at a seeded point.
GradCheckReport quadratic_check(std::uint64_t seed, double step = 1e-4, double tolerance = 1e-8);

// giou, focal, bce, vrd, rrd over `points` seeded points each, then quadratic.
std::vector<GradCheckReport> run_gradient_suite(std::uint64_t seed, std::size_t points = 100,
                                                double tolerance = 1e-4);

}  // namespace sggmech
