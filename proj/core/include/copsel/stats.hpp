#pragma once

#include <span>

namespace copsel {

double mean(std::span<const double> v);
/// Unbiased (n-1) sample variance.
double sample_variance(std::span<const double> v);

/// Regularized incomplete beta function I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tail Welch unequal-variance t-test. Each sample needs >= 2 points.
/// When both samples have zero variance the statistic is undefined; p is
/// reported as 1.0 and *degenerate is set when provided.
double welch_t_test(std::span<const double> a, std::span<const double> b,
                    bool* degenerate = nullptr);

} // namespace copsel
