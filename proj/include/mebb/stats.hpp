#pragma once

#include <span>

#include "mebb/matrix.hpp"

namespace mebb {

/// Best / average / sample standard deviation of a batch of final costs.
struct RunSummary {
    double best = 0.0;
    double average = 0.0;
    double std = 0.0; ///< n-1 denominator; 0 for a single run
    std::size_t n_runs = 0;
};

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;
};

/// Throws std::invalid_argument on empty input. Values are summed in sorted
/// order, so the result does not depend on the order of `costs`.
RunSummary summarize(std::span<const double> costs);

/// Friedman rank test. Rows of `scores` are blocks, columns are treatments;
/// lower scores rank first and ties share the average rank. The p-value uses
/// the chi-square approximation with t-1 degrees of freedom.
TestResult friedman_test(const Matrix& scores);

/// Two-sided Welch t-test (unequal variances, Welch-Satterthwaite df).
/// Needs >= 2 values per sample and nonzero variance in at least one.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

namespace special {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// P(X > x) for X ~ chi-square(df).
double chi_square_sf(double x, double df);
/// P(|T| >= |t|) for T ~ Student t(df).
double student_t_two_sided(double t, double df);

}  // namespace special

}  // namespace mebb
