#include "mebb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mebb {

namespace special {

namespace {

constexpr int kMaxTerms = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Series for P(a, x), converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxTerms; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), x >= a + 1.
double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxTerms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
double beta_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxTerms; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double beta_inc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || x < 0.0 || x > 1.0) {
        throw std::invalid_argument("beta_inc: need a, b > 0 and 0 <= x <= 1");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_fraction(a, b, x) / a;
    return 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
}

double chi_square_sf(double x, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("chi_square_sf: df must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

double student_t_two_sided(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_t_two_sided: df must be positive");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return std::clamp(beta_inc(0.5 * df, 0.5, x), 0.0, 1.0);
}

}  // namespace special

RunSummary summarize(std::span<const double> costs) {
    if (costs.empty()) throw std::invalid_argument("summarize: no values");
    std::vector<double> sorted(costs.begin(), costs.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    RunSummary s;
    s.best = sorted.front();
    s.average = mean;
    s.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.n_runs = sorted.size();
    return s;
}

TestResult friedman_test(const Matrix& scores) {
    const std::size_t b = scores.rows();
    const std::size_t t = scores.cols();
    if (b < 2 || t < 2) throw std::invalid_argument("friedman_test: need at least 2 blocks and 2 treatments");

    std::vector<double> rank_sum(t, 0.0);
    std::vector<std::size_t> order(t);
    for (std::size_t i = 0; i < b; ++i) {
        const auto row = scores.row(i);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return row[x] < row[y]; });
        for (std::size_t pos = 0; pos < t;) {
            std::size_t end = pos + 1;
            while (end < t && row[order[end]] == row[order[pos]]) ++end;
            // Ranks pos+1 .. end share their mean.
            const double shared = 0.5 * static_cast<double>(pos + 1 + end);
            for (std::size_t q = pos; q < end; ++q) rank_sum[order[q]] += shared;
            pos = end;
        }
    }

    const double bd = static_cast<double>(b);
    const double td = static_cast<double>(t);
    const double mid = 0.5 * (td + 1.0);
    double dev = 0.0;
    for (double r : rank_sum) {
        const double mean_rank = r / bd;
        dev += (mean_rank - mid) * (mean_rank - mid);
    }
    TestResult result;
    result.statistic = 12.0 * bd / (td * (td + 1.0)) * dev;
    result.df = td - 1.0;
    result.p_value = special::chi_square_sf(result.statistic, result.df);
    return result;
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("welch_t_test: each sample needs >= 2 values");
    const RunSummary sa = summarize(a);
    const RunSummary sb = summarize(b);
    const double va = sa.std * sa.std / static_cast<double>(a.size());
    const double vb = sb.std * sb.std / static_cast<double>(b.size());
    const double se2 = va + vb;
    if (!(se2 > 0.0)) throw std::invalid_argument("welch_t_test: both samples have zero variance");

    TestResult result;
    result.statistic = (sa.average - sb.average) / std::sqrt(se2);
    result.df = se2 * se2 /
                (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
    result.p_value = special::student_t_two_sided(result.statistic, result.df);
    return result;
}

}  // namespace mebb
