#include "bw/normal.hpp"

#include <cmath>
#include <limits>

namespace bw {

namespace {

constexpr double kTailSwitch = 8.0;

// t(x) = 1 / (x + 2 / (x + 3 / (x + ...))), so that R(x) = 1 / (x + t(x)).
// Modified Lentz; converges quickly for x >= kTailSwitch.
double mills_cf_tail(double x) noexcept {
    constexpr double tiny = 1e-300;
    constexpr double eps = 2e-16;
    double f = tiny;
    double c = f;
    double d = 0.0;
    for (int k = 1; k < 500; ++k) {
        const double a = static_cast<double>(k);
        d = x + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return f;
}

}  // namespace

double norm_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double log_norm_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double log_norm_cdf(double x) noexcept {
    if (x > 0.0) return std::log1p(-norm_cdf(-x));
    if (x >= -kTailSwitch) return std::log(norm_cdf(x));
    return log_norm_pdf(x) + std::log(mills_ratio(-x));
}

double mills_ratio(double x) noexcept {
    if (x > kTailSwitch) return 1.0 / (x + mills_cf_tail(x));
    return norm_cdf(-x) / norm_pdf(x);
}

double mills_complement(double x) noexcept {
    if (x > kTailSwitch) {
        const double t = mills_cf_tail(x);
        return t / (x + t);
    }
    return 1.0 - x * mills_ratio(x);
}

}  // namespace bw
