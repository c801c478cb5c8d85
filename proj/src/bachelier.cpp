#include "bw/bachelier.hpp"

#include <cmath>
#include <numbers>

#include "bw/errors.hpp"
#include "bw/normal.hpp"

namespace bw {

namespace {

constexpr double kTailSwitch = 8.0;

void check_args(double kappa, double sigma) {
    if (!std::isfinite(kappa) || !std::isfinite(sigma))
        throw DomainError("bachelier: non-finite input");
    if (sigma <= 0.0) throw DomainError("bachelier: sigma must be positive");
}

}  // namespace

namespace {

// Out-of-the-money (or at-the-money) call, kappa >= 0.
double otm_call(double kappa, double sigma) {
    const double d = kappa / sigma;
    if (d > kTailSwitch) return sigma * norm_pdf(d) * mills_complement(d);
    return -kappa * norm_cdf(-d) + sigma * norm_pdf(d);
}

}  // namespace

double call_price(double kappa, double sigma) {
    check_args(kappa, sigma);
    // In the money, go through parity so the result never dips below -kappa.
    if (kappa < 0.0) return -kappa + otm_call(-kappa, sigma);
    return otm_call(kappa, sigma);
}

double put_price(double kappa, double sigma) { return call_price(-kappa, sigma); }

double log_call_price(double kappa, double sigma) {
    check_args(kappa, sigma);
    const double d = kappa / sigma;
    if (d > kTailSwitch)
        return std::log(sigma) + log_norm_pdf(d) + std::log(mills_complement(d));
    return std::log(call_price(kappa, sigma));
}

double log_put_price(double kappa, double sigma) { return log_call_price(-kappa, sigma); }

double vega(double kappa, double sigma) {
    check_args(kappa, sigma);
    return norm_pdf(kappa / sigma);
}

PriceBounds bachelier_bounds(double y, double beta) {
    if (!(y > 0.0) || !(beta > 0.0) || !std::isfinite(y) || !std::isfinite(beta))
        throw DomainError("bachelier_bounds: y and beta must be positive and finite");
    const double damp = std::exp(-y / (2.0 * beta));
    const double root = std::sqrt(y / beta);
    const double shifted = std::sqrt(y / beta + 4.0 / std::numbers::pi);
    const double g_u = std::sqrt(beta * y) * kInvSqrt2Pi;
    const double g_l = kInvSqrt2Pi * std::sqrt(beta * y) * shifted / (root + shifted);
    return {g_l * damp, g_u * damp};
}

PriceBounds mills_sandwich(double kappa, double sigma) {
    check_args(kappa, sigma);
    if (!(kappa > 0.0)) throw DomainError("mills_sandwich: kappa must be positive");
    const double d = kappa / sigma;
    const double pdf = norm_pdf(d);
    // sigma - kappa / (d + sqrt(d^2 + c)) == sigma sqrt(d^2 + c) / (d + sqrt(d^2 + c))
    auto bracket = [&](double c) {
        const double r = std::sqrt(d * d + c);
        return sigma * r / (d + r);
    };
    return {pdf * bracket(4.0 / std::numbers::pi), pdf * bracket(2.0)};
}

}  // namespace bw
