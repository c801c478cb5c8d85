#pragma once

namespace bw {

// Normalized, undiscounted Bachelier formulas. Moneyness is
// kappa = (K - F0) / sqrt(t) and prices are divided by sqrt(t), so every
// quantity here is a function of (kappa, sigma) only.

/// c_b(kappa, sigma) = -kappa Phi(-kappa/sigma) + sigma phi(kappa/sigma).
///
/// For kappa/sigma > 8 the price is evaluated as
/// sigma phi(d) (1 - d R(d)) with the Mills ratio R from its continued
/// fraction, which avoids cancelling -kappa Phi(-d) against sigma phi(d).
/// Throws DomainError for sigma <= 0 or non-finite input.
[[nodiscard]] double call_price(double kappa, double sigma);

/// p_b(kappa, sigma) = kappa (1 - Phi(-kappa/sigma)) + sigma phi(kappa/sigma).
/// Evaluated as c_b(-kappa, sigma), so the reflection identity is exact.
[[nodiscard]] double put_price(double kappa, double sigma);

/// ln c_b(kappa, sigma); finite even where c_b underflows (kappa/sigma up
/// to ~1e150).
[[nodiscard]] double log_call_price(double kappa, double sigma);

[[nodiscard]] double log_put_price(double kappa, double sigma);

/// d c_b / d sigma = phi(kappa / sigma).
[[nodiscard]] double vega(double kappa, double sigma);

struct PriceBounds {
    double lower;
    double upper;
};

/// The pair (g_l(y) e^{-y/(2 beta)}, g_u(y) e^{-y/(2 beta)}) bracketing
/// c_b(y, sqrt(beta y)), with
///   g_u(y) = sqrt(beta y / (2 pi)),
///   g_l(y) = sqrt(beta y) sqrt(y/beta + 4/pi)
///            / (sqrt(2 pi) (sqrt(y/beta) + sqrt(y/beta + 4/pi))).
/// The lower expression inherits the Mills-ratio inequality
/// Phi(-x) <= phi(x) / (x + sqrt(x^2 + 4/pi)), which does not hold for the
/// standard normal (it is off by a factor 2), so only `upper` is a bound in
/// practice. Both values are returned so callers can measure the gap.
[[nodiscard]] PriceBounds bachelier_bounds(double y, double beta);

/// Mills-ratio sandwich for c_b at positive moneyness, d = kappa / sigma:
///   phi(d) (sigma - kappa / (d + sqrt(d^2 + 4/pi)))   (lower)
///   phi(d) (sigma - kappa / (d + sqrt(d^2 + 2)))       (upper)
/// Same caveat as bachelier_bounds: the upper value is a true bound, the
/// lower one is not.
[[nodiscard]] PriceBounds mills_sandwich(double kappa, double sigma);

}  // namespace bw
