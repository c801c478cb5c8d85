#pragma once

#include <string_view>

namespace bw {

enum class IvolMethod {
    closed_form_atm,
    newton,
    bisection_fallback,
    /// Accepted on a log-price residual because the requested absolute
    /// price tolerance is below what double precision can resolve.
    deep_tail_log,
};

std::string_view to_string(IvolMethod m) noexcept;

struct IvolResult {
    double sigma;
    int iterations;
    /// Absolute price residual, or |ln c_b(sigma) - ln price| when
    /// method == deep_tail_log.
    double residual;
    IvolMethod method;
};

struct IvolOptions {
    int max_iterations = 200;
    /// Log-price residual accepted on the deep-tail path.
    double log_tol = 1e-10;
};

/// Solves c_b(kappa, sigma) = price for sigma.
///
/// In-the-money inputs are mapped to the out-of-the-money put through
/// c - p = -kappa, and the out-of-the-money problem is solved on
/// ln c_b with a safeguarded Newton iteration (bisection when a step leaves
/// the bracket). Throws NoSolutionBelowIntrinsic when
/// price <= max(-kappa, 0), DomainError for non-finite input and
/// ConvergenceFailure when the iteration cap is hit.
[[nodiscard]] IvolResult implied_vol_call(double kappa, double price, double tol,
                                          const IvolOptions& opts = {});

/// Put counterpart; identical to implied_vol_call(-kappa, price, tol).
[[nodiscard]] IvolResult implied_vol_put(double kappa, double price, double tol,
                                         const IvolOptions& opts = {});

/// Inverts an out-of-the-money call given as ln c(kappa), kappa > 0.
/// Used where the price itself underflows; converges to |residual| below
/// opts.log_tol or to machine precision in sigma, whichever comes first.
[[nodiscard]] IvolResult implied_vol_call_log(double kappa, double log_price,
                                              const IvolOptions& opts = {});

/// Out-of-the-money put given as ln p(kappa), kappa < 0.
[[nodiscard]] IvolResult implied_vol_put_log(double kappa, double log_price,
                                             const IvolOptions& opts = {});

}  // namespace bw
