#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bw/implied_vol.hpp"
#include "bw/models.hpp"

namespace bw {

enum class PricingMethod { tail_integral, fourier };

std::string_view to_string(PricingMethod m) noexcept;

struct QuadratureSettings {
    /// Absolute tolerance, measured in units of the out-of-the-money tail
    /// (the integrand is divided by the tail at the strike before
    /// integrating, so deep-wing prices keep their relative accuracy).
    double abs_tol = 1e-13;
    double rel_tol = 1e-10;
    int max_subdivisions = 400;
    /// Discarded truncated mass, in the same units as abs_tol.
    double truncation_guard = 1e-14;

    /// Throws DomainError when tolerances leave (0, 1) or
    /// max_subdivisions < 16.
    void validate() const;
};

struct PriceQuote {
    double kappa = 0.0;
    double call = 0.0;
    double put = 0.0;
    /// ln call and ln put; finite where the prices underflow.
    double log_call = 0.0;
    double log_put = 0.0;
    PricingMethod method = PricingMethod::tail_integral;
    double call_error = 0.0;
    double put_error = 0.0;
    /// max(call_error, put_error).
    double abs_error_estimate = 0.0;
};

/// Prices through c(kappa) = int_kappa^inf (1 - F) and
/// p(kappa) = int_-inf^kappa F, truncated where the Chernoff bound
/// (1 - F(x)) <= exp(-eps x) M(eps), eps = lambda_minus / 2 (and its
/// mirror for the put), puts the discarded mass below the guard.
/// Throws UnsupportedModel without (IR)/(IL) and AccuracyNotReached when
/// the quadrature misses its tolerance.
[[nodiscard]] PriceQuote price_from_tail(const Model& model, double kappa,
                                         const QuadratureSettings& settings = {});

/// Damped-transform price
///   e^{-alpha kappa} / (2 pi) int e^{-i u kappa} phi(u - i alpha) / (alpha + i u)^2 du.
/// alpha in (0, lambda_minus) yields the call, alpha in (-lambda_plus, 0)
/// the put; the other leg follows from parity. Throws DampingOutsideStrip
/// for any other alpha.
[[nodiscard]] PriceQuote price_from_cf(const Model& model, double kappa, double alpha,
                                       const QuadratureSettings& settings = {});

/// Default damping: lambda_minus / 2 for calls (kappa >= 0), -lambda_plus / 2
/// for puts; 1 / stddev on an infinite side.
[[nodiscard]] double default_damping(const Model& model, double kappa);

/// Damping used for smiles: moves toward the strip boundary as |kappa|
/// grows (distance max(1/|kappa|, ...) capped at half the boundary), which
/// keeps e^{alpha kappa} c(kappa) of order one in the far wing.
[[nodiscard]] double wing_damping(const Model& model, double kappa);

enum class PointStatus { ok, failed };

struct SmilePoint {
    double kappa = 0.0;
    /// Out-of-the-money price: call for kappa >= 0, put for kappa < 0.
    double price = 0.0;
    double log_price = 0.0;
    double price_error = 0.0;
    double ivol = 0.0;
    PricingMethod method = PricingMethod::tail_integral;
    IvolMethod ivol_method = IvolMethod::newton;
    PointStatus status = PointStatus::ok;
    std::string message;

    [[nodiscard]] bool ok() const noexcept { return status == PointStatus::ok; }
    [[nodiscard]] bool is_call() const noexcept { return kappa >= 0.0; }
};

struct SmileGrid {
    std::vector<SmilePoint> points;
};

/// Prices every grid point (tail integral when the model has closed-form
/// tails, Fourier otherwise) and inverts the out-of-the-money price.
/// Per-point failures are recorded, not thrown. The grid must be finite
/// and strictly increasing (DomainError otherwise).
[[nodiscard]] SmileGrid smile_from_model(const Model& model, std::span<const double> grid,
                                         const QuadratureSettings& settings = {},
                                         double tol_iv = 1e-12);

/// Price one point with the engine smile_from_model would choose.
[[nodiscard]] PriceQuote price_preferred(const Model& model, double kappa,
                                         const QuadratureSettings& settings = {});

}  // namespace bw
