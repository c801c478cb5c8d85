#pragma once

namespace bw {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;
inline constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

/// Standard normal density.
[[nodiscard]] double norm_pdf(double x) noexcept;

[[nodiscard]] double log_norm_pdf(double x) noexcept;

/// Standard normal cdf. Uses erfc so the lower tail keeps full relative
/// precision until it underflows near x = -37.5.
[[nodiscard]] double norm_cdf(double x) noexcept;

/// ln Phi(x), finite for every finite x.
[[nodiscard]] double log_norm_cdf(double x) noexcept;

/// Mills ratio R(x) = Phi(-x) / phi(x).
///
/// For x > 8 the ratio comes from its continued fraction
///   R(x) = 1 / (x + 1 / (x + 2 / (x + 3 / (x + ...))))
/// so it stays accurate where both numerator and denominator underflow.
[[nodiscard]] double mills_ratio(double x) noexcept;

/// 1 - x R(x) for x >= 0, computed without cancellation in the tail.
/// This is the factor in c_b(k, s) = s phi(d) (1 - d R(d)), d = k / s.
[[nodiscard]] double mills_complement(double x) noexcept;

}  // namespace bw
