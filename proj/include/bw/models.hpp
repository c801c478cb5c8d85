#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bw {

enum class Side { right, left };

std::string_view to_string(Side s) noexcept;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Horizontal strip Im(xi) in (-lambda_minus, lambda_plus) on which the
/// characteristic function is analytic. lambda_minus is the exponential
/// decay rate of the right tail, lambda_plus that of the left tail; either
/// may be infinite.
struct AnalyticityStrip {
    double lambda_minus = kInfinity;
    double lambda_plus = kInfinity;

    [[nodiscard]] double boundary(Side side) const noexcept {
        return side == Side::right ? lambda_minus : lambda_plus;
    }
    [[nodiscard]] bool contains_imag(double v) const noexcept {
        return v > -lambda_minus && v < lambda_plus;
    }
};

using ParamList = std::vector<std::pair<std::string, double>>;

/// Law of the normalized return zeta = (F_t - F_0) / sqrt(t).
///
/// Instances are immutable once built and safe to share between threads.
class Model {
  public:
    virtual ~Model() = default;

    [[nodiscard]] virtual std::string_view name() const noexcept = 0;
    [[nodiscard]] virtual ParamList params() const = 0;

    [[nodiscard]] virtual double pdf(double x) const = 0;
    [[nodiscard]] virtual double log_pdf(double x) const = 0;
    [[nodiscard]] virtual double cdf(double x) const = 0;
    /// Complementary cdf, 1 - F(x).
    [[nodiscard]] virtual double sf(double x) const = 0;
    /// ln(1 - F(x)), finite far beyond the point where sf underflows.
    [[nodiscard]] virtual double log_sf(double x) const = 0;
    [[nodiscard]] virtual double log_cdf(double x) const = 0;

    /// phi(xi) = E[exp(i xi zeta)]. Throws DomainError outside the strip.
    [[nodiscard]] virtual std::complex<double> char_fn(std::complex<double> xi) const = 0;

    /// M(s) = E[exp(s zeta)] = phi(-i s) for s in (-lambda_plus, lambda_minus).
    [[nodiscard]] double mgf(double s) const;

    /// Exact n-th derivative of M when the model has one.
    [[nodiscard]] virtual std::optional<double> mgf_derivative(double s, int n) const;

    [[nodiscard]] virtual AnalyticityStrip strip() const noexcept = 0;
    [[nodiscard]] virtual double mean() const noexcept = 0;
    [[nodiscard]] virtual double stddev() const noexcept = 0;

    /// True when sf/cdf are closed forms (tail-integral pricing preferred).
    [[nodiscard]] virtual bool closed_form_tail() const noexcept = 0;
    /// Relative accuracy of sf/cdf/log_sf; zero for closed forms.
    [[nodiscard]] virtual double tail_rel_error() const noexcept { return 0.0; }
    /// Points where the density is not smooth; quadrature keeps them on
    /// panel edges.
    [[nodiscard]] virtual std::vector<double> kinks() const { return {}; }

    [[nodiscard]] bool satisfies_ir() const noexcept { return strip().lambda_minus > 0.0; }
    [[nodiscard]] bool satisfies_il() const noexcept { return strip().lambda_plus > 0.0; }

    /// ln of the tail on the requested side at distance k from the origin:
    /// ln(1 - F(k)) on the right, ln F(-k) on the left.
    [[nodiscard]] double log_tail(Side side, double k) const {
        return side == Side::right ? log_sf(k) : log_cdf(-k);
    }
};

using ModelPtr = std::shared_ptr<const Model>;

/// Zero-mean Gaussian with standard deviation sigma: the Bachelier model.
[[nodiscard]] ModelPtr gaussian_model(double sigma);

/// Two-sided exponential, density proportional to exp(-lambda_r x) for
/// x > 0 and exp(lambda_l x) for x < 0, shifted to zero mean. Its strip is
/// (lambda_minus, lambda_plus) = (lambda_r, lambda_l) and phi has simple
/// poles on both boundaries.
[[nodiscard]] ModelPtr asym_laplace_model(double lambda_r, double lambda_l);

/// Normal inverse Gaussian with
///   phi(xi) = exp(i mu xi + delta (sqrt(alpha^2 - beta^2)
///                                  - sqrt(alpha^2 - (beta + i xi)^2))),
/// strip (alpha - beta, alpha + beta). When mu is omitted it is chosen so
/// the law has zero mean. The density is the Bessel-K1 closed form; tails
/// come from adaptive quadrature of the density.
[[nodiscard]] ModelPtr nig_model(double alpha, double beta, double delta,
                                 std::optional<double> mu = std::nullopt);

/// Locates a finite strip boundary from the density alone: the largest s for
/// which the tail mass of exp(s x) f(x) keeps shrinking between the windows
/// [X/2, X] and [X, 2X] far out (X = reach * stddev). Returns +inf when no
/// divergence is found below `s_cap / stddev`. Independent of char_fn.
[[nodiscard]] double probe_strip_boundary(const Model& model, Side side,
                                          double reach = 1e4, double s_cap = 1e3);

}  // namespace bw
