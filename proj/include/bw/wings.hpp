#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bw/models.hpp"
#include "bw/pricing.hpp"

namespace bw {

struct CurvePoint {
    double kappa = 0.0;
    double value = 0.0;
};

/// Wing diagnostics for one side of a smile. The slope fields come from
/// wing_slope; the reference fields are filled by theorem_verdicts.
struct WingEstimate {
    Side side = Side::right;
    /// (kappa, I(kappa)^2 / |kappa|) at the side's usable points, ascending |kappa|.
    std::vector<CurvePoint> slope_samples;
    /// Intercept of slope = a + b / |kappa| fitted over the outermost samples.
    double extrapolated_slope = 0.0;
    double fit_coefficient = 0.0;     // b
    double fit_rms_residual = 0.0;
    std::size_t fit_points = 0;

    std::vector<CurvePoint> tail_reference;
    double tail_reference_limit = 0.0;
    /// 1 / (2 lambda) on this side; 0 when the strip is infinite there.
    double strip_reference = 0.0;
    bool strip_infinite = false;
    double rv_index_theta = 0.0;
};

struct WingFitOptions {
    /// Number of outermost samples entering the a + b/|kappa| fit.
    std::size_t outer_points = 6;
    /// Points with |kappa| < 2 * central_scale are ignored. Defaults to the
    /// implied vol of the ok point closest to the money.
    std::optional<double> central_scale;
};

/// Throws InsufficientWingData with fewer than 4 usable points.
[[nodiscard]] WingEstimate wing_slope(const SmileGrid& smile, Side side,
                                      const WingFitOptions& opts = {});

/// Intercept, slope and rms residual of value = a + b / |kappa| over the last
/// `outer` points of `pts` (all of them when outer == 0).
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms = 0.0;
    std::size_t points = 0;
};
[[nodiscard]] LineFit fit_inverse_kappa(std::span<const CurvePoint> pts, std::size_t outer);

/// -|kappa| / (2 ln tail(|kappa|)) from the model's log tail.
/// DomainError when the tail is >= 1 at a requested point, TailUnderflow
/// when even the log tail is not finite.
[[nodiscard]] std::vector<CurvePoint> tail_reference_curve(const Model& model,
                                                           std::span<const double> kappas,
                                                           Side side);

struct RvIndex {
    double theta = 0.0;
    /// -ln tail(2 k_hi) / -ln tail(k_hi) and its base-2 log, which should
    /// be close to theta.
    double ratio = 0.0;
    double ratio_theta = 0.0;
    double r2 = 0.0;
};

/// Least-squares slope of ln(-ln tail(k)) against ln k over a geometric
/// grid on [kappa_lo, kappa_hi]. Requires 1 < kappa_lo < kappa_hi.
[[nodiscard]] RvIndex rv_index(const Model& model, Side side, double kappa_lo, double kappa_hi,
                               int points = 32);

struct AsymptoticResidual {
    double kappa = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    /// kappa^2 / (2 I^2)
    double target = 0.0;
    double d_ratio = 0.0;
    /// ln I + 1/2, the asymptotic value of eps2.
    double eps2_reference = 0.0;
};

/// Residuals at the ok points of one wing, using |kappa| and the
/// out-of-the-money log price (recomputed from the model where the smile
/// carries none).
[[nodiscard]] std::vector<AsymptoticResidual> asymptotic_residuals(const SmileGrid& smile,
                                                                   const Model& model,
                                                                   Side side = Side::right);

struct ConditionIProbe {
    Side side = Side::right;
    int n = 0;
    double rho_estimate = 0.0;
    double regression_r2 = 0.0;
    std::vector<double> s_grid;
    bool exact_derivative = false;
    /// Set when points were dropped because M^(n) overflowed.
    bool grid_shrunk = false;
};

struct ConditionIOptions {
    /// Upper end of the s-grid as a fraction of the boundary.
    double s_max_fraction = 1e-2;
    int points = 25;
    /// Use finite differences even when the model has exact derivatives.
    bool force_finite_difference = false;
};

/// Fits ln |M^(n)(+-(lambda - s))| = c - rho ln s on a geometric s-grid from
/// s_min up to s_max_fraction * lambda. Throws NotApplicableInfiniteStrip
/// on an infinite side, DomainError for n < 0 or s_min outside
/// (0, s_max_fraction * lambda).
[[nodiscard]] ConditionIProbe condition_i_probe(const Model& model, Side side, int n,
                                                double s_min, const ConditionIOptions& opts = {});

struct VerdictSettings {
    double grid_lo = 5.0;   // in units of the model stddev
    double grid_hi = 40.0;
    int grid_points = 12;
    double slope_tol = 0.05;
    double tail_tol = 0.05;
    double theta_tol = 0.05;
    // In units of the model stddev. Far out, because the log corrections
    // in -ln tail bias the index low (NIG gives 0.93 on [10, 100]).
    double rv_lo = 100.0;
    double rv_hi = 1000.0;
    double rho_threshold = 0.1;
    double r2_threshold = 0.99;
    double d_ratio_band = 0.1;
    double eps1_limit = 0.1;
    std::size_t outer_points = 6;
    QuadratureSettings quadrature{};
};

struct Check {
    std::string name;
    Side side = Side::right;
    double measured = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    /// "relative", "absolute", "at_least", "at_most" or "band".
    std::string comparison;
    bool pass = false;
    std::string note;
};

struct VerdictReport {
    std::string model;
    ParamList params;
    std::vector<Check> checks;
    std::vector<WingEstimate> wings;
    std::vector<std::vector<AsymptoticResidual>> residuals;  // parallel to wings
    std::vector<ConditionIProbe> condition_i;
    /// Components that threw; their checks are absent, not failed-by-default.
    std::vector<std::string> errors;

    [[nodiscard]] bool all_pass() const noexcept;
};

[[nodiscard]] VerdictReport theorem_verdicts(const Model& model, const VerdictSettings& settings = {});

/// Geometric grid of `count` points per side on [lo, hi] * scale, mirrored,
/// ascending.
[[nodiscard]] std::vector<double> wing_grid(double scale, double lo, double hi, int count);

[[nodiscard]] nlohmann::json to_json(const VerdictReport& report);

}  // namespace bw
