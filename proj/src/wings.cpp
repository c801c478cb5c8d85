#include "bw/wings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bw/errors.hpp"
#include "bw/normal.hpp"

namespace bw {

namespace {

struct Regression {
    double intercept;
    double slope;
    double r2;
    double rms;
};

Regression least_squares(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Regression r{};
    r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    r.intercept = my - r.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (r.intercept + r.slope * x[i]);
        sse += e * e;
    }
    r.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    r.rms = std::sqrt(sse / n);
    return r;
}

bool on_side(double kappa, Side side) { return side == Side::right ? kappa > 0.0 : kappa < 0.0; }

}  // namespace

LineFit fit_inverse_kappa(std::span<const CurvePoint> pts, std::size_t outer) {
    const std::size_t n = outer == 0 ? pts.size() : std::min(outer, pts.size());
    if (n < 2) throw InsufficientWingData("fit needs at least two points");
    std::vector<double> x, y;
    for (std::size_t i = pts.size() - n; i < pts.size(); ++i) {
        x.push_back(1.0 / std::abs(pts[i].kappa));
        y.push_back(pts[i].value);
    }
    const Regression r = least_squares(x, y);
    return {r.intercept, r.slope, r.rms, n};
}

WingEstimate wing_slope(const SmileGrid& smile, Side side, const WingFitOptions& opts) {
    double central = 0.0;
    if (opts.central_scale) {
        central = *opts.central_scale;
    } else {
        double best = kInfinity;
        for (const auto& p : smile.points)
            if (p.ok() && std::abs(p.kappa) < best) {
                best = std::abs(p.kappa);
                central = p.ivol;
            }
    }

    WingEstimate w;
    w.side = side;
    for (const auto& p : smile.points) {
        if (!p.ok() || !on_side(p.kappa, side) || std::abs(p.kappa) < 2.0 * central) continue;
        w.slope_samples.push_back({p.kappa, p.ivol * p.ivol / std::abs(p.kappa)});
    }
    if (side == Side::left) std::reverse(w.slope_samples.begin(), w.slope_samples.end());
    if (w.slope_samples.size() < 4)
        throw InsufficientWingData("wing_slope: " + std::to_string(w.slope_samples.size()) +
                                   " usable " + std::string(to_string(side)) +
                                   " points, need at least 4");

    const LineFit fit = fit_inverse_kappa(w.slope_samples, std::max<std::size_t>(opts.outer_points, 4));
    // The limit is nonnegative; a slightly negative intercept is fit noise
    // on a vanishing slope.
    w.extrapolated_slope = std::max(fit.intercept, 0.0);
    w.fit_coefficient = fit.slope;
    w.fit_rms_residual = fit.rms;
    w.fit_points = fit.points;
    return w;
}

std::vector<CurvePoint> tail_reference_curve(const Model& model, std::span<const double> kappas,
                                             Side side) {
    std::vector<CurvePoint> out;
    out.reserve(kappas.size());
    for (const double k : kappas) {
        const double lt = model.log_tail(side, std::abs(k));
        if (std::isnan(lt) || lt == -kInfinity)
            throw TailUnderflow("tail_reference_curve: log tail not finite at kappa = " +
                                std::to_string(k));
        if (!(lt < 0.0))
            throw DomainError("tail_reference_curve: tail >= 1 at kappa = " + std::to_string(k));
        out.push_back({k, -std::abs(k) / (2.0 * lt)});
    }
    return out;
}

RvIndex rv_index(const Model& model, Side side, double kappa_lo, double kappa_hi, int points) {
    if (!(kappa_lo > 1.0 && kappa_hi > kappa_lo) || !std::isfinite(kappa_hi))
        throw DomainError("rv_index: requires 1 < kappa_lo < kappa_hi");
    if (points < 3) throw DomainError("rv_index: at least 3 points");

    auto g = [&](double k) {
        const double lt = model.log_tail(side, k);
        if (std::isnan(lt) || lt == -kInfinity)
            throw TailUnderflow("rv_index: log tail not finite at kappa = " + std::to_string(k));
        if (!(lt < 0.0)) throw DomainError("rv_index: tail >= 1 at kappa = " + std::to_string(k));
        return -lt;
    };

    std::vector<double> x, y;
    const double step = std::log(kappa_hi / kappa_lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double lk = std::log(kappa_lo) + i * step;
        x.push_back(lk);
        y.push_back(std::log(g(std::exp(lk))));
    }
    const Regression r = least_squares(x, y);
    RvIndex out;
    out.theta = r.slope;
    out.r2 = r.r2;
    out.ratio = g(2.0 * kappa_hi) / g(kappa_hi);
    out.ratio_theta = std::log2(out.ratio);
    return out;
}

std::vector<AsymptoticResidual> asymptotic_residuals(const SmileGrid& smile, const Model& model,
                                                     Side side) {
    std::vector<AsymptoticResidual> out;
    for (const auto& p : smile.points) {
        if (!p.ok() || !on_side(p.kappa, side)) continue;
        double log_c = p.log_price;
        if (!std::isfinite(log_c)) {
            const PriceQuote q = price_preferred(model, p.kappa);
            log_c = side == Side::right ? q.log_call : q.log_put;
        }
        const double k = std::abs(p.kappa);
        const double two_i2 = 2.0 * p.ivol * p.ivol;
        AsymptoticResidual r;
        r.kappa = p.kappa;
        r.target = k * k / two_i2;
        r.eps1 = log_c + r.target;
        r.eps2 = r.eps1 + kLogSqrt2Pi;
        const double root = std::sqrt(k * k + two_i2);
        r.d_ratio = root / (k + root);
        r.eps2_reference = std::log(p.ivol) + 0.5;
        out.push_back(r);
    }
    if (side == Side::left) std::reverse(out.begin(), out.end());
    return out;
}

ConditionIProbe condition_i_probe(const Model& model, Side side, int n, double s_min,
                                  const ConditionIOptions& opts) {
    const double lambda = model.strip().boundary(side);
    if (!std::isfinite(lambda))
        throw NotApplicableInfiniteStrip("condition_i_probe: infinite strip on the " +
                                         std::string(to_string(side)) + " side");
    if (n < 0) throw DomainError("condition_i_probe: n must be >= 0");
    const double s_max = opts.s_max_fraction * lambda;
    if (!(s_min > 0.0 && s_min < s_max))
        throw DomainError("condition_i_probe: s_min must lie in (0, s_max)");
    if (opts.points < 3) throw DomainError("condition_i_probe: at least 3 grid points");

    const double dir = side == Side::right ? 1.0 : -1.0;
    const bool exact = !opts.force_finite_difference && model.mgf_derivative(0.0, n).has_value();

    auto derivative = [&](double s) {
        const double at = dir * (lambda - s);
        if (exact) return *model.mgf_derivative(at, n);
        // n-th central difference, step s/10; stencil reaches n*h/2 < s
        const double h = s / 10.0;
        double sum = 0.0;
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) binom = binom * (n - k + 1) / k;
            const double x = at + (0.5 * n - k) * h;
            sum += ((k % 2) ? -binom : binom) * model.mgf(x);
        }
        return sum / std::pow(h, n);
    };

    ConditionIProbe out;
    out.side = side;
    out.n = n;
    out.exact_derivative = exact;
    std::vector<double> x, y;
    const double step = std::log(s_max / s_min) / (opts.points - 1);
    for (int i = 0; i < opts.points; ++i) {
        const double s = s_min * std::exp(i * step);
        const double v = std::abs(derivative(s));
        if (!std::isfinite(v) || v == 0.0) {
            out.grid_shrunk = true;
            continue;
        }
        out.s_grid.push_back(s);
        x.push_back(std::log(s));
        y.push_back(std::log(v));
    }
    if (x.size() < 3)
        throw AccuracyNotReached("condition_i_probe: too few finite derivative values",
                                 static_cast<double>(x.size()), 0.0);
    const Regression r = least_squares(x, y);
    out.rho_estimate = -r.slope;
    out.regression_r2 = r.r2;
    return out;
}

std::vector<double> wing_grid(double scale, double lo, double hi, int count) {
    if (!(scale > 0.0 && lo > 0.0 && hi > lo) || count < 2)
        throw DomainError("wing_grid: need scale > 0, 0 < lo < hi and count >= 2");
    std::vector<double> right;
    for (int i = 0; i < count; ++i)
        right.push_back(scale * lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    std::vector<double> grid;
    for (auto it = right.rbegin(); it != right.rend(); ++it) grid.push_back(-*it);
    grid.insert(grid.end(), right.begin(), right.end());
    return grid;
}

bool VerdictReport::all_pass() const noexcept {
    if (!errors.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

Check relative_check(std::string name, Side side, double measured, double reference, double tol) {
    Check c{std::move(name), side, measured, reference, tol, "relative", false, {}};
    c.pass = std::abs(measured - reference) <= tol * std::abs(reference);
    return c;
}

Check absolute_check(std::string name, Side side, double measured, double reference, double tol) {
    Check c{std::move(name), side, measured, reference, tol, "absolute", false, {}};
    c.pass = std::abs(measured - reference) <= tol;
    return c;
}

}  // namespace

VerdictReport theorem_verdicts(const Model& model, const VerdictSettings& st) {
    VerdictReport rep;
    rep.model = std::string(model.name());
    rep.params = model.params();

    const double scale = model.stddev();
    const std::vector<double> grid = wing_grid(scale, st.grid_lo, st.grid_hi, st.grid_points);
    const SmileGrid smile = smile_from_model(model, grid, st.quadrature);
    for (const auto& p : smile.points)
        if (!p.ok())
            rep.errors.push_back("smile point kappa=" + std::to_string(p.kappa) + ": " + p.message);

    for (const Side side : {Side::right, Side::left}) {
        const std::string tag = std::string(to_string(side));
        const double lambda = model.strip().boundary(side);
        const bool finite = std::isfinite(lambda);

        WingEstimate w;
        try {
            WingFitOptions fo;
            fo.outer_points = st.outer_points;
            fo.central_scale = scale;
            w = wing_slope(smile, side, fo);
        } catch (const std::exception& e) {
            rep.errors.push_back(tag + " wing_slope: " + e.what());
            continue;
        }
        w.strip_infinite = !finite;
        w.strip_reference = finite ? 1.0 / (2.0 * lambda) : 0.0;

        if (finite)
            rep.checks.push_back(relative_check("slope_vs_strip", side, w.extrapolated_slope,
                                                w.strip_reference, st.slope_tol));
        else
            rep.checks.push_back(absolute_check("slope_vs_strip", side, w.extrapolated_slope, 0.0,
                                                st.slope_tol * scale));

        try {
            std::vector<double> ks;
            for (const auto& p : w.slope_samples) ks.push_back(p.kappa);
            w.tail_reference = tail_reference_curve(model, ks, side);
            w.tail_reference_limit = fit_inverse_kappa(w.tail_reference, w.fit_points).intercept;
            if (finite || w.tail_reference_limit > st.tail_tol * scale)
                rep.checks.push_back(relative_check("slope_vs_tail_reference", side,
                                                    w.extrapolated_slope, w.tail_reference_limit,
                                                    st.tail_tol));
            else
                rep.checks.push_back(absolute_check("slope_vs_tail_reference", side,
                                                    w.extrapolated_slope, w.tail_reference_limit,
                                                    st.tail_tol * scale));
        } catch (const std::exception& e) {
            rep.errors.push_back(tag + " tail_reference_curve: " + e.what());
        }

        try {
            const RvIndex rv = rv_index(model, side, st.rv_lo * scale, st.rv_hi * scale);
            w.rv_index_theta = rv.theta;
            if (finite) {
                rep.checks.push_back(
                    absolute_check("rv_index_theta", side, rv.theta, 1.0, st.theta_tol));
            } else {
                // Lighter than exponential: only theta >= 1 is implied.
                Check c{"rv_index_theta", side, rv.theta, 1.0, st.theta_tol, "at_least", false, {}};
                c.pass = rv.theta >= 1.0 - st.theta_tol;
                rep.checks.push_back(c);
            }
        } catch (const std::exception& e) {
            rep.errors.push_back(tag + " rv_index: " + e.what());
        }

        if (finite) {
            try {
                std::optional<ConditionIProbe> found;
                ConditionIProbe last;
                for (int n = 0; n <= 3 && !found; ++n) {
                    last = condition_i_probe(model, side, n, 1e-6 * lambda);
                    if (last.rho_estimate > st.rho_threshold && last.regression_r2 > st.r2_threshold)
                        found = last;
                }
                const ConditionIProbe& pr = found ? *found : last;
                rep.condition_i.push_back(pr);
                Check c{"condition_i_rho", side, pr.rho_estimate, st.rho_threshold, 0.0,
                        "at_least", found.has_value(), {}};
                c.note = "n=" + std::to_string(pr.n) + " r2=" + std::to_string(pr.regression_r2);
                rep.checks.push_back(c);
            } catch (const std::exception& e) {
                rep.errors.push_back(tag + " condition_i_probe: " + e.what());
            }
        }

        try {
            auto res = asymptotic_residuals(smile, model, side);
            if (!res.empty()) {
                const AsymptoticResidual& outer = res.back();
                Check d{"d_ratio_outer", side, outer.d_ratio, 0.5, st.d_ratio_band, "band", false, {}};
                d.pass = std::abs(outer.d_ratio - 0.5) <= st.d_ratio_band;
                rep.checks.push_back(d);

                const std::size_t m = std::min<std::size_t>(st.outer_points, res.size());
                bool decreasing = true;
                for (std::size_t i = res.size() - m + 1; i < res.size(); ++i)
                    decreasing = decreasing && std::abs(res[i].eps1) / res[i].target <=
                                                   std::abs(res[i - 1].eps1) / res[i - 1].target;
                const double ratio = std::abs(outer.eps1) / outer.target;
                Check e{"eps1_over_target_outer", side, ratio, st.eps1_limit, 0.0, "at_most", false, {}};
                e.pass = ratio < st.eps1_limit && decreasing;
                e.note = decreasing ? "decreasing over the outer points"
                                    : "not decreasing over the outer points";
                rep.checks.push_back(e);
            }
            rep.residuals.push_back(std::move(res));
        } catch (const std::exception& e) {
            rep.residuals.emplace_back();
            rep.errors.push_back(tag + " asymptotic_residuals: " + e.what());
        }
        rep.wings.push_back(std::move(w));
    }
    return rep;
}

nlohmann::json to_json(const VerdictReport& r) {
    using nlohmann::json;
    json params = json::object();
    for (const auto& [k, v] : r.params) params[k] = v;

    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"side", std::string(to_string(c.side))},
                          {"measured", c.measured},
                          {"reference", c.reference},
                          {"tolerance", c.tolerance},
                          {"comparison", c.comparison},
                          {"pass", c.pass},
                          {"note", c.note}});

    auto curve = [](const std::vector<CurvePoint>& pts) {
        json a = json::array();
        for (const auto& p : pts) a.push_back({p.kappa, p.value});
        return a;
    };
    json wings = json::array();
    for (std::size_t i = 0; i < r.wings.size(); ++i) {
        const WingEstimate& w = r.wings[i];
        json res = json::array();
        if (i < r.residuals.size())
            for (const auto& x : r.residuals[i])
                res.push_back({{"kappa", x.kappa},
                               {"eps1", x.eps1},
                               {"eps2", x.eps2},
                               {"target", x.target},
                               {"d_ratio", x.d_ratio},
                               {"eps2_reference", x.eps2_reference}});
        wings.push_back({{"side", std::string(to_string(w.side))},
                         {"slope_samples", curve(w.slope_samples)},
                         {"extrapolated_slope", w.extrapolated_slope},
                         {"fit_coefficient", w.fit_coefficient},
                         {"fit_rms_residual", w.fit_rms_residual},
                         {"fit_points", w.fit_points},
                         {"tail_reference", curve(w.tail_reference)},
                         {"tail_reference_limit", w.tail_reference_limit},
                         {"strip_reference", w.strip_reference},
                         {"strip_infinite", w.strip_infinite},
                         {"rv_index_theta", w.rv_index_theta},
                         {"residuals", res}});
    }
    json probes = json::array();
    for (const auto& p : r.condition_i)
        probes.push_back({{"side", std::string(to_string(p.side))},
                          {"n", p.n},
                          {"rho_estimate", p.rho_estimate},
                          {"regression_r2", p.regression_r2},
                          {"exact_derivative", p.exact_derivative},
                          {"grid_shrunk", p.grid_shrunk},
                          {"s_min", p.s_grid.empty() ? 0.0 : p.s_grid.front()},
                          {"s_max", p.s_grid.empty() ? 0.0 : p.s_grid.back()}});

    return {{"model", r.model},    {"params", params}, {"all_pass", r.all_pass()},
            {"checks", checks},    {"wings", wings},   {"condition_i", probes},
            {"errors", r.errors}};
}

}  // namespace bw
