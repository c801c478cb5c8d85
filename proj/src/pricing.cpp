#include "bw/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "bw/errors.hpp"
#include "bw/quadrature.hpp"

namespace bw {

std::string_view to_string(PricingMethod m) noexcept {
    return m == PricingMethod::tail_integral ? "tail_integral" : "fourier";
}

void QuadratureSettings::validate() const {
    auto unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!unit(abs_tol) || !unit(rel_tol) || !unit(truncation_guard))
        throw DomainError("quadrature settings: tolerances must lie in (0, 1)");
    if (max_subdivisions < 16)
        throw DomainError("quadrature settings: max_subdivisions must be at least 16");
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Leg {
    double value;
    double log_value;
    double error;
};

// One side of the tail-integral representation, written in the coordinate
// y = x (right, call) or y = -x (left, put) so both legs integrate the
// decaying tail of y over [start, T].
Leg tail_leg(const Model& model, double kappa, Side side, const QuadratureSettings& qs) {
    const double start = side == Side::right ? kappa : -kappa;
    auto log_tail = [&](double y) { return model.log_tail(side, y); };
    auto side_mgf = [&](double e) { return model.mgf(side == Side::right ? e : -e); };

    // Out-of-the-money legs are integrated relative to the tail at the strike.
    const double scale_log = start > 0.0 ? log_tail(start) : 0.0;
    if (!std::isfinite(scale_log))
        throw TailUnderflow("price_from_tail: tail at the strike is not representable");

    // Chernoff truncation: int_T^inf tail <= M(eps) e^{-eps T} / eps.
    const double guard = qs.truncation_guard;
    auto cutoff = [&](double e) {
        return (std::log(side_mgf(e)) - std::log(e * guard) - scale_log) / e;
    };
    const double lambda = model.strip().boundary(side);
    double eps = 0.5 * lambda;
    double upper = 0.0;
    if (std::isfinite(lambda)) {
        upper = cutoff(eps);
    } else {
        upper = kInfinity;
        for (int j = -2; j <= 12; ++j) {
            const double e = std::ldexp(1.0, j) / model.stddev();
            const double t = cutoff(e);
            if (t < upper) {
                upper = t;
                eps = e;
            }
        }
    }
    upper = std::max(upper, start + model.stddev());
    const double truncated = side_mgf(eps) * std::exp(-eps * upper - scale_log) / eps;

    auto integrand = [&](double y) { return std::exp(log_tail(y) - scale_log); };

    // Far out of the money the integrand decays over 1/hazard, which can be
    // a tiny fraction of [start, upper]; panels doubling from that width
    // keep the first nodes on the mass.
    double width = model.stddev();
    if (start > 0.0) {
        const double step = 1e-3 * width;
        const double drop = scale_log - log_tail(start + step);
        if (std::isfinite(drop) && drop > 1e-3) width = std::min(width, step / drop);
    }
    std::vector<double> breaks{start};
    for (double w = width; start + w < upper; w *= 2.0) breaks.push_back(start + w);
    breaks.push_back(upper);
    for (const double x : model.kinks()) {
        const double y = side == Side::right ? x : -x;
        if (y > start && y < upper) breaks.push_back(y);
    }
    std::sort(breaks.begin(), breaks.end());

    // Half the budget goes to the quadrature, the rest covers truncation.
    const QuadResult q = integrate_adaptive(integrand, std::span<const double>(breaks), 0.5 * qs.abs_tol,
                                            0.5 * qs.rel_tol, qs.max_subdivisions);
    const double scaled_error = q.error + model.tail_rel_error() * q.value + truncated;
    if (!q.converged || scaled_error > std::max(qs.abs_tol, qs.rel_tol * q.value)) {
        const double s = std::exp(scale_log);
        throw AccuracyNotReached("price_from_tail: quadrature tolerance not reached",
                                 s * q.value, s * scaled_error);
    }
    const double s = std::exp(scale_log);
    return {s * q.value, scale_log + std::log(q.value), s * scaled_error};
}

}  // namespace

PriceQuote price_from_tail(const Model& model, double kappa, const QuadratureSettings& qs) {
    qs.validate();
    if (!std::isfinite(kappa)) throw DomainError("price_from_tail: kappa must be finite");
    if (!model.satisfies_ir())
        throw UnsupportedModel("price_from_tail: model lacks (IR), no tail-integral call");
    if (!model.satisfies_il())
        throw UnsupportedModel("price_from_tail: model lacks (IL), no tail-integral put");

    const Leg call = tail_leg(model, kappa, Side::right, qs);
    const Leg put = tail_leg(model, kappa, Side::left, qs);
    PriceQuote out;
    out.kappa = kappa;
    out.call = call.value;
    out.put = put.value;
    out.log_call = call.log_value;
    out.log_put = put.log_value;
    out.method = PricingMethod::tail_integral;
    out.call_error = call.error;
    out.put_error = put.error;
    out.abs_error_estimate = std::max(call.error, put.error);
    return out;
}

PriceQuote price_from_cf(const Model& model, double kappa, double alpha,
                         const QuadratureSettings& qs) {
    qs.validate();
    if (!std::isfinite(kappa)) throw DomainError("price_from_cf: kappa must be finite");
    const AnalyticityStrip strip = model.strip();
    const bool inside = std::isfinite(alpha) && alpha != 0.0 &&
                        (alpha > 0.0 ? alpha < strip.lambda_minus : -alpha < strip.lambda_plus);
    if (!inside)
        throw DampingOutsideStrip("price_from_cf: damping " + std::to_string(alpha) +
                                  " outside (-lambda_plus, 0) U (0, lambda_minus)");

    using cplx = std::complex<double>;
    const cplx i{0.0, 1.0};
    auto transform = [&](double u) {
        const cplx w = alpha + i * u;
        return model.char_fn({u, -alpha}) / (w * w);
    };
    auto integrand = [&](double u) { return (std::exp(-i * u * kappa) * transform(u)).real(); };
    auto envelope = [&](double u) { return std::abs(model.char_fn({u, -alpha})) / (alpha * alpha + u * u); };

    // Half-period panels when the integrand oscillates, doubling panels
    // otherwise. Stop once the remaining tail is below the guard relative
    // to the integral of |integrand| seen so far.
    const double scale = model.stddev();
    const bool oscillating = kappa != 0.0;
    const double half_period = oscillating ? std::numbers::pi / std::abs(kappa) : 0.0;
    const double min_reach = 8.0 / scale;
    constexpr long kMaxPanels = 2'000'000;

    double lo = 0.0;
    double width = oscillating ? half_period : 1.0 / scale;
    double sum = 0.0;
    double err = 0.0;
    double l1 = 0.0;
    double tail_bound = kInfinity;
    long panels = 0;
    while (true) {
        const double hi = lo + width;
        const QuadResult q =
            integrate_adaptive(integrand, lo, hi, 1e-16 * l1, 1e-14, qs.max_subdivisions);
        sum += q.value;
        err += q.error;
        l1 += q.l1;
        lo = hi;
        ++panels;
        if (!oscillating) width *= 2.0;

        const double env = envelope(lo);
        tail_bound = env * lo;
        if (oscillating) tail_bound = std::min(tail_bound, 2.0 * env / std::abs(kappa));
        if (lo >= min_reach && tail_bound <= qs.truncation_guard * l1) break;
        if (panels >= kMaxPanels)
            throw AccuracyNotReached("price_from_cf: truncation point not reached",
                                     std::exp(-alpha * kappa) * sum / std::numbers::pi,
                                     std::exp(-alpha * kappa) * tail_bound / std::numbers::pi);
    }

    const double damp = std::exp(-alpha * kappa) / std::numbers::pi;
    const double leg = damp * sum;
    const double leg_error = damp * (err + tail_bound);
    if (leg_error > std::max(qs.abs_tol, qs.rel_tol * std::abs(leg)))
        throw AccuracyNotReached("price_from_cf: quadrature tolerance not reached", leg, leg_error);
    const double log_leg = sum > 0.0 ? std::log(sum / std::numbers::pi) - alpha * kappa : -kInfinity;

    // Parity: c - p = mean - kappa.
    const double forward = model.mean() - kappa;
    const double parity_rounding = 4.0 * kEps * (std::abs(kappa) + std::abs(leg));
    PriceQuote out;
    out.kappa = kappa;
    out.method = PricingMethod::fourier;
    if (alpha > 0.0) {
        out.call = leg;
        out.log_call = log_leg;
        out.call_error = leg_error;
        out.put = leg - forward;
        out.log_put = out.put > 0.0 ? std::log(out.put) : -kInfinity;
        out.put_error = leg_error + parity_rounding;
    } else {
        out.put = leg;
        out.log_put = log_leg;
        out.put_error = leg_error;
        out.call = leg + forward;
        out.log_call = out.call > 0.0 ? std::log(out.call) : -kInfinity;
        out.call_error = leg_error + parity_rounding;
    }
    out.abs_error_estimate = std::max(out.call_error, out.put_error);
    return out;
}

double default_damping(const Model& model, double kappa) {
    const Side side = kappa >= 0.0 ? Side::right : Side::left;
    const double lambda = model.strip().boundary(side);
    const double a = std::isfinite(lambda) ? 0.5 * lambda : 1.0 / model.stddev();
    return side == Side::right ? a : -a;
}

double wing_damping(const Model& model, double kappa) {
    const Side side = kappa >= 0.0 ? Side::right : Side::left;
    const double lambda = model.strip().boundary(side);
    const double k = std::abs(kappa);
    double a = 0.0;
    if (std::isfinite(lambda)) {
        const double gap = k > 0.0 ? std::min(0.5 * lambda, 1.0 / k) : 0.5 * lambda;
        a = lambda - gap;
    } else {
        const double s = model.stddev();
        a = std::max(1.0 / s, k / (s * s));
    }
    return side == Side::right ? a : -a;
}

PriceQuote price_preferred(const Model& model, double kappa, const QuadratureSettings& qs) {
    if (model.closed_form_tail()) return price_from_tail(model, kappa, qs);
    return price_from_cf(model, kappa, wing_damping(model, kappa), qs);
}

SmileGrid smile_from_model(const Model& model, std::span<const double> grid,
                           const QuadratureSettings& qs, double tol_iv) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!std::isfinite(grid[j])) throw DomainError("smile: grid contains a non-finite value");
        if (j > 0 && !(grid[j] > grid[j - 1]))
            throw DomainError("smile: grid must be strictly increasing");
    }

    SmileGrid smile;
    smile.points.reserve(grid.size());
    for (const double kappa : grid) {
        SmilePoint pt;
        pt.kappa = kappa;
        try {
            const PriceQuote q = price_preferred(model, kappa, qs);
            pt.method = q.method;
            const bool call = pt.is_call();
            pt.price = call ? q.call : q.put;
            pt.log_price = call ? q.log_call : q.log_put;
            pt.price_error = call ? q.call_error : q.put_error;

            IvolResult iv{};
            if (pt.price > 0.0 && std::isnormal(pt.price))
                iv = call ? implied_vol_call(kappa, pt.price, tol_iv)
                          : implied_vol_put(kappa, pt.price, tol_iv);
            else
                iv = call ? implied_vol_call_log(kappa, pt.log_price)
                          : implied_vol_put_log(kappa, pt.log_price);
            pt.ivol = iv.sigma;
            pt.ivol_method = iv.method;
        } catch (const std::exception& e) {
            pt.status = PointStatus::failed;
            pt.message = e.what();
        }
        smile.points.push_back(std::move(pt));
    }
    return smile;
}

}  // namespace bw
