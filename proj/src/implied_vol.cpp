#include "bw/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bw/bachelier.hpp"
#include "bw/errors.hpp"
#include "bw/normal.hpp"

namespace bw {

std::string_view to_string(IvolMethod m) noexcept {
    switch (m) {
        case IvolMethod::closed_form_atm: return "closed_form_atm";
        case IvolMethod::newton: return "newton";
        case IvolMethod::bisection_fallback: return "bisection_fallback";
        case IvolMethod::deep_tail_log: return "deep_tail_log";
    }
    return "unknown";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct LogSolve {
    double sigma;
    int iterations;
    double log_residual;
    bool bisected;
};

// Objective f(s) = ln c_b(k, s) - target, increasing in s, with
// f'(s) = phi(d) / c_b = 1 / (s (1 - d R(d))).
struct Objective {
    double kappa;
    double target;

    double value(double s) const { return log_call_price(kappa, s) - target; }
    double newton_step(double s, double f) const {
        return f * s * mills_complement(kappa / s);
    }
};

// kappa > 0, target = ln c.
LogSolve solve_log_otm(double kappa, double target, const IvolOptions& opts) {
    const Objective obj{kappa, target};

    // Seed from the wing asymptotic I^2 ~ -kappa^2 / (2 ln c).
    const double seed = kappa / std::sqrt(2.0 * std::max(1.0, std::log(kappa) - target));

    double lo = seed;
    double hi = seed;
    double f_seed = obj.value(seed);
    if (f_seed < 0.0) {
        hi = 2.0 * seed;
        for (int i = 0; obj.value(hi) < 0.0; ++i) {
            if (i > 2100 || !std::isfinite(hi))
                throw ConvergenceFailure("implied_vol: no upper bracket", lo, hi);
            lo = hi;
            hi *= 2.0;
        }
    } else {
        lo = 0.5 * seed;
        for (int i = 0; obj.value(lo) >= 0.0; ++i) {
            if (i > 2100 || lo == 0.0)
                throw ConvergenceFailure("implied_vol: no lower bracket", lo, hi);
            hi = lo;
            lo *= 0.5;
        }
    }

    const double stop = 2.0 * kEps * std::max(1.0, std::abs(target));
    double s = std::clamp(seed, lo, hi);
    double f = (s == seed) ? f_seed : obj.value(s);
    bool bisected = false;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        if (std::abs(f) <= stop) return {s, it, std::abs(f), bisected};
        if (f < 0.0)
            lo = s;
        else
            hi = s;

        double next = s - obj.newton_step(s, f);
        if (!(next > lo && next < hi)) {
            next = (hi > 4.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            bisected = true;
        }
        const bool stalled = std::abs(next - s) <= 4.0 * kEps * next;
        s = next;
        f = obj.value(s);
        if (stalled || hi - lo <= 4.0 * kEps * hi) return {s, it, std::abs(f), bisected};
    }
    throw ConvergenceFailure("implied_vol: iteration cap reached", lo, hi);
}

void check_finite(double kappa, double price) {
    if (!std::isfinite(kappa) || !std::isfinite(price))
        throw DomainError("implied_vol: non-finite input");
}

}  // namespace

IvolResult implied_vol_call(double kappa, double price, double tol, const IvolOptions& opts) {
    check_finite(kappa, price);
    if (!(tol > 0.0)) throw DomainError("implied_vol: tolerance must be positive");
    const double intrinsic = std::max(-kappa, 0.0);
    if (!(price > intrinsic))
        throw NoSolutionBelowIntrinsic("no solution: price <= intrinsic (" +
                                       std::to_string(price) + " <= " +
                                       std::to_string(intrinsic) + ")");

    if (kappa == 0.0) {
        const double sigma = price * kSqrt2Pi;
        return {sigma, 0, std::abs(call_price(0.0, sigma) - price), IvolMethod::closed_form_atm};
    }

    // Out-of-the-money side: call for kappa > 0, put at -kappa otherwise.
    const double otm_kappa = std::abs(kappa);
    const double otm_price = kappa > 0.0 ? price : price + kappa;
    const LogSolve r = solve_log_otm(otm_kappa, std::log(otm_price), opts);

    const double residual = std::abs(call_price(kappa, r.sigma) - price);
    if (residual <= tol)
        return {r.sigma, r.iterations, residual,
                r.bisected ? IvolMethod::bisection_fallback : IvolMethod::newton};
    if (r.log_residual <= opts.log_tol)
        return {r.sigma, r.iterations, r.log_residual, IvolMethod::deep_tail_log};
    throw ConvergenceFailure("implied_vol: residual above tolerance", r.sigma, r.sigma);
}

IvolResult implied_vol_put(double kappa, double price, double tol, const IvolOptions& opts) {
    return implied_vol_call(-kappa, price, tol, opts);
}

IvolResult implied_vol_call_log(double kappa, double log_price, const IvolOptions& opts) {
    check_finite(kappa, log_price);
    if (!(kappa > 0.0))
        throw DomainError("implied_vol_call_log: requires out-of-the-money kappa > 0");
    const LogSolve r = solve_log_otm(kappa, log_price, opts);
    const double accept = std::max(opts.log_tol, 8.0 * kEps * std::abs(log_price));
    if (r.log_residual > accept)
        throw ConvergenceFailure("implied_vol: log residual above tolerance", r.sigma, r.sigma);
    return {r.sigma, r.iterations, r.log_residual, IvolMethod::deep_tail_log};
}

IvolResult implied_vol_put_log(double kappa, double log_price, const IvolOptions& opts) {
    return implied_vol_call_log(-kappa, log_price, opts);
}

}  // namespace bw
