#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bw {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    /// Integral of |f|; the scale against which rounding error is judged.
    double l1 = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (G10/K21) quadrature over the panels
/// between consecutive ascending breakpoints. The panel with the largest
/// embedded error estimate is bisected until the total estimate drops below
/// max(abs_tol, rel_tol * |value|) or max_intervals is reached.
template <class F>
QuadResult integrate_adaptive(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol,
                              int max_intervals) {
    // G10/K21 nodes and weights from Boost; the panel rule is applied here
    // because Boost 1.74 leaves the error estimate of a non-adaptive call
    // in [-1, 1] units (L1 is rescaled, the error is not).
    using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    struct Panel {
        double a, b, value, error, l1;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto eval = [&](double lo, double hi) {
        const auto& x = Kronrod::abscissa();
        const auto& wk = Kronrod::weights();
        const auto& wg = Gauss::weights();
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        const double f0 = f(mid);
        double k = f0 * wk[0], g = 0.0, l1 = std::abs(f0) * wk[0];
        for (std::size_t i = 1; i < x.size(); ++i) {
            const double fp = f(mid + half * x[i]);
            const double fm = f(mid - half * x[i]);
            k += (fp + fm) * wk[i];
            l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
            if (i % 2 == 1) g += (fp + fm) * wg[i / 2];
        }
        return Panel{lo, hi, half * k, half * std::abs(k - g), half * l1};
    };

    QuadResult out;
    std::priority_queue<Panel> heap;
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (std::size_t j = 1; j < breaks.size(); ++j) {
        if (!(breaks[j] > breaks[j - 1])) continue;
        const Panel p = eval(breaks[j - 1], breaks[j]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    if (heap.empty()) {
        out.converged = true;
        return out;
    }

    auto target = [&] { return std::max(abs_tol, rel_tol * std::abs(value)); };
    while (error > target() && static_cast<int>(heap.size()) < max_intervals) {
        Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;
        heap.pop();
        Panel left = eval(worst.a, mid);
        Panel right = eval(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed accumulated update drift.
    value = error = l1 = 0.0;
    out.intervals = static_cast<int>(heap.size());
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        l1 += heap.top().l1;
        heap.pop();
    }
    // Rounding floor of the summation itself.
    error += 50.0 * std::numeric_limits<double>::epsilon() * l1;
    out.value = value;
    out.error = error;
    out.l1 = l1;
    out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
    return out;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                              int max_intervals) {
    const double breaks[2] = {a, b};
    return integrate_adaptive(f, std::span<const double>(breaks), abs_tol, rel_tol, max_intervals);
}

}  // namespace bw
