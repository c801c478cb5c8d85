#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "bw/errors.hpp"
#include "bw/models.hpp"
#include "bw/quadrature.hpp"
#include "oracle.hpp"

using namespace bw;
using cplx = std::complex<double>;

namespace {

std::vector<ModelPtr> zoo() {
    return {gaussian_model(1.0), gaussian_model(0.3), asym_laplace_model(1.0, 1.0),
            asym_laplace_model(2.0, 0.7), nig_model(2.0, 0.5, 1.0), nig_model(1.0, -0.4, 0.5)};
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    return integrate_adaptive(f, a, b, 1e-15, 1e-13, 2000).value;
}

// Over [a, b] with the model's kinks and mean on panel edges.
double integrate(const Model& m, const std::function<double(double)>& f, double a, double b,
                 int max_intervals = 2000) {
    std::vector<double> br{a, m.mean(), b};
    for (const double x : m.kinks()) br.push_back(x);
    std::sort(br.begin(), br.end());
    return integrate_adaptive(f, std::span<const double>(br), 1e-15, 1e-13, max_intervals).value;
}

}  // namespace

TEST_CASE("construction errors") {
    CHECK_THROWS_AS((void)gaussian_model(0.0), DomainError);
    CHECK_THROWS_AS((void)gaussian_model(NAN), DomainError);
    CHECK_THROWS_AS((void)asym_laplace_model(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)asym_laplace_model(1.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)nig_model(1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)nig_model(1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)nig_model(1.0, 0.0, 1.0, INFINITY), DomainError);
}

TEST_CASE("density integrates to one, mean and variance match") {
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s = m->stddev();
        const double mu = m->mean();
        auto mass = [&](auto g) { return integrate(*m, g, mu - 60 * s, mu + 60 * s); };
        CHECK(mass([&](double x) { return m->pdf(x); }) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(mass([&](double x) { return x * m->pdf(x); }) ==
              doctest::Approx(mu).scale(s).epsilon(1e-9));
        CHECK(mass([&](double x) { return (x - mu) * (x - mu) * m->pdf(x); }) ==
              doctest::Approx(s * s).epsilon(1e-9));
    }
}

TEST_CASE("cdf differentiates to the density at random points") {
    std::mt19937_64 rng(11);
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s = m->stddev();
        std::uniform_real_distribution<double> uz(-6.0, 6.0);
        const double h = 1e-3 * s;
        int tested = 0;
        while (tested < 100) {
            const double x = m->mean() + uz(rng) * s;
            const auto ks = m->kinks();
            if (std::any_of(ks.begin(), ks.end(), [&](double k) { return std::abs(x - k) < 3 * h; })) continue;
            ++tested;
            CAPTURE(x);
            auto F = [&](double t) { return m->cdf(t); };
            const double d = (8 * (F(x + h) - F(x - h)) - (F(x + 2 * h) - F(x - 2 * h))) / (12 * h);
            CHECK(std::abs(d - m->pdf(x)) < 1e-8);
        }
    }
}

TEST_CASE("cdf is the integral of the density and complements sf") {
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s = m->stddev();
        for (double z : {-6.0, -2.0, -0.3, 0.07, 0.4, 1.5, 5.0}) {
            const double x = m->mean() + z * s;
            CAPTURE(x);
            const double h = 1e-4 * s;
            const double deriv = (m->cdf(x + h) - m->cdf(x - h)) / (2 * h);
            CHECK(deriv == doctest::Approx(m->pdf(x)).epsilon(1e-6));
            CHECK(m->cdf(x) + m->sf(x) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::exp(m->log_sf(x)) == doctest::Approx(m->sf(x)).epsilon(1e-12));
            CHECK(std::exp(m->log_cdf(x)) == doctest::Approx(m->cdf(x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("tails against independent quadrature") {
    using boost::math::quadrature::exp_sinh;
    exp_sinh<double> es;
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s = m->stddev();
        for (double z : {0.5, 3.0, 10.0, 25.0}) {
            const double x = m->mean() + z * s;
            CAPTURE(x);
            // the Laplace kink lies within one stddev of the mean
            if (m->name() == "asym_laplace" && z < 3.0) continue;
            auto tail_from = [&](double at, double dir) {
                const double base = m->log_pdf(at);
                return base + std::log(es.integrate(
                                  [&](double u) { return std::exp(m->log_pdf(at + dir * u) - base); }));
            };
            CHECK(m->log_sf(x) == doctest::Approx(tail_from(x, 1.0)).epsilon(1e-10));
            const double y = m->mean() - z * s;
            CHECK(m->log_cdf(y) == doctest::Approx(tail_from(y, -1.0)).epsilon(1e-10));
        }
    }
}

TEST_CASE("NIG density matches the multiprecision Bessel form") {
    const double a = 2.0, b = 0.5, d = 1.0;
    const double mu = -d * b / std::sqrt(a * a - b * b);
    const auto m = nig_model(a, b, d);
    for (double x : {-30.0, -5.0, -1.0, 0.0, 0.3, 2.0, 10.0, 60.0}) {
        CAPTURE(x);
        CHECK(m->pdf(x) == doctest::Approx(oracle::nig_pdf(a, b, d, mu, x)).epsilon(1e-12));
    }
    // beyond the double range of K_1, compare logs
    const double x = 600.0;
    const double lp = m->log_pdf(x);
    CHECK(std::isfinite(lp));
    CHECK((lp - m->log_pdf(x - 1.0)) == doctest::Approx(-(a - b) - 1.5 / x).epsilon(2e-3));
}

TEST_CASE("characteristic function") {
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        CHECK(std::abs(m->char_fn(0.0) - 1.0) < 1e-15);
        CHECK(m->mgf(0.0) == doctest::Approx(1.0).epsilon(1e-15));
        for (double u : {0.3, 1.0, 4.0}) {
            const cplx p = m->char_fn(u);
            const cplx q = m->char_fn(-u);
            CHECK(std::abs(p - std::conj(q)) < 1e-15);
            CHECK(std::abs(p) <= 1.0 + 1e-15);
        }
    }
}

TEST_CASE("characteristic function agrees with the density") {
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s = m->stddev();
        const double mu = m->mean();
        const double lo = mu - 60 * s, hi = mu + 150 * s;
        for (double u = -20.0; u <= 20.0; u += 2.5) {
            CAPTURE(u);
            const cplx e{0.0, u};
            auto re = [&](double x) { return (std::exp(e * x) * m->pdf(x)).real(); };
            auto imf = [&](double x) { return (std::exp(e * x) * m->pdf(x)).imag(); };
            const cplx ref{integrate(*m, re, lo, hi, 20000), integrate(*m, imf, lo, hi, 20000)};
            CHECK(std::abs(m->char_fn(u) - ref) < 1e-8);
        }
        // inside the strip, off the real axis
        const double lam = m->strip().boundary(Side::right);
        const double im = std::isfinite(lam) ? -0.25 * lam : -0.25 / s;
        for (double u : {0.0, 0.7 / s, 2.5 / s}) {
            const cplx xi{u, im};
            auto re = [&](double x) { return (std::exp(cplx{0, 1} * xi * x) * m->pdf(x)).real(); };
            auto imf = [&](double x) { return (std::exp(cplx{0, 1} * xi * x) * m->pdf(x)).imag(); };
            const cplx ref{integrate(*m, re, lo, hi), integrate(*m, imf, lo, hi)};
            CHECK(std::abs(m->char_fn(xi) - ref) < 1e-8);
        }
    }
}

TEST_CASE("char_fn refuses arguments outside the strip") {
    const auto lap = asym_laplace_model(1.0, 2.0);
    CHECK_THROWS_AS((void)lap->char_fn({0.0, -1.0}), DomainError);
    CHECK_THROWS_AS((void)lap->char_fn({0.0, 2.0}), DomainError);
    CHECK_NOTHROW((void)lap->char_fn({0.0, -0.999}));
    const auto nig = nig_model(2.0, 0.5, 1.0);
    CHECK_THROWS_AS((void)nig->mgf(1.5), DomainError);
    CHECK_NOTHROW((void)nig->mgf(1.49));
    CHECK_NOTHROW((void)gaussian_model(1.0)->mgf(30.0));
}

TEST_CASE("strip probe recovers the boundaries from the density") {
    const auto lap = asym_laplace_model(1.3, 0.6);
    CHECK(probe_strip_boundary(*lap, Side::right) == doctest::Approx(1.3).epsilon(1e-3));
    CHECK(probe_strip_boundary(*lap, Side::left) == doctest::Approx(0.6).epsilon(1e-3));
    const auto nig = nig_model(2.0, 0.5, 1.0);
    CHECK(probe_strip_boundary(*nig, Side::right) == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(probe_strip_boundary(*nig, Side::left) == doctest::Approx(2.5).epsilon(1e-3));
    CHECK(std::isinf(probe_strip_boundary(*gaussian_model(1.0), Side::right)));
    for (const auto& m : zoo()) {
        CHECK(m->satisfies_ir());
        CHECK(m->satisfies_il());
    }
}

TEST_CASE("Laplace closed forms") {
    const auto m = asym_laplace_model(1.0, 1.0);
    for (double k : {0.0, 1.0, 5.0, 40.0, 700.0}) {
        CHECK(m->sf(k) == doctest::Approx(0.5 * std::exp(-k)).epsilon(1e-14));
        CHECK(m->log_sf(k) == doctest::Approx(std::log(0.5) - k).epsilon(1e-15));
    }
    CHECK(m->log_sf(5000.0) == doctest::Approx(std::log(0.5) - 5000.0).epsilon(1e-15));
    CHECK(m->stddev() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m->mgf(0.5) == doctest::Approx(1.0 / (1.0 - 0.25)).epsilon(1e-15));
}

TEST_CASE("tail decay law in the far wing") {
    // Laplace: ln(1-F) + lambda x is constant; NIG: f ~ C x^{-3/2} e^{-(alpha-beta)x}
    const auto lap = asym_laplace_model(2.0, 0.7);
    CHECK(lap->log_sf(50.0) - lap->log_sf(40.0) == doctest::Approx(-20.0).epsilon(1e-12));
    CHECK(lap->log_cdf(-50.0) - lap->log_cdf(-40.0) == doctest::Approx(-7.0).epsilon(1e-12));
    const auto nig = nig_model(2.0, 0.5, 1.0);
    for (double x : {100.0, 400.0}) {
        const double ratio = nig->sf(x) / (nig->pdf(x) / 1.5);
        CHECK(ratio == doctest::Approx(1.0).epsilon(0.03));
    }
}

TEST_CASE("exact mgf derivatives match finite differences") {
    for (const auto& m : zoo()) {
        CAPTURE(m->name());
        const double s0 = 0.1 / m->stddev();
        for (int n = 0; n <= 3; ++n) {
            const auto d = m->mgf_derivative(s0, n);
            const auto dn1 = m->mgf_derivative(s0, n + 1);
            if (!d || !dn1) continue;
            const double h = 1e-5 / m->stddev();
            const double fd = (*m->mgf_derivative(s0 + h, n) - *m->mgf_derivative(s0 - h, n)) / (2 * h);
            CHECK(fd == doctest::Approx(*dn1).epsilon(1e-6));
        }
        CHECK(*m->mgf_derivative(s0, 0) == doctest::Approx(m->mgf(s0)).epsilon(1e-14));
    }
}
