#include "bw/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bw/errors.hpp"
#include "bw/normal.hpp"
#include "bw/quadrature.hpp"

namespace bw {

std::string_view to_string(Side s) noexcept { return s == Side::right ? "right" : "left"; }

double Model::mgf(double s) const { return char_fn({0.0, -s}).real(); }

std::optional<double> Model::mgf_derivative(double, int) const { return std::nullopt; }

namespace {

using cplx = std::complex<double>;

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

void check_strip(const AnalyticityStrip& strip, cplx xi, std::string_view model) {
    if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag()) || !strip.contains_imag(xi.imag()))
        throw DomainError(std::string(model) + ": characteristic function evaluated outside its strip");
}

// ---------------------------------------------------------------------------

class GaussianModel final : public Model {
  public:
    explicit GaussianModel(double sigma) : sigma_(sigma) {}

    std::string_view name() const noexcept override { return "gaussian"; }
    ParamList params() const override { return {{"sigma", sigma_}}; }

    double pdf(double x) const override { return norm_pdf(x / sigma_) / sigma_; }
    double log_pdf(double x) const override { return log_norm_pdf(x / sigma_) - std::log(sigma_); }
    double cdf(double x) const override { return norm_cdf(x / sigma_); }
    double sf(double x) const override { return norm_cdf(-x / sigma_); }
    double log_sf(double x) const override { return log_norm_cdf(-x / sigma_); }
    double log_cdf(double x) const override { return log_norm_cdf(x / sigma_); }

    cplx char_fn(cplx xi) const override {
        check_strip(strip(), xi, name());
        return std::exp(-0.5 * sigma_ * sigma_ * xi * xi);
    }
    std::optional<double> mgf_derivative(double s, int n) const override {
        // M(s) = exp(v s^2 / 2); M^(n) = M * He-like polynomial, recursively
        // p_{n+1}(s) = v s p_n(s) + p_n'(s).
        if (n < 0 || n > 8) return std::nullopt;
        const double v = sigma_ * sigma_;
        std::array<double, 10> c{};  // coefficients of p_n in s
        c[0] = 1.0;
        for (int k = 0; k < n; ++k) {
            std::array<double, 10> next{};
            for (int j = 0; j <= k; ++j) {
                next[j + 1] += v * c[j];
                if (j > 0) next[j - 1] += j * c[j];
            }
            c = next;
        }
        double p = 0.0;
        for (int j = n; j >= 0; --j) p = p * s + c[j];
        return std::exp(0.5 * v * s * s) * p;
    }

    AnalyticityStrip strip() const noexcept override { return {}; }
    double mean() const noexcept override { return 0.0; }
    double stddev() const noexcept override { return sigma_; }
    bool closed_form_tail() const noexcept override { return true; }

  private:
    double sigma_;
};

// ---------------------------------------------------------------------------

class AsymLaplaceModel final : public Model {
  public:
    AsymLaplaceModel(double lr, double ll)
        : lr_(lr), ll_(ll), c_(lr * ll / (lr + ll)),
          shift_(c_ * (1.0 / (lr * lr) - 1.0 / (ll * ll))) {}

    std::string_view name() const noexcept override { return "asym_laplace"; }
    ParamList params() const override { return {{"lambda_r", lr_}, {"lambda_l", ll_}}; }

    double pdf(double x) const override { return std::exp(log_pdf(x)); }
    double log_pdf(double x) const override {
        const double y = x + shift_;
        return std::log(c_) + (y >= 0.0 ? -lr_ * y : ll_ * y);
    }
    double sf(double x) const override {
        const double y = x + shift_;
        if (y >= 0.0) return c_ / lr_ * std::exp(-lr_ * y);
        return -std::expm1(std::log(c_ / ll_) + ll_ * y);
    }
    double cdf(double x) const override {
        const double y = x + shift_;
        if (y < 0.0) return c_ / ll_ * std::exp(ll_ * y);
        return -std::expm1(std::log(c_ / lr_) - lr_ * y);
    }
    double log_sf(double x) const override {
        const double y = x + shift_;
        if (y >= 0.0) return std::log(c_ / lr_) - lr_ * y;
        return std::log1p(-c_ / ll_ * std::exp(ll_ * y));
    }
    double log_cdf(double x) const override {
        const double y = x + shift_;
        if (y < 0.0) return std::log(c_ / ll_) + ll_ * y;
        return std::log1p(-c_ / lr_ * std::exp(-lr_ * y));
    }

    std::vector<double> kinks() const override { return {-shift_}; }

    cplx char_fn(cplx xi) const override {
        check_strip(strip(), xi, name());
        const cplx i{0.0, 1.0};
        return std::exp(-i * xi * shift_) * c_ * (1.0 / (lr_ - i * xi) + 1.0 / (ll_ + i * xi));
    }

    // M(s) = e^{-m s} h(s), h(s) = c (1/(lr - s) + 1/(ll + s)); Leibniz rule.
    std::optional<double> mgf_derivative(double s, int n) const override {
        if (n < 0 || n > 20 || !(s > -ll_ && s < lr_)) return std::nullopt;
        double total = 0.0;
        double binom = 1.0;
        double fact = 1.0;  // k!
        for (int k = 0; k <= n; ++k) {
            if (k > 0) {
                binom = binom * (n - k + 1) / k;
                fact *= k;
            }
            const double hk = c_ * fact *
                              (1.0 / std::pow(lr_ - s, k + 1) +
                               ((k % 2) ? -1.0 : 1.0) / std::pow(ll_ + s, k + 1));
            total += binom * std::pow(-shift_, n - k) * hk;
        }
        return std::exp(-shift_ * s) * total;
    }

    AnalyticityStrip strip() const noexcept override { return {lr_, ll_}; }
    double mean() const noexcept override { return 0.0; }
    double stddev() const noexcept override {
        const double second = 2.0 * c_ * (1.0 / (lr_ * lr_ * lr_) + 1.0 / (ll_ * ll_ * ll_));
        return std::sqrt(second - shift_ * shift_);
    }
    bool closed_form_tail() const noexcept override { return true; }

  private:
    double lr_;
    double ll_;
    double c_;      // density height at the kink
    double shift_;  // mean of the uncentred law
};

// ---------------------------------------------------------------------------

// ln K_1(z) for z > 0. std::cyl_bessel_k underflows near z = 700, so large
// arguments use the Hankel expansion (truncation error < 1e-14 for z >= 300).
double log_bessel_k1(double z) {
    if (z < 300.0) return std::log(std::cyl_bessel_k(1.0, z));
    const double w = 1.0 / (8.0 * z);
    // mu = 4 nu^2 = 4: terms (mu-1)(mu-9)(mu-25)... / (k! (8z)^k)
    const double series = 1.0 + 3.0 * w - 15.0 / 2.0 * w * w + 315.0 / 6.0 * w * w * w -
                          14175.0 / 24.0 * w * w * w * w;
    return 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z + std::log(series);
}

class NigModel final : public Model {
  public:
    NigModel(double alpha, double beta, double delta, double mu)
        : alpha_(alpha), beta_(beta), delta_(delta), mu_(mu),
          gamma_(std::sqrt(alpha * alpha - beta * beta)) {}

    std::string_view name() const noexcept override { return "nig"; }
    ParamList params() const override {
        return {{"alpha", alpha_}, {"beta", beta_}, {"delta", delta_}, {"mu", mu_}};
    }

    double log_pdf(double x) const override {
        const double y = x - mu_;
        const double q = std::hypot(delta_, y);
        return std::log(alpha_ * delta_ / std::numbers::pi) + log_bessel_k1(alpha_ * q) -
               std::log(q) + delta_ * gamma_ + beta_ * y;
    }
    double pdf(double x) const override { return std::exp(log_pdf(x)); }

    // The smaller tail is integrated, the larger one is its complement, so
    // sf + cdf == 1 up to rounding.
    double sf(double x) const override {
        return x >= median_split() ? std::exp(log_upper(x)) : -std::expm1(log_lower(x));
    }
    double cdf(double x) const override {
        return x < median_split() ? std::exp(log_lower(x)) : -std::expm1(log_upper(x));
    }
    double log_sf(double x) const override {
        return x >= median_split() ? log_upper(x) : std::log1p(-std::exp(log_lower(x)));
    }
    double log_cdf(double x) const override {
        return x < median_split() ? log_lower(x) : std::log1p(-std::exp(log_upper(x)));
    }

    cplx char_fn(cplx xi) const override {
        check_strip(strip(), xi, name());
        const cplx i{0.0, 1.0};
        const cplx b = beta_ + i * xi;
        // Re(alpha^2 - b^2) > 0 inside the strip, so the principal root is
        // the analytic continuation from the real axis.
        return std::exp(i * mu_ * xi + delta_ * (gamma_ - std::sqrt(alpha_ * alpha_ - b * b)));
    }

    std::optional<double> mgf_derivative(double s, int n) const override {
        if (!(s > -strip().lambda_plus && s < strip().lambda_minus)) return std::nullopt;
        const double root = std::sqrt(alpha_ * alpha_ - (beta_ + s) * (beta_ + s));
        const double m = std::exp(mu_ * s + delta_ * (gamma_ - root));
        if (n == 0) return m;
        if (n == 1) return m * (mu_ + delta_ * (beta_ + s) / root);
        return std::nullopt;
    }

    AnalyticityStrip strip() const noexcept override { return {alpha_ - beta_, alpha_ + beta_}; }
    double mean() const noexcept override { return mu_ + delta_ * beta_ / gamma_; }
    double stddev() const noexcept override {
        return std::sqrt(delta_ * alpha_ * alpha_ / (gamma_ * gamma_ * gamma_));
    }
    bool closed_form_tail() const noexcept override { return false; }
    double tail_rel_error() const noexcept override { return 1e-12; }

  private:
    double median_split() const noexcept { return mean(); }

    // ln of the integral of exp(log_pdf(x + dir * u) - log_pdf(x)) over u >= 0.
    double log_scaled_tail(double x, double dir, double rate) const {
        const double base = log_pdf(x);
        auto integrand = [&](double u) { return std::exp(log_pdf(x + dir * u) - base); };
        const double body = 12.0 * stddev();
        const double reach = body + 45.0 / rate;
        QuadResult near = integrate_adaptive(integrand, 0.0, body, 0.0, 1e-14, 400);
        QuadResult far = integrate_adaptive(integrand, body, reach, 0.0, 1e-14, 400);
        return base + std::log(near.value + far.value);
    }
    double log_upper(double x) const { return log_scaled_tail(x, 1.0, alpha_ - beta_); }
    double log_lower(double x) const { return log_scaled_tail(x, -1.0, alpha_ + beta_); }

    double alpha_, beta_, delta_, mu_, gamma_;
};

// Log of the integral of exp(h) over [a, b]. The mass may sit in a sliver
// next to either endpoint, so panels grow geometrically away from the larger
// endpoint; a single panel over [a, b] could miss the spike entirely.
template <class H>
double log_window_mass(H&& h, double a, double b) {
    const double ha = h(a);
    const double hb = h(b);
    const double scale = std::max(ha, hb);
    const double anchor = ha >= hb ? a : b;
    const double dir = ha >= hb ? 1.0 : -1.0;
    auto g = [&](double x) { return std::exp(h(x) - scale); };
    const double width = b - a;
    double sum = 0.0;
    double near = 0.0;
    for (int j = 50; j >= 0; --j) {
        const double far = width * std::ldexp(1.0, -j);
        const double lo = anchor + dir * near;
        const double hi = anchor + dir * far;
        sum += integrate_adaptive(g, std::min(lo, hi), std::max(lo, hi), 0.0, 1e-8, 50).value;
        near = far;
    }
    return scale + std::log(sum);
}

}  // namespace

ModelPtr gaussian_model(double sigma) {
    require(std::isfinite(sigma) && sigma > 0.0, "gaussian: sigma must be positive and finite");
    return std::make_shared<GaussianModel>(sigma);
}

ModelPtr asym_laplace_model(double lambda_r, double lambda_l) {
    require(std::isfinite(lambda_r) && lambda_r > 0.0, "asym_laplace: lambda_r must be positive");
    require(std::isfinite(lambda_l) && lambda_l > 0.0, "asym_laplace: lambda_l must be positive");
    return std::make_shared<AsymLaplaceModel>(lambda_r, lambda_l);
}

ModelPtr nig_model(double alpha, double beta, double delta, std::optional<double> mu) {
    require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(delta),
            "nig: parameters must be finite");
    require(alpha > std::abs(beta), "nig: alpha must exceed |beta|");
    require(delta > 0.0, "nig: delta must be positive");
    if (mu) require(std::isfinite(*mu), "nig: mu must be finite");
    const double gamma = std::sqrt(alpha * alpha - beta * beta);
    const double centred_mu = -delta * beta / gamma;
    return std::make_shared<NigModel>(alpha, beta, delta, mu.value_or(centred_mu));
}

double probe_strip_boundary(const Model& model, Side side, double reach, double s_cap) {
    const double scale = model.stddev();
    const double far = reach * scale;
    const double dir = side == Side::right ? 1.0 : -1.0;

    auto diverges = [&](double s) {
        auto h = [&](double x) { return s * x + model.log_pdf(dir * x); };
        return log_window_mass(h, far, 2.0 * far) >= log_window_mass(h, 0.5 * far, far);
    };

    double lo = 0.0;
    double hi = 1.0 / scale;
    while (!diverges(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > s_cap / scale) return kInfinity;
    }
    for (int i = 0; i < 60 && hi - lo > 1e-9 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (diverges(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace bw
