#include "bw/cli.hpp"

#include <charconv>
#include <cstring>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bw/bachelier.hpp"
#include "bw/config.hpp"
#include "bw/errors.hpp"
#include "bw/implied_vol.hpp"
#include "bw/pricing.hpp"
#include "bw/wings.hpp"

namespace bw::cli {

namespace {

double parse_number(std::string_view s, const char* what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError("grid", fmt::format("{} '{}' is not a finite number", what, s));
    return v;
}

std::string fmt15(double v) { return fmt::format("{:.15g}", v); }

double round15(double v) { return std::isfinite(v) ? std::stod(fmt15(v)) : v; }

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

}  // namespace

GridSpec parse_grid(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3 && parts.size() != 4)
        throw ConfigError("grid", "expected min:max:count[:geom]");
    GridSpec g;
    g.min = parse_number(parts[0], "min");
    g.max = parse_number(parts[1], "max");
    int count = 0;
    const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
    if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size())
        throw ConfigError("grid", fmt::format("count '{}' is not an integer", parts[2]));
    if (count < 1) throw ConfigError("grid", "count must be at least 1");
    g.count = count;
    if (parts.size() == 4) {
        if (parts[3] == "geom")
            g.geometric = true;
        else if (parts[3] != "lin")
            throw ConfigError("grid", fmt::format("spacing '{}' is not 'geom' or 'lin'", parts[3]));
    }
    if (g.min > g.max) throw ConfigError("grid", "min exceeds max");
    if (g.count > 1 && g.min == g.max) throw ConfigError("grid", "min equals max with count > 1");
    if (g.geometric && !(g.min * g.max > 0.0))
        throw ConfigError("grid", "geometric spacing needs min and max of the same sign, nonzero");
    return g;
}

std::vector<double> make_grid(const GridSpec& g) {
    std::vector<double> out;
    if (g.count == 1) return {g.min};
    for (int i = 0; i < g.count; ++i) {
        const double t = static_cast<double>(i) / (g.count - 1);
        if (g.geometric) {
            const double s = g.min < 0.0 ? -1.0 : 1.0;
            const double a = std::abs(g.min), b = std::abs(g.max);
            out.push_back(s * a * std::pow(b / a, s > 0 ? t : 1.0 - t));
        } else {
            out.push_back(g.min + t * (g.max - g.min));
        }
    }
    out.front() = g.min;
    out.back() = g.max;
    return out;
}

void write_table(std::ostream& os, const Table& table, Format format, const nlohmann::json& meta) {
    if (format == Format::csv) {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            os << (i ? "," : "") << table.columns[i];
        os << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                std::visit(
                    [&](const auto& v) {
                        using T = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<T, double>)
                            os << fmt15(v);
                        else if constexpr (std::is_same_v<T, std::string>)
                            os << csv_field(v);
                        else
                            os << v;
                    },
                    row[i]);
            }
            os << '\n';
        }
        return;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i)
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>)
                        r[table.columns[i]] = std::isfinite(v) ? nlohmann::json(round15(v)) : nlohmann::json();
                    else
                        r[table.columns[i]] = v;
                },
                row[i]);
        rows.push_back(std::move(r));
    }
    os << nlohmann::json{{"meta", meta}, {"rows", rows}}.dump(2) << '\n';
}

namespace {

QuadratureSettings quadrature_from(const RunConfig& cfg) {
    QuadratureSettings qs;
    if (cfg.tol) {
        if (!(*cfg.tol > 0.0 && *cfg.tol < 1.0)) throw ConfigError("tol", "must lie in (0, 1)");
        qs.rel_tol = *cfg.tol;
        qs.abs_tol = std::min(qs.abs_tol, *cfg.tol);
        qs.truncation_guard = std::min(qs.truncation_guard, 0.1 * qs.abs_tol);
    }
    return qs;
}

ModelPtr load_model(const RunConfig& cfg) {
    if (cfg.model_file.empty()) throw ConfigError("model", "--model <file> is required");
    return model_from_file(cfg.model_file);
}

std::vector<double> grid_or_default(const RunConfig& cfg, const Model& m) {
    if (cfg.grid) return make_grid(*cfg.grid);
    return wing_grid(m.stddev(), 5.0, 40.0, 12);
}

nlohmann::json meta_for(std::string_view command, const Model* m) {
    nlohmann::json meta{{"command", command}};
    if (m) meta["model"] = model_to_json(*m);
    return meta;
}

}  // namespace

int cmd_price(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const ModelPtr m = load_model(cfg);
    const QuadratureSettings qs = quadrature_from(cfg);
    const std::vector<double> grid = grid_or_default(cfg, *m);

    Table t{{"kappa", "call", "put", "method", "err_estimate", "status", "message"}, {}};
    bool partial = false;
    for (const double k : grid) {
        try {
            const PriceQuote q = price_preferred(*m, k, qs);
            t.rows.push_back({k, q.call, q.put, std::string(to_string(q.method)), q.abs_error_estimate,
                              std::string("ok"), std::string()});
        } catch (const std::exception& e) {
            partial = true;
            t.rows.push_back({k, NAN, NAN, std::string(), NAN, std::string("failed"), std::string(e.what())});
        }
    }
    write_table(out, t, cfg.format, meta_for("price", m.get()));
    return partial ? kExitPartial : kExitOk;
}

int cmd_ivol(const MarketQuote& q, OptionType type, const RunConfig& cfg, std::ostream& out,
             std::ostream& err) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(q.forward)) throw ConfigError("forward", "must be finite");
    if (!finite(q.strike)) throw ConfigError("strike", "must be finite");
    if (!finite(q.maturity) || !(q.maturity > 0.0)) throw ConfigError("maturity", "must be positive");
    if (!finite(q.price) || !(q.price > 0.0)) throw ConfigError("price", "must be positive");
    const double tol = cfg.tol.value_or(1e-12);
    if (!(tol > 0.0)) throw ConfigError("tol", "must be positive");

    // Normalized units: kappa = (K - F0)/sqrt(t), price / sqrt(t).
    const double root_t = std::sqrt(q.maturity);
    const double kappa = (q.strike - q.forward) / root_t;
    const double price = q.price / root_t;
    IvolResult r{};
    try {
        r = type == OptionType::call ? implied_vol_call(kappa, price, tol)
                                     : implied_vol_put(kappa, price, tol);
    } catch (const NoSolutionBelowIntrinsic&) {
        err << "no solution: price <= intrinsic\n";
        return kExitNoSolution;
    }
    Table t{{"kappa", "normalized_price", "type", "ivol", "terminal_stddev", "method", "iterations"}, {}};
    t.rows.push_back({kappa, price, std::string(type == OptionType::call ? "call" : "put"), r.sigma,
                      r.sigma * root_t, std::string(to_string(r.method)),
                      static_cast<std::int64_t>(r.iterations)});
    nlohmann::json meta = meta_for("ivol", nullptr);
    meta["quote"] = {{"forward", q.forward}, {"strike", q.strike}, {"maturity", q.maturity}, {"price", q.price}};
    write_table(out, t, cfg.format, meta);
    return kExitOk;
}

int cmd_smile(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const ModelPtr m = load_model(cfg);
    const QuadratureSettings qs = quadrature_from(cfg);
    const std::vector<double> grid = grid_or_default(cfg, *m);
    const SmileGrid smile = smile_from_model(*m, grid, qs);

    Table t{{"kappa", "price", "log_price", "ivol", "price_method", "ivol_method", "status", "message"}, {}};
    bool partial = false;
    for (const auto& p : smile.points) {
        if (p.ok())
            t.rows.push_back({p.kappa, p.price, p.log_price, p.ivol, std::string(to_string(p.method)),
                              std::string(to_string(p.ivol_method)), std::string("ok"), std::string()});
        else {
            partial = true;
            t.rows.push_back({p.kappa, NAN, NAN, NAN, std::string(), std::string(), std::string("failed"),
                              p.message});
        }
    }
    write_table(out, t, cfg.format, meta_for("smile", m.get()));
    return partial ? kExitPartial : kExitOk;
}

int cmd_wings(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const ModelPtr m = load_model(cfg);
    VerdictSettings st;
    if (cfg.tol) {
        if (!(*cfg.tol > 0.0)) throw ConfigError("tol", "must be positive");
        st.slope_tol = st.tail_tol = *cfg.tol;
    }
    if (cfg.grid) throw ConfigError("grid", "wings builds its own wing grid");
    const VerdictReport rep = theorem_verdicts(*m, st);

    if (cfg.format == Format::json) {
        nlohmann::json doc = to_json(rep);
        doc["meta"] = meta_for("wings", m.get());
        out << doc.dump(2) << '\n';
    } else {
        Table t{{"check", "side", "measured", "reference", "tolerance", "comparison", "pass", "note"}, {}};
        for (const auto& c : rep.checks)
            t.rows.push_back({c.name, std::string(to_string(c.side)), c.measured, c.reference, c.tolerance,
                              c.comparison, std::string(c.pass ? "true" : "false"), c.note});
        for (const auto& e : rep.errors)
            t.rows.push_back({std::string("error"), std::string(), NAN, NAN, NAN, std::string(),
                              std::string("false"), e});
        write_table(out, t, cfg.format);
    }
    return rep.all_pass() ? kExitOk : kExitCheckFailed;
}

namespace {

struct SuiteResult {
    std::string name;
    long samples = 0;
    long violations = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    std::uint64_t digest = 1469598103934665603ull;  // FNV-1a offset basis

    void absorb(double x) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            digest ^= (bits >> (8 * i)) & 0xffu;
            digest *= 1099511628211ull;
        }
    }
};

using Rng = std::mt19937_64;

double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

// Each suite gets its own stream so adding or skipping suites leaves the
// others' sample points unchanged.
Rng suite_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

std::vector<SuiteResult> suite_lemma_bounds(Rng rng, long n) {
    SuiteResult up{"lemma_bounds_upper"}, lo{"lemma_bounds_lower"};
    for (long i = 0; i < n; ++i) {
        const double y = log_uniform(rng, 1e-3, 1e3);
        const double beta = log_uniform(rng, 0.25, 4.0);
        up.absorb(y), up.absorb(beta), lo.absorb(y), lo.absorb(beta);
        const double c = call_price(y, std::sqrt(beta * y));
        const PriceBounds b = bachelier_bounds(y, beta);
        if (c > 0.0) {
            if (c > b.upper) ++up.violations;
            if (b.lower > c) ++lo.violations;
            up.max_residual = std::max(up.max_residual, (c - b.upper) / c);
            lo.max_residual = std::max(lo.max_residual, (b.lower - c) / c);
        }
    }
    up.samples = lo.samples = n;
    return {up, lo};
}

std::vector<SuiteResult> suite_mills(Rng rng, long n) {
    SuiteResult up{"mills_upper"}, lo{"mills_lower"};
    for (long i = 0; i < n; ++i) {
        const double k = log_uniform(rng, 1e-3, 1e2);
        const double s = log_uniform(rng, 1e-2, 1e1);
        up.absorb(k), up.absorb(s), lo.absorb(k), lo.absorb(s);
        const double c = call_price(k, s);
        const PriceBounds b = mills_sandwich(k, s);
        if (c > 0.0) {
            if (c > b.upper) ++up.violations;
            if (b.lower > c) ++lo.violations;
            up.max_residual = std::max(up.max_residual, (c - b.upper) / c);
            lo.max_residual = std::max(lo.max_residual, (b.lower - c) / c);
        }
    }
    up.samples = lo.samples = n;
    return {up, lo};
}

std::vector<SuiteResult> suite_parity(Rng rng, long n) {
    SuiteResult r{"parity"};
    r.tolerance = 1e-13;
    std::uniform_real_distribution<double> uk(-10.0, 10.0);
    for (long i = 0; i < n; ++i) {
        const double k = uk(rng);
        const double s = log_uniform(rng, 0.01, 5.0);
        r.absorb(k), r.absorb(s);
        const double res = std::abs(call_price(k, s) - put_price(k, s) + k);
        r.max_residual = std::max(r.max_residual, res);
        if (res > r.tolerance) ++r.violations;
    }
    r.samples = n;
    return {r};
}

std::vector<SuiteResult> suite_roundtrip(Rng rng, long n) {
    SuiteResult r{"roundtrip"};
    r.tolerance = 1e-9;
    std::uniform_real_distribution<double> uk(-10.0, 10.0);
    for (long i = 0; i < n; ++i) {
        const double k = uk(rng);
        const double s = log_uniform(rng, 0.01, 5.0);
        r.absorb(k), r.absorb(s);
        double err = kInfinity;
        try {
            const double lp = log_call_price(std::abs(k), s);
            const IvolResult iv = k > 0.0   ? implied_vol_call_log(k, lp)
                                  : k < 0.0 ? implied_vol_put_log(k, lp)
                                            : implied_vol_call(0.0, std::exp(lp), 1e-15);
            err = std::abs(iv.sigma - s) / s;
        } catch (const std::exception&) {
        }
        r.max_residual = std::max(r.max_residual, err);
        if (!(err <= r.tolerance)) ++r.violations;
    }
    r.samples = n;
    return {r};
}

std::vector<SuiteResult> suite_vega(Rng rng, long n) {
    SuiteResult r{"vega"};
    r.tolerance = 1e-6;
    std::uniform_real_distribution<double> uk(-10.0, 10.0);
    long used = 0;
    for (long i = 0; i < n; ++i) {
        const double k = std::abs(uk(rng));
        const double s = log_uniform(rng, 0.01, 5.0);
        r.absorb(k), r.absorb(s);
        const double v = vega(k, s);
        if (v < 1e-250) continue;  // FD quotient is all rounding there
        ++used;
        const double d = k / s;
        const double h = 1e-4 * s / std::max(1.0, d * d);
        const double fd = (call_price(k, s + h) - call_price(k, s - h)) / (2 * h);
        const double rel = std::abs(fd - v) / v;
        r.max_residual = std::max(r.max_residual, rel);
        if (rel > r.tolerance) ++r.violations;
    }
    r.samples = used;
    return {r};
}

}  // namespace

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    if (cfg.samples < 1) throw ConfigError("samples", "must be at least 1");
    using Suite = std::vector<SuiteResult> (*)(Rng, long);
    const std::vector<std::pair<std::string, Suite>> all{{"lemma_bounds", suite_lemma_bounds},
                                                          {"mills", suite_mills},
                                                          {"parity", suite_parity},
                                                          {"roundtrip", suite_roundtrip},
                                                          {"vega", suite_vega}};
    std::set<std::string> wanted(cfg.suites.begin(), cfg.suites.end());
    for (const auto& w : wanted)
        if (std::none_of(all.begin(), all.end(), [&](const auto& s) { return s.first == w; }))
            throw ConfigError("suites", "unknown suite '" + w + "'");

    Table t{{"suite", "samples", "violations", "max_residual", "tolerance", "pass", "sample_digest"}, {}};
    bool failed = false;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!wanted.empty() && !wanted.count(all[i].first)) continue;
        for (const SuiteResult& r : all[i].second(suite_rng(cfg.seed, i), cfg.samples)) {
            failed = failed || r.violations > 0;
            t.rows.push_back({r.name, static_cast<std::int64_t>(r.samples),
                              static_cast<std::int64_t>(r.violations), r.max_residual, r.tolerance,
                              std::string(r.violations == 0 ? "true" : "false"),
                              fmt::format("{:016x}", r.digest)});
        }
    }
    nlohmann::json meta = meta_for("check", nullptr);
    meta["seed"] = cfg.seed;
    meta["samples"] = cfg.samples;
    write_table(out, t, cfg.format, meta);
    return failed ? kExitCheckFailed : kExitOk;
}

int cmd_models(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    Table t{{"model", "parameter", "required", "constraint"}, {}};
    auto row = [&](const char* m, const char* p, bool req, const char* c) {
        t.rows.push_back({std::string(m), std::string(p), std::string(req ? "yes" : "no"), std::string(c)});
    };
    row("gaussian", "sigma", true, "sigma > 0");
    row("asym_laplace", "lambda_r", true, "lambda_r > 0");
    row("asym_laplace", "lambda_l", true, "lambda_l > 0");
    row("nig", "alpha", true, "alpha > |beta|");
    row("nig", "beta", true, "|beta| < alpha");
    row("nig", "delta", true, "delta > 0");
    row("nig", "mu", false, "defaults to -delta beta / sqrt(alpha^2 - beta^2) (zero mean)");
    write_table(out, t, cfg.format, meta_for("models", nullptr));
    return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bachelier smile wings: pricing, implied volatility and wing diagnostics",
                 "bachelier-wings"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string grid_text;
    std::string format_text = "csv";
    double tol = 0.0;
    MarketQuote quote;
    std::string type_text = "call";

    auto common = [&](CLI::App* sub, bool model, bool grid) {
        if (model) sub->add_option("--model", cfg.model_file, "Model file (JSON)");
        if (grid) sub->add_option("--grid", grid_text, "min:max:count[:geom]");
        sub->add_option("--tol", tol, "Tolerance");
        sub->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", cfg.seed, "Seed for randomized suites");
        sub->add_option("--out", cfg.out, "Output path (default: standard output)");
    };

    CLI::App* price = app.add_subcommand("price", "Price calls and puts on a moneyness grid");
    common(price, true, true);
    CLI::App* ivol = app.add_subcommand("ivol", "Implied normal volatility of one quote");
    common(ivol, false, false);
    ivol->add_option("--forward", quote.forward)->required();
    ivol->add_option("--strike", quote.strike)->required();
    ivol->add_option("--maturity", quote.maturity)->required();
    ivol->add_option("--price", quote.price, "Undiscounted option price")->required();
    ivol->add_option("--type", type_text)->check(CLI::IsMember({"call", "put"}));
    CLI::App* smile = app.add_subcommand("smile", "Implied volatility smile of a model");
    common(smile, true, true);
    CLI::App* wings = app.add_subcommand("wings", "Wing slope and tail diagnostics with verdicts");
    common(wings, true, false);
    CLI::App* check = app.add_subcommand("check", "Run the randomized invariant suites");
    common(check, false, false);
    check->add_option("--samples", cfg.samples, "Samples per suite");
    check->add_option("--suites", cfg.suites, "lemma_bounds, mills, parity, roundtrip, vega")
        ->delimiter(',');
    CLI::App* models = app.add_subcommand("models", "List models and their parameters");
    common(models, false, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    try {
        cfg.format = format_text == "json" ? Format::json : Format::csv;
        if (!grid_text.empty()) cfg.grid = parse_grid(grid_text);
        for (const CLI::App* sub : app.get_subcommands())
            if (sub->count("--tol")) cfg.tol = tol;
        if (!cfg.out.empty()) {
            file.open(cfg.out, std::ios::binary);
            if (!file) throw ConfigError("out", "cannot open '" + cfg.out + "' for writing");
            sink = &file;
        }

        if (price->parsed()) return cmd_price(cfg, *sink, err);
        if (ivol->parsed())
            return cmd_ivol(quote, type_text == "put" ? OptionType::put : OptionType::call, cfg, *sink, err);
        if (smile->parsed()) return cmd_smile(cfg, *sink, err);
        if (wings->parsed()) return cmd_wings(cfg, *sink, err);
        if (check->parsed()) return cmd_check(cfg, *sink, err);
        return cmd_models(cfg, *sink, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace bw::cli
