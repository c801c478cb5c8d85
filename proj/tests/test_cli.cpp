#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "bw/bachelier.hpp"
#include "bw/cli.hpp"
#include "bw/errors.hpp"

using namespace bw;
using namespace bw::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bachelier-wings");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() : dir_(fs::temp_directory_path() / ("bw_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    FAIL("no column " << name);
    return 0;
}

const char* kGauss1 = R"({"model": "gaussian", "params": {"sigma": 1.0}})";
const char* kGauss2 = R"({"model": "gaussian", "params": {"sigma": 2.0}})";
const char* kLaplace = R"({"model": "asym_laplace", "params": {"lambda_r": 1.0, "lambda_l": 1.0}})";
const char* kNig = R"({"model": "nig", "params": {"alpha": 2.0, "beta": 0.5, "delta": 1.0}})";

}  // namespace

TEST_CASE("grid parsing") {
    const GridSpec lin = parse_grid("0:1:3");
    CHECK(make_grid(lin) == std::vector<double>{0.0, 0.5, 1.0});
    const std::vector<double> geo = make_grid(parse_grid("1:100:3:geom"));
    REQUIRE(geo.size() == 3);
    CHECK(geo[1] == doctest::Approx(10.0).epsilon(1e-14));
    const std::vector<double> neg = make_grid(parse_grid("-100:-1:3:geom"));
    CHECK(neg[1] == doctest::Approx(-10.0).epsilon(1e-14));
    CHECK(make_grid(parse_grid("2:2:1")) == std::vector<double>{2.0});
    for (const char* bad : {"1:0:3", "a:b:c", "0:1", "0:1:0", "-1:1:3:geom", "0:1:3:log", "1:1:3"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS((void)parse_grid(bad), ConfigError);
    }
}

TEST_CASE("models lists every parameter") {
    const Outcome o = invoke({"models"});
    CHECK(o.code == kExitOk);
    for (const char* p : {"sigma", "lambda_r", "lambda_l", "alpha", "beta", "delta", "mu"})
        CHECK(o.out.find(p) != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    Scratch s;
    CHECK(invoke({}).code == kExitConfig);
    CHECK(invoke({"frobnicate"}).code == kExitConfig);
    CHECK(invoke({"price"}).code == kExitConfig);  // no model
    CHECK(invoke({"price", "--model", s.path("missing.json")}).code == kExitConfig);
    const std::string g = s.write("g.json", kGauss1);
    CHECK(invoke({"price", "--model", g, "--format", "xml"}).code == kExitConfig);
    CHECK(invoke({"price", "--model", g, "--grid", "1:0:3"}).code == kExitConfig);
    CHECK(invoke({"price", "--model", g, "--tol", "2"}).code == kExitConfig);
    CHECK(invoke({"wings", "--model", g, "--grid", "5:40:12"}).code == kExitConfig);
    CHECK(invoke({"check", "--samples", "0"}).code == kExitConfig);
    CHECK(invoke({"check", "--suites", "parity,nonsense"}).code == kExitConfig);
    CHECK(invoke({"ivol", "--forward", "100", "--strike", "100", "--maturity", "0", "--price", "1"}).code ==
          kExitConfig);
}

TEST_CASE("config errors name the problem") {
    Scratch s;
    const Outcome mal = invoke({"price", "--model", s.write("m.json", R"({"model": "gaussian", "params": {"sigma": })")});
    CHECK(mal.code == kExitConfig);
    CHECK(mal.err.find("byte") != std::string::npos);

    const Outcome nig = invoke(
        {"price", "--model", s.write("n.json", R"({"model": "nig", "params": {"alpha": 1, "beta": 1, "delta": 1}})")});
    CHECK(nig.code == kExitConfig);
    CHECK(nig.err.find("params") != std::string::npos);

    const Outcome extra = invoke(
        {"price", "--model", s.write("e.json", R"({"model": "gaussian", "params": {"sigma": 1, "nu": 2}})")});
    CHECK(extra.code == kExitConfig);
    CHECK(extra.err.find("nu") != std::string::npos);
}

TEST_CASE("price examples") {
    Scratch s;
    const Outcome g = invoke({"price", "--model", s.write("g.json", kGauss1), "--grid", "0:0:1"});
    REQUIRE(g.code == kExitOk);
    const auto rows = parse_csv(g.out);
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][column(rows[0], "call")]) == doctest::Approx(0.398942280401432).epsilon(1e-14));
    CHECK(std::stod(rows[1][column(rows[0], "put")]) == doctest::Approx(0.398942280401432).epsilon(1e-14));
    CHECK(rows[1][column(rows[0], "status")] == "ok");

    const Outcome l = invoke({"price", "--model", s.write("l.json", kLaplace), "--grid", "1:1:1", "--format", "json"});
    REQUIRE(l.code == kExitOk);
    const auto doc = nlohmann::json::parse(l.out);
    CHECK(doc["rows"][0]["call"].get<double>() == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-12));
    CHECK(doc["meta"]["model"]["model"] == "asym_laplace");
}

TEST_CASE("unreachable tolerance gives a partial result") {
    Scratch s;
    const Outcome o = invoke({"price", "--model", s.write("g.json", kGauss1), "--grid", "-1:1:3", "--tol", "1e-17"});
    CHECK(o.code == kExitPartial);
    CHECK(o.out.find("failed") != std::string::npos);
    CHECK(o.out.find("tolerance not reached") != std::string::npos);
}

TEST_CASE("ivol examples") {
    const Outcome atm = invoke({"ivol", "--forward", "100", "--strike", "100", "--maturity", "1", "--price",
                                "0.3989422804014327"});
    REQUIRE(atm.code == kExitOk);
    auto rows = parse_csv(atm.out);
    CHECK(std::stod(rows[1][column(rows[0], "ivol")]) == doctest::Approx(1.0).epsilon(1e-12));

    // price = sqrt(t) c_b(kappa, I) with (K - F)/sqrt(t) = 2, I = 1.5
    const double quote = 2.0 * call_price(2.0, 1.5);
    const Outcome o = invoke({"ivol", "--forward", "100", "--strike", "104", "--maturity", "4", "--price",
                              fmt_double(quote)});
    REQUIRE(o.code == kExitOk);
    rows = parse_csv(o.out);
    CHECK(std::stod(rows[1][column(rows[0], "kappa")]) == doctest::Approx(2.0));
    CHECK(std::stod(rows[1][column(rows[0], "ivol")]) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::stod(rows[1][column(rows[0], "terminal_stddev")]) == doctest::Approx(3.0).epsilon(1e-12));

    const Outcome put = invoke({"ivol", "--forward", "100", "--strike", "96", "--maturity", "4", "--price",
                                fmt_double(quote), "--type", "put"});
    REQUIRE(put.code == kExitOk);
    rows = parse_csv(put.out);
    CHECK(std::stod(rows[1][column(rows[0], "ivol")]) == doctest::Approx(1.5).epsilon(1e-12));

    const Outcome below = invoke({"ivol", "--forward", "100", "--strike", "90", "--maturity", "1", "--price", "5"});
    CHECK(below.code == kExitNoSolution);
    CHECK(below.err.find("intrinsic") != std::string::npos);
}

TEST_CASE("smiles") {
    Scratch s;
    const Outcome g = invoke(
        {"smile", "--model", s.write("g2.json", kGauss2), "--grid", "-20:20:41", "--format", "json"});
    REQUIRE(g.code == kExitOk);
    const auto doc = nlohmann::json::parse(g.out);
    REQUIRE(doc["rows"].size() == 41);
    double worst = 0.0;
    for (const auto& r : doc["rows"]) worst = std::max(worst, std::abs(r["ivol"].get<double>() - 2.0));
    CHECK(worst < 1e-7);

    const Outcome l = invoke({"smile", "--model", s.write("l.json", kLaplace), "--grid", "5:40:8:geom"});
    REQUIRE(l.code == kExitOk);
    const auto rows = parse_csv(l.out);
    const double i40 = std::stod(rows.back()[column(rows[0], "ivol")]);
    CHECK(std::abs(i40 * i40 / 40.0 - 0.5) < 0.1 * 0.5);

    // default grid: the wing grid, 12 points per side
    const Outcome d = invoke({"smile", "--model", s.path("l.json")});
    CHECK(d.code == kExitOk);
    CHECK(parse_csv(d.out).size() == 25);

    // far enough out that the log tail itself carries too little precision
    const Outcome far = invoke({"smile", "--model", s.write("g.json", kGauss1), "--grid", "1e2:1e5:4:geom"});
    CHECK(far.code == kExitPartial);
    const auto fr = parse_csv(far.out);
    CHECK(fr[1][column(fr[0], "status")] == "ok");
    CHECK(fr[4][column(fr[0], "status")] == "failed");
}

TEST_CASE("wings verdicts") {
    Scratch s;
    for (const char* m : {kGauss1, kLaplace, kNig}) {
        CAPTURE(m);
        const Outcome o = invoke({"wings", "--model", s.write("m.json", m)});
        CHECK(o.code == kExitOk);
        CHECK(o.out.find(",false,") == std::string::npos);
    }
    const Outcome j = invoke({"wings", "--model", s.write("n.json", kNig), "--format", "json"});
    REQUIRE(j.code == kExitOk);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["meta"]["command"] == "wings");
    CHECK(doc.contains("checks"));

    // 1e-4 relative is far below the finite-grid bias of the slope
    const Outcome tight = invoke({"wings", "--model", s.path("n.json"), "--tol", "1e-4"});
    CHECK(tight.code == kExitCheckFailed);
}

TEST_CASE("check suites") {
    const Outcome a = invoke({"check", "--samples", "500", "--seed", "7"});
    const Outcome b = invoke({"check", "--samples", "500", "--seed", "7"});
    const Outcome c = invoke({"check", "--samples", "500", "--seed", "8"});
    CHECK(a.out == b.out);
    const auto ra = parse_csv(a.out), rc = parse_csv(c.out);
    const std::size_t dig = column(ra[0], "sample_digest");
    REQUIRE(ra.size() == rc.size());
    for (std::size_t i = 1; i < ra.size(); ++i) CHECK(ra[i][dig] != rc[i][dig]);

    // the published lower bounds are violated; the rest hold
    CHECK(a.code == kExitCheckFailed);
    const std::size_t pass = column(ra[0], "pass");
    for (std::size_t i = 1; i < ra.size(); ++i) {
        const std::string& name = ra[i][0];
        CAPTURE(name);
        const bool lower = name.find("lower") != std::string::npos;
        CHECK(ra[i][pass] == (lower ? "false" : "true"));
    }

    const Outcome ok = invoke({"check", "--samples", "500", "--suites", "parity,roundtrip,vega"});
    CHECK(ok.code == kExitOk);
    CHECK(parse_csv(ok.out).size() == 4);

    // a suite's samples do not depend on which other suites run
    const Outcome solo = invoke({"check", "--samples", "500", "--seed", "7", "--suites", "vega"});
    const auto rs = parse_csv(solo.out);
    CHECK(rs[1][dig] == ra.back()[dig]);
}

TEST_CASE("csv and json carry the same numbers") {
    Scratch s;
    const std::string m = s.write("n.json", kNig);
    const Outcome csv = invoke({"price", "--model", m, "--grid", "-3:3:7"});
    const Outcome js = invoke({"price", "--model", m, "--grid", "-3:3:7", "--format", "json"});
    REQUIRE(csv.code == kExitOk);
    REQUIRE(js.code == kExitOk);
    const auto rows = parse_csv(csv.out);
    const auto doc = nlohmann::json::parse(js.out);
    REQUIRE(doc["rows"].size() + 1 == rows.size());
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (const char* col : {"kappa", "call", "put", "err_estimate"})
            CHECK(std::stod(rows[i][column(rows[0], col)]) == doc["rows"][i - 1][col].get<double>());
}

TEST_CASE("--out writes the file instead of standard output") {
    Scratch s;
    const std::string target = s.path("out.csv");
    const Outcome o = invoke({"check", "--samples", "100", "--suites", "parity", "--out", target});
    CHECK(o.code == kExitOk);
    CHECK(o.out.empty());
    std::ifstream in(target);
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str() == invoke({"check", "--samples", "100", "--suites", "parity"}).out);

    CHECK(invoke({"models", "--out", s.path("no/such/dir/x.csv")}).code == kExitConfig);
}
