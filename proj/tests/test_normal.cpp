#include "doctest.h"

#include <cmath>

#include "bw/normal.hpp"
#include "oracle.hpp"

using namespace bw;

TEST_CASE("norm_cdf absolute accuracy on [-8, 8]") {
    double worst = 0.0;
    for (int i = 0; i <= 1600; ++i) {
        const double x = -8.0 + 0.01 * i;
        const double ref = static_cast<double>(oracle::norm_cdf(x));
        worst = std::max(worst, std::abs(norm_cdf(x) - ref));
    }
    CHECK(worst < 1e-15);
}

TEST_CASE("far lower tail keeps relative precision") {
    for (double x : {-10.0, -20.0, -30.0, -37.0}) {
        const double ref = static_cast<double>(oracle::norm_cdf(x));
        CHECK(norm_cdf(x) == doctest::Approx(ref).epsilon(1e-13));
    }
}

TEST_CASE("log_norm_cdf matches the oracle beyond underflow") {
    for (double x : {-5.0, -8.5, -40.0, -100.0, -1e3}) {
        const double ref = static_cast<double>(log(oracle::norm_cdf(x)));
        CHECK(log_norm_cdf(x) == doctest::Approx(ref).epsilon(1e-14));
    }
    CHECK(log_norm_cdf(3.0) == doctest::Approx(std::log(static_cast<double>(oracle::norm_cdf(3.0)))));
}

TEST_CASE("mills ratio across the continued-fraction switch") {
    for (double x : {0.0, 1.0, 7.9, 8.0, 8.1, 12.0, 50.0}) {
        const auto ref = oracle::norm_cdf(-x) / oracle::norm_pdf(x);
        CHECK(mills_ratio(x) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
        const auto comp = 1 - x * ref;
        CHECK(mills_complement(x) == doctest::Approx(static_cast<double>(comp)).epsilon(1e-12));
    }
}
