#include <catch2/catch_amalgamated.hpp>

#include "ricecast/diagnose.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace ricecast;

TEST_CASE("acf at lag zero is one") {
    const auto r = acf({3.0, 1.0, 4.0, 1.0, 5.0}, 2);
    CHECK(r[0] == 1.0);
}

TEST_CASE("acf of the alternating series") {
    const auto r = acf({1.0, -1.0, 1.0, -1.0}, 1);
    CHECK(r[1] == Catch::Approx(-0.75).epsilon(1e-15));
}

TEST_CASE("acf matches the double-loop brute force") {
    std::mt19937 rng(33);
    std::normal_distribution<double> noise(2.0, 5.0);
    for (int round = 0; round < 25; ++round) {
        const int n = 20 + static_cast<int>(rng() % 200);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) {
            v = noise(rng);
        }
        const int max_lag = 1 + static_cast<int>(rng() % 15);
        const auto r = acf(x, max_lag);

        double mean = 0.0;
        for (const double v : x) mean += v;
        mean /= n;
        double denom = 0.0;
        for (int t = 0; t < n; ++t) {
            denom += (x[static_cast<std::size_t>(t)] - mean) *
                     (x[static_cast<std::size_t>(t)] - mean);
        }
        for (int k = 0; k <= max_lag; ++k) {
            double num = 0.0;
            for (int t = 0; t + k < n; ++t) {
                num += (x[static_cast<std::size_t>(t)] - mean) *
                       (x[static_cast<std::size_t>(t + k)] - mean);
            }
            CHECK(std::abs(r[static_cast<std::size_t>(k)] - num / denom) <= 1e-12);
        }
        for (int k = 0; k <= max_lag; ++k) {
            CHECK(std::abs(r[static_cast<std::size_t>(k)]) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("acf error paths") {
    CHECK_THROWS_AS(acf({1.0, 1.0, 1.0}, 1), DegenerateVariance);
    CHECK_THROWS_AS(acf({1.0, 2.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(acf({1.0, 2.0}, -1), std::invalid_argument);
}

TEST_CASE("ljung_box reproduces the closed formula") {
    std::mt19937 rng(44);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(100);
    for (auto& v : x) {
        v = noise(rng);
    }
    const auto r = acf(x, 3);
    const auto lb = ljung_box(x, 3, 1);

    double q = 0.0;
    for (int k = 1; k <= 3; ++k) {
        q += r[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)] /
             (100.0 - static_cast<double>(k));
    }
    q *= 100.0 * 102.0;
    CHECK(lb.statistic == Catch::Approx(q).epsilon(1e-12));
    CHECK(lb.df == 2);
    CHECK(lb.p_value == Catch::Approx(chi_square_sf(q, 2)).epsilon(1e-15));
}

TEST_CASE("a series with zero lag-1 autocorrelation gives Q = 0") {
    const std::vector<double> x = {1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0};
    const auto lb = ljung_box(x, 1, 0);
    CHECK(lb.statistic == 0.0);
    CHECK(lb.p_value == 1.0);
}

TEST_CASE("Q never decreases as lags are added") {
    std::mt19937 rng(55);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(200);
    for (auto& v : x) {
        v = noise(rng);
    }
    double previous = 0.0;
    for (int lags = 1; lags <= 12; ++lags) {
        const auto lb = ljung_box(x, lags, 0);
        CHECK(lb.statistic >= previous);
        previous = lb.statistic;
    }
}

TEST_CASE("ljung_box degrees-of-freedom guard") {
    const std::vector<double> x(50, 0.0);
    CHECK_THROWS_AS(ljung_box(x, 3, 3), DegreesOfFreedom);
    CHECK_THROWS_AS(ljung_box(x, 3, 5), DegreesOfFreedom);
    CHECK_THROWS_AS(ljung_box(x, 3, -1), DegreesOfFreedom);
}

TEST_CASE("chi-square survival closed forms") {
    CHECK(chi_square_sf(0.0, 1) == 1.0);
    CHECK(chi_square_sf(0.0, 7) == 1.0);
    CHECK(chi_square_sf(2.0, 2) == Catch::Approx(std::exp(-1.0)).margin(1e-12));
    // df = 2 is exponential: sf(x) = exp(-x/2)
    for (const double x : {0.5, 1.0, 5.0, 20.0}) {
        CHECK(chi_square_sf(x, 2) == Catch::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("chi-square survival matches adaptive quadrature") {
    for (const int df : {1, 2, 3, 5, 10, 20}) {
        for (const double x : {0.3, 1.7, 3.7, 8.0, 25.0}) {
            const double expected = oracles::chi_square_sf_quadrature(x, df);
            CHECK(chi_square_sf(x, df) == Catch::Approx(expected).margin(1e-8));
        }
    }
}

TEST_CASE("chi-square survival is strictly decreasing toward zero") {
    double previous = 1.0;
    for (double x = 0.5; x < 60.0; x += 0.5) {
        const double value = chi_square_sf(x, 5);
        CHECK(value < previous);
        previous = value;
    }
    CHECK(chi_square_sf(500.0, 5) < 1e-90);
    CHECK_THROWS_AS(chi_square_sf(-1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), std::invalid_argument);
}

TEST_CASE("ljung-box p-values are roughly uniform under the null") {
    std::mt19937 rng(20230901);
    std::normal_distribution<double> noise(0.0, 1.0);
    int below = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
        std::vector<double> residuals(5000);
        for (auto& v : residuals) {
            v = noise(rng);
        }
        const auto lb = ljung_box(residuals, 10, 0);
        if (lb.p_value < 0.05) {
            ++below;
        }
    }
    const double fraction = static_cast<double>(below) / runs;
    CHECK(fraction >= 0.01);
    CHECK(fraction <= 0.10);
}

TEST_CASE("diagnostics report assembles every panel") {
    std::mt19937 rng(66);
    std::normal_distribution<double> noise(1.0, 2.0);
    std::vector<double> residuals(400);
    for (auto& v : residuals) {
        v = noise(rng);
    }
    const auto report = diagnose_residuals(residuals, 3);

    CHECK(report.acf_values.size() == 11);  // default lags = min(10, 400/5) = 10
    CHECK(report.acf_values[0] == 1.0);
    CHECK(report.ljung_box.df == 7);
    CHECK(report.residual_mean == Catch::Approx(1.0).margin(0.4));
    CHECK(report.residual_sd == Catch::Approx(2.0).margin(0.5));
    REQUIRE(report.histogram_edges.size() == 21);
    REQUIRE(report.histogram_counts.size() == 20);
    long long total = 0;
    for (const long long count : report.histogram_counts) {
        total += count;
    }
    CHECK(total == 400);

    // serializations carry the same numbers
    const std::string json = diagnostics_to_json(report);
    CHECK(json.find("\"p_value\"") != std::string::npos);
    const std::string acf_table = acf_csv(report);
    CHECK(acf_table.rfind("lag,acf\n0,1\n", 0) == 0);
    const std::string hist_table = histogram_csv(report);
    CHECK(hist_table.rfind("bin_center,count\n", 0) == 0);
}

TEST_CASE("default lag rule") {
    CHECK(default_ljung_box_lags(400, 3) == 10);
    CHECK(default_ljung_box_lags(30, 0) == 6);
    CHECK(default_ljung_box_lags(30, 8) == 9);  // at least fitdf + 1
    CHECK(default_ljung_box_lags(10000, 5) == 10);
}
