#include <catch2/catch_amalgamated.hpp>

#include "ricecast/csv.hpp"

#include <random>
#include <sstream>

using namespace ricecast;

namespace {

const std::string kTable1Head =
    "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
    "2019-12-31,9850,10000,10250,10300,11900,11150\n"
    "2020-01-01,NA,NA,NA,NA,NA,NA\n"
    "2020-01-02,9850,10000,10250,10300,11900,11150\n"
    "2020-01-03,9850,10000,10250,10300,11900,11150\n"
    "2020-01-06,10000,10150,10400,10400,12150,11400\n"
    "2020-01-07,10000,10150,10400,10400,12150,11400\n";

PriceFrame random_integer_frame(std::mt19937& rng, int rows) {
    std::uniform_int_distribution<int> price(9000, 14000);
    std::bernoulli_distribution missing(0.15);
    std::uniform_int_distribution<int> gap(1, 4);
    CsvSchema schema;

    std::vector<Date> calendar;
    Date day = make_date(2021, 3, 1);
    for (int i = 0; i < rows; ++i) {
        calendar.push_back(day);
        day += std::chrono::days{gap(rng)};
    }
    std::vector<CalendarSeries> columns;
    for (const auto& name : schema.value_columns) {
        std::vector<std::optional<double>> values;
        for (int i = 0; i < rows; ++i) {
            values.push_back(missing(rng) ? std::nullopt
                                          : std::optional<double>(price(rng)));
        }
        columns.emplace_back(name, calendar, std::move(values));
    }
    return PriceFrame(std::move(calendar), std::move(columns));
}

}  // namespace

TEST_CASE("reading the head table") {
    const auto frame = read_price_csv(kTable1Head);
    REQUIRE(frame.rows() == 6);
    REQUIRE(frame.width() == 6);

    // the NA row leaves every column missing on 2020-01-01
    for (const auto& column : frame.columns()) {
        CHECK_FALSE(column.values()[1].has_value());
    }
    CHECK(frame.column("BKB1").values()[0] == 9850.0);
    CHECK(frame.column("BKS2").values()[5] == 11400.0);
    // calendar keeps the raw gap (01-03 to 01-06)
    CHECK(frame.calendar()[3] == make_date(2020, 1, 3));
    CHECK(frame.calendar()[4] == make_date(2020, 1, 6));
}

TEST_CASE("header-only input yields an empty frame") {
    const auto frame = read_price_csv(std::string("Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"));
    CHECK(frame.rows() == 0);
    CHECK(frame.width() == 6);
}

TEST_CASE("parser error reporting") {
    const CsvSchema schema;

    SECTION("header mismatch") {
        try {
            read_price_csv(std::string("Date,BKB1\n"), schema);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 1);
        }
    }
    SECTION("tab-separated input is rejected") {
        CHECK_THROWS_AS(read_price_csv(std::string("Date\tBKB1\tBKB2\tBKM1\tBKM2\tBKS1\tBKS2\n"),
                                       schema),
                        ParseError);
    }
    SECTION("malformed date carries the row number") {
        const std::string text =
            "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
            "2020-01-01,9850,10000,10250,10300,11900,11150\n"
            "01/02/2020,9850,10000,10250,10300,11900,11150\n";
        try {
            read_price_csv(text, schema);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 3);
            CHECK(e.column.empty());
        }
    }
    SECTION("non-numeric cell names row and column") {
        const std::string text =
            "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
            "2020-01-01,9850,oops,10250,10300,11900,11150\n";
        try {
            read_price_csv(text, schema);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 2);
            CHECK(e.column == "BKB2");
        }
    }
    SECTION("duplicate date") {
        const std::string text =
            "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
            "2020-01-01,9850,10000,10250,10300,11900,11150\n"
            "2020-01-01,9850,10000,10250,10300,11900,11150\n";
        CHECK_THROWS_AS(read_price_csv(text, schema), DuplicateDate);
    }
    SECTION("out-of-order dates") {
        const std::string text =
            "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
            "2020-01-05,9850,10000,10250,10300,11900,11150\n"
            "2020-01-01,9850,10000,10250,10300,11900,11150\n";
        CHECK_THROWS_AS(read_price_csv(text, schema), UnsortedInput);
    }
    SECTION("non-positive price") {
        const std::string text =
            "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
            "2020-01-01,9850,-3,10250,10300,11900,11150\n";
        CHECK_THROWS_AS(read_price_csv(text, schema), ParseError);
    }
}

TEST_CASE("half-away-from-zero rounding") {
    CHECK(round_half_away_from_zero(0.5) == 1);
    CHECK(round_half_away_from_zero(-0.5) == -1);
    CHECK(round_half_away_from_zero(2.5) == 3);
    CHECK(round_half_away_from_zero(11387.5) == 11388);
    CHECK(round_half_away_from_zero(10422.90) == 10423);
    CHECK(round_half_away_from_zero(10642.36) == 10642);
}

TEST_CASE("write_table renders the forecast row like the published table") {
    const std::vector<Date> calendar = {make_date(2023, 9, 7)};
    const std::vector<double> means = {9995.01, 10422.90, 10642.36, 10678.66, 12313.12, 11387.50};
    const CsvSchema schema;
    std::vector<CalendarSeries> columns;
    for (std::size_t j = 0; j < means.size(); ++j) {
        columns.emplace_back(schema.value_columns[j], calendar,
                             std::vector<std::optional<double>>{means[j]});
    }
    const PriceFrame frame(calendar, std::move(columns));
    const std::string text = write_table(frame);
    CHECK(text ==
          "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n"
          "2023-09-07,9995,10423,10642,10679,12313,11388\n");
}

TEST_CASE("write_table on an empty frame emits the header only") {
    const CsvSchema schema;
    std::vector<CalendarSeries> columns;
    for (const auto& name : schema.value_columns) {
        columns.emplace_back(name, std::vector<Date>{}, std::vector<std::optional<double>>{});
    }
    const PriceFrame frame({}, std::move(columns));
    CHECK(write_table(frame) == "Date,BKB1,BKB2,BKM1,BKM2,BKS1,BKS2\n");
}

TEST_CASE("canonical round-trip: write(read(text)) == text") {
    std::mt19937 rng(7);
    for (int round = 0; round < 20; ++round) {
        const auto frame = random_integer_frame(rng, 1 + static_cast<int>(rng() % 30));
        const std::string text = write_table(frame);
        const auto reread = read_price_csv(text);
        CHECK(write_table(reread) == text);
        REQUIRE(reread.rows() == frame.rows());
        // every cell survives verbatim
        for (std::size_t j = 0; j < frame.width(); ++j) {
            CHECK(reread.columns()[j].values() == frame.columns()[j].values());
        }
    }
}

TEST_CASE("full-precision mode round-trips fractional prices") {
    const std::vector<Date> calendar = {make_date(2022, 1, 1), make_date(2022, 1, 2)};
    const CalendarSeries column("BKB1", calendar,
                                {10422.90, 9995.0100000000002});
    const PriceFrame frame(calendar, {column});
    const std::string text = write_table(frame, TableRounding::full_precision);
    CsvSchema schema;
    schema.value_columns = {"BKB1"};
    const auto reread = read_price_csv(text, schema);
    CHECK(reread.column("BKB1").values()[0] == 10422.90);
    CHECK(reread.column("BKB1").values()[1] == 9995.0100000000002);
}
