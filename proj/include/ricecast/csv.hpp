#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "ricecast/calendar.hpp"

namespace ricecast {

/// Layout of the price CSV: one ISO-8601 date column followed by named
/// value columns. Cells equal to a missing token parse as absent.
struct CsvSchema {
    std::string date_column = "Date";
    std::vector<std::string> value_columns = {"BKB1", "BKB2", "BKM1",
                                              "BKM2", "BKS1", "BKS2"};
    std::set<std::string> missing_tokens = {"NA", ""};

    void validate() const;
};

enum class TableRounding {
    integer_idr,     ///< half-away-from-zero to whole rupiah (table presentation)
    full_precision,  ///< shortest round-trip decimal
};

/// Parses a comma-separated table. The header must match the schema
/// exactly; dates must be strictly increasing but need not be contiguous.
PriceFrame read_price_csv(std::istream& in, const CsvSchema& schema = {});
PriceFrame read_price_csv(const std::string& text, const CsvSchema& schema = {});

/// Renders a frame as CSV (UTF-8, LF, header first). Missing values are
/// written as "NA"; prices are rendered under the requested rounding rule.
void write_table(std::ostream& out, const PriceFrame& frame,
                 TableRounding rounding = TableRounding::integer_idr,
                 const std::string& date_label = "Date");
std::string write_table(const PriceFrame& frame,
                        TableRounding rounding = TableRounding::integer_idr,
                        const std::string& date_label = "Date");

/// Presentation rounding used throughout the tables (11387.5 -> 11388).
long long round_half_away_from_zero(double value);

}  // namespace ricecast
