#include "ricecast/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ricecast {

namespace {

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

void chop_carriage_return(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

std::optional<double> parse_number(const std::string& cell) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = first + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

void render_value(std::string& out, double value, TableRounding rounding) {
    char buffer[32];
    if (rounding == TableRounding::integer_idr) {
        const auto n = std::snprintf(buffer, sizeof(buffer), "%lld",
                                     round_half_away_from_zero(value));
        out.append(buffer, static_cast<std::size_t>(n));
    } else {
        const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
        (void)ec;
        out.append(buffer, ptr);
    }
}

}  // namespace

void CsvSchema::validate() const {
    if (missing_tokens.empty()) {
        throw std::invalid_argument("schema needs at least one missing token");
    }
    for (const auto& column : value_columns) {
        if (column == date_column) {
            throw std::invalid_argument("value column '" + column +
                                        "' collides with the date column");
        }
    }
    for (std::size_t i = 0; i < value_columns.size(); ++i) {
        for (std::size_t j = i + 1; j < value_columns.size(); ++j) {
            if (value_columns[i] == value_columns[j]) {
                throw std::invalid_argument("duplicate value column '" + value_columns[i] + "'");
            }
        }
    }
}

PriceFrame read_price_csv(std::istream& in, const CsvSchema& schema) {
    schema.validate();

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header row");
    }
    chop_carriage_return(line);
    const auto header = split_record(line);

    std::vector<std::string> expected;
    expected.reserve(1 + schema.value_columns.size());
    expected.push_back(schema.date_column);
    expected.insert(expected.end(), schema.value_columns.begin(), schema.value_columns.end());
    if (header != expected) {
        throw ParseError(1, "header does not match schema (expected '" + expected.front() +
                                ",...'; separators must be commas)");
    }

    const std::size_t width = schema.value_columns.size();
    std::vector<Date> calendar;
    std::vector<std::vector<std::optional<double>>> cells(width);

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        chop_carriage_return(line);
        const auto record = split_record(line);
        if (record.size() != width + 1) {
            throw ParseError(row, "expected " + std::to_string(width + 1) + " cells, got " +
                                      std::to_string(record.size()));
        }
        const auto day = parse_date(record[0]);
        if (!day) {
            throw ParseError(row, "malformed date '" + record[0] + "'");
        }
        if (!calendar.empty()) {
            if (*day == calendar.back()) {
                throw DuplicateDate("duplicate date " + record[0] + " at row " +
                                    std::to_string(row));
            }
            if (*day < calendar.back()) {
                throw UnsortedInput("date " + record[0] + " at row " + std::to_string(row) +
                                    " is out of order");
            }
        }
        calendar.push_back(*day);
        for (std::size_t j = 0; j < width; ++j) {
            const std::string& cell = record[j + 1];
            if (schema.missing_tokens.count(cell) != 0) {
                cells[j].push_back(std::nullopt);
                continue;
            }
            const auto value = parse_number(cell);
            if (!value) {
                throw ParseError(row, schema.value_columns[j],
                                 "non-numeric cell '" + cell + "'");
            }
            if (!(std::isfinite(*value) && *value > 0.0)) {
                throw ParseError(row, schema.value_columns[j],
                                 "price must be finite and positive, got '" + cell + "'");
            }
            cells[j].push_back(*value);
        }
    }

    std::vector<CalendarSeries> columns;
    columns.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
        columns.emplace_back(schema.value_columns[j], calendar, std::move(cells[j]));
    }
    return PriceFrame(std::move(calendar), std::move(columns));
}

PriceFrame read_price_csv(const std::string& text, const CsvSchema& schema) {
    std::istringstream in(text);
    return read_price_csv(in, schema);
}

void write_table(std::ostream& out, const PriceFrame& frame, TableRounding rounding,
                 const std::string& date_label) {
    std::string buffer = date_label;
    for (const auto& column : frame.columns()) {
        buffer += ',';
        buffer += column.name();
    }
    buffer += '\n';
    for (std::size_t i = 0; i < frame.rows(); ++i) {
        buffer += format_date(frame.calendar()[i]);
        for (const auto& column : frame.columns()) {
            buffer += ',';
            const auto& value = column.values()[i];
            if (!value) {
                buffer += "NA";
            } else {
                render_value(buffer, *value, rounding);
            }
        }
        buffer += '\n';
    }
    out << buffer;
}

std::string write_table(const PriceFrame& frame, TableRounding rounding,
                        const std::string& date_label) {
    std::ostringstream out;
    write_table(out, frame, rounding, date_label);
    return out.str();
}

long long round_half_away_from_zero(double value) {
    return std::llround(value);
}

}  // namespace ricecast
