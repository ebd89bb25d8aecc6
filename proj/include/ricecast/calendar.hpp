#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ricecast/errors.hpp"

namespace ricecast {

/// Calendar day (proleptic Gregorian). Daily frequency is the only
/// frequency the engine knows about; there is no time-of-day or timezone.
using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);

/// Strict ISO-8601 (YYYY-MM-DD). Returns nullopt for anything else.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date day);

/// A named daily price series: strictly increasing dates paired with
/// optional prices (IDR). An absent value marks a day with no recorded
/// observation; present values are finite and positive.
class CalendarSeries {
public:
    CalendarSeries(std::string name, std::vector<Date> dates,
                   std::vector<std::optional<double>> values);

    const std::string& name() const { return name_; }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::optional<double>>& values() const { return values_; }

    std::size_t size() const { return dates_.size(); }
    bool empty() const { return dates_.empty(); }

    /// True when every value is present.
    bool complete() const;

    /// Present values only, in calendar order. Requires complete().
    std::vector<double> dense_values() const;

private:
    std::string name_;
    std::vector<Date> dates_;
    std::vector<std::optional<double>> values_;
};

/// A set of series sharing one calendar (the price tables' layout:
/// Date plus one column per rice quality). Column names are unique.
class PriceFrame {
public:
    PriceFrame(std::vector<Date> calendar, std::vector<CalendarSeries> columns);

    /// Builds a frame from at least one column; the calendar is taken from
    /// the first column and all others must match it.
    static PriceFrame from_columns(std::vector<CalendarSeries> columns);

    const std::vector<Date>& calendar() const { return calendar_; }
    const std::vector<CalendarSeries>& columns() const { return columns_; }

    std::size_t rows() const { return calendar_.size(); }
    std::size_t width() const { return columns_.size(); }

    const CalendarSeries& column(std::string_view name) const;

private:
    std::vector<Date> calendar_;
    std::vector<CalendarSeries> columns_;
};

/// Expands a series onto the contiguous daily calendar spanning its first
/// and last date. Days absent from the input appear with an absent value;
/// observed days keep their values. A series already on a contiguous
/// calendar comes back unchanged.
CalendarSeries complete_calendar(const CalendarSeries& series);

}  // namespace ricecast
