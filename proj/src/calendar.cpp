#include "ricecast/calendar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace ricecast {

Date make_date(int year, unsigned month, unsigned day) {
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar day " + std::to_string(year) + "-" +
                                    std::to_string(month) + "-" + std::to_string(day));
    }
    return Date{ymd};
}

std::optional<Date> parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    const auto digits = [](std::string_view s) -> std::optional<int> {
        int value = 0;
        for (const char c : s) {
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + (c - '0');
        }
        return value;
    };
    const auto y = digits(text.substr(0, 4));
    const auto m = digits(text.substr(5, 2));
    const auto d = digits(text.substr(8, 2));
    if (!y || !m || !d) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{*y},
                                          std::chrono::month{static_cast<unsigned>(*m)},
                                          std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

std::string format_date(Date day) {
    const std::chrono::year_month_day ymd{day};
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

CalendarSeries::CalendarSeries(std::string name, std::vector<Date> dates,
                               std::vector<std::optional<double>> values)
    : name_(std::move(name)), dates_(std::move(dates)), values_(std::move(values)) {
    if (dates_.size() != values_.size()) {
        throw std::invalid_argument("series '" + name_ + "': dates and values differ in length");
    }
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw std::invalid_argument("series '" + name_ +
                                        "': dates must be strictly increasing");
        }
    }
    for (const auto& value : values_) {
        if (value && !(std::isfinite(*value) && *value > 0.0)) {
            throw std::invalid_argument("series '" + name_ +
                                        "': prices must be finite and positive");
        }
    }
}

bool CalendarSeries::complete() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const std::optional<double>& v) { return v.has_value(); });
}

std::vector<double> CalendarSeries::dense_values() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& value : values_) {
        if (!value) {
            throw std::logic_error("series '" + name_ + "': dense_values on incomplete series");
        }
        out.push_back(*value);
    }
    return out;
}

PriceFrame::PriceFrame(std::vector<Date> calendar, std::vector<CalendarSeries> columns)
    : calendar_(std::move(calendar)), columns_(std::move(columns)) {
    for (std::size_t i = 1; i < calendar_.size(); ++i) {
        if (!(calendar_[i - 1] < calendar_[i])) {
            throw std::invalid_argument("frame calendar must be strictly increasing");
        }
    }
    for (const auto& column : columns_) {
        if (column.dates() != calendar_) {
            throw std::invalid_argument("column '" + column.name() +
                                        "' is not aligned to the frame calendar");
        }
    }
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        for (std::size_t j = i + 1; j < columns_.size(); ++j) {
            if (columns_[i].name() == columns_[j].name()) {
                throw std::invalid_argument("duplicate column name '" + columns_[i].name() + "'");
            }
        }
    }
}

PriceFrame PriceFrame::from_columns(std::vector<CalendarSeries> columns) {
    if (columns.empty()) {
        throw std::invalid_argument("from_columns requires at least one column");
    }
    std::vector<Date> calendar = columns.front().dates();
    return PriceFrame(std::move(calendar), std::move(columns));
}

const CalendarSeries& PriceFrame::column(std::string_view name) const {
    for (const auto& column : columns_) {
        if (column.name() == name) return column;
    }
    throw std::out_of_range("no column named '" + std::string(name) + "'");
}

CalendarSeries complete_calendar(const CalendarSeries& series) {
    if (series.empty()) {
        throw EmptySeries("series '" + series.name() + "' is empty");
    }
    const auto& dates = series.dates();
    const auto span =
        static_cast<std::size_t>((dates.back() - dates.front()).count()) + 1;
    if (span == dates.size()) {
        return series;  // already contiguous
    }
    std::vector<Date> full;
    std::vector<std::optional<double>> values;
    full.reserve(span);
    values.reserve(span);
    std::size_t src = 0;
    for (Date day = dates.front(); day <= dates.back(); day += std::chrono::days{1}) {
        full.push_back(day);
        if (src < dates.size() && dates[src] == day) {
            values.push_back(series.values()[src]);
            ++src;
        } else {
            values.push_back(std::nullopt);
        }
    }
    return CalendarSeries(series.name(), std::move(full), std::move(values));
}

}  // namespace ricecast
