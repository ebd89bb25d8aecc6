#include "ricecast/impute.hpp"

#include <utility>

namespace ricecast {

CalendarSeries locf(const CalendarSeries& series) {
    if (series.empty()) {
        throw EmptySeries("series '" + series.name() + "' is empty");
    }
    if (!series.values().front()) {
        throw LeadingMissing("column '" + series.name() +
                             "' begins with a missing value; no prior observation to carry");
    }
    if (series.complete()) {
        return series;
    }
    std::vector<std::optional<double>> filled = series.values();
    double carry = *filled.front();
    for (auto& value : filled) {
        if (value) {
            carry = *value;
        } else {
            value = carry;
        }
    }
    return CalendarSeries(series.name(), series.dates(), std::move(filled));
}

CalendarSeries nocb_leading(const CalendarSeries& series) {
    if (series.empty()) {
        throw EmptySeries("series '" + series.name() + "' is empty");
    }
    if (series.values().front()) {
        return series;
    }
    std::vector<std::optional<double>> filled = series.values();
    std::size_t first = 0;
    while (first < filled.size() && !filled[first]) {
        ++first;
    }
    if (first == filled.size()) {
        throw LeadingMissing("column '" + series.name() + "' has no observed values at all");
    }
    for (std::size_t i = 0; i < first; ++i) {
        filled[i] = *filled[first];
    }
    return CalendarSeries(series.name(), series.dates(), std::move(filled));
}

PriceFrame impute_frame(const PriceFrame& frame, const ImputeOptions& options) {
    std::vector<CalendarSeries> columns;
    columns.reserve(frame.width());
    for (const auto& column : frame.columns()) {
        auto completed = complete_calendar(column);
        if (options.allow_nocb) {
            completed = nocb_leading(completed);
        }
        columns.push_back(locf(completed));
    }
    return PriceFrame::from_columns(std::move(columns));
}

}  // namespace ricecast
