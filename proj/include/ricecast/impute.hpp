#pragma once

#include "ricecast/calendar.hpp"

namespace ricecast {

struct ImputeOptions {
    /// Backward-fill a leading gap from the first observed value before
    /// carrying forward. Off by default: a series that starts with a hole
    /// has nothing to carry and is reported as an error instead.
    bool allow_nocb = false;
};

/// Last observation carried forward. Every missing value is replaced by
/// the nearest preceding present value; observed values are untouched.
/// The first value must be present.
CalendarSeries locf(const CalendarSeries& series);

/// Fills a leading missing run from the first present value (NOCB for the
/// head of the series only). Later gaps are left for locf.
CalendarSeries nocb_leading(const CalendarSeries& series);

/// Calendar completion followed by column-wise LOCF. The result has a
/// contiguous daily calendar and no missing values.
PriceFrame impute_frame(const PriceFrame& frame, const ImputeOptions& options = {});

}  // namespace ricecast
