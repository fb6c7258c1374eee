#pragma once

// Robustness partitions: calendar months (UTC) and a two-regime split at the median of x1.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ela/error.hpp"
#include "ela/types.hpp"

namespace ela {

struct Subsample {
    std::string name;
    RoundDataset data;
};

/// "YYYY-MM" of an epoch-millisecond timestamp, UTC.
inline std::string utc_month(std::int64_t epoch_ms) {
    using namespace std::chrono;
    const year_month_day ymd{floor<days>(sys_time<milliseconds>(milliseconds(epoch_ms)))};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
    return buf;
}

/// Partition by calendar month, in chronological order; empty months do not appear.
inline std::vector<Subsample> split_monthly(const RoundDataset& d) {
    std::map<std::string, RoundDataset> months;
    for (const auto& r : d.rows) {
        if (r.round_start == 0) throw ArgumentError("monthly split needs round_start timestamps");
        months[utc_month(r.round_start)].rows.push_back(r);
    }
    std::vector<Subsample> out;
    for (auto& [name, rows] : months) out.push_back({name, std::move(rows)});
    return out;
}

inline double median_x1(const RoundDataset& d) {
    if (d.empty()) throw ArgumentError("median of an empty dataset");
    std::vector<double> xs;
    xs.reserve(d.size());
    for (const auto& r : d.rows) xs.push_back(r.x1);
    std::sort(xs.begin(), xs.end());
    const auto n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct RegimeSplit {
    double threshold = 0.0;
    RoundDataset low;   // x1 <= threshold
    RoundDataset high;  // x1 > threshold
};

/// Splits at `threshold`, which callers take from the entire dataset rather than the subset.
inline RegimeSplit split_regime(const RoundDataset& d, double threshold) {
    RegimeSplit s;
    s.threshold = threshold;
    for (const auto& r : d.rows) (r.x1 <= threshold ? s.low : s.high).rows.push_back(r);
    return s;
}

inline RegimeSplit split_regime(const RoundDataset& d) { return split_regime(d, median_x1(d)); }

}  // namespace ela
