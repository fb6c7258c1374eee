#pragma once

// Candle and bid ingestion, per-round return windows, and the regression design join.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ela/csv.hpp"
#include "ela/error.hpp"
#include "ela/types.hpp"
#include "ela/vol_estimators.hpp"

namespace ela {

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return in;
}

inline void expect_header(std::istream& in, const std::vector<std::string_view>& expected, std::string_view what) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, std::string(what) + ": missing header");
    const auto cols = csv::split(line);
    bool ok = cols.size() == expected.size();
    for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = cols[i] == expected[i];
    if (!ok) {
        std::string want;
        for (auto c : expected) want += (want.empty() ? "" : ",") + std::string(c);
        throw ParseError(1, std::string(what) + ": header must be '" + want + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Candles

inline CandleSeries read_candles(std::istream& in, std::int64_t bar_ms = 1000) {
    if (bar_ms <= 0) throw ArgumentError("bar interval must be positive");
    detail::expect_header(in, {"open_time_ms", "open", "high", "low", "close", "volume"}, "candles");

    std::vector<Candle> raw;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 6) throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
        Candle c;
        if (!csv::parse_int(f[0], c.open_time)) throw ParseError(lineno, "bad open_time_ms '" + std::string(f[0]) + "'");
        double* dst[] = {&c.open, &c.high, &c.low, &c.close, &c.volume};
        for (int i = 0; i < 5; ++i) {
            if (!csv::parse_double(f[i + 1], *dst[i]) || !std::isfinite(*dst[i]))
                throw ParseError(lineno, "bad number '" + std::string(f[i + 1]) + "'");
        }
        if (c.open <= 0 || c.high <= 0 || c.low <= 0 || c.close <= 0)
            throw ValidationError("line " + std::to_string(lineno) + ": non-positive price");
        if (c.volume < 0) throw ValidationError("line " + std::to_string(lineno) + ": negative volume");
        raw.push_back(c);
    }

    CandleSeries s;
    s.bar_ms = bar_ms;
    // stable so that the first occurrence of a duplicated open_time survives
    std::stable_sort(raw.begin(), raw.end(), [](const Candle& a, const Candle& b) { return a.open_time < b.open_time; });
    for (const auto& c : raw) {
        if (!s.bars.empty() && s.bars.back().open_time == c.open_time) {
            ++s.duplicate_count;
            continue;
        }
        s.bars.push_back(c);
    }
    if (!s.bars.empty()) {
        const auto t0 = s.bars.front().open_time;
        for (const auto& c : s.bars) {
            if ((c.open_time - t0) % bar_ms != 0)
                throw ValidationError("bar at " + std::to_string(c.open_time) + " is off the " + std::to_string(bar_ms) +
                                      " ms grid");
        }
        std::size_t i = 0;
        for (auto t = t0; t <= s.bars.back().open_time; t += bar_ms) {
            if (s.bars[i].open_time == t)
                ++i;
            else
                s.gaps.push_back(t);
        }
    }
    return s;
}

inline CandleSeries load_candles(const std::string& path, std::int64_t bar_ms = 1000) {
    auto in = detail::open_input(path);
    return read_candles(in, bar_ms);
}

inline void write_candles(std::ostream& out, const CandleSeries& s) {
    out << "open_time_ms,open,high,low,close,volume\n";
    for (const auto& c : s.bars) {
        out << c.open_time << ',' << csv::format_double(c.open) << ',' << csv::format_double(c.high) << ','
            << csv::format_double(c.low) << ',' << csv::format_double(c.close) << ','
            << csv::format_double(c.volume) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Bids

struct BidLoad {
    std::vector<BidRecord> records;  // sorted by (round_id, bidder)
    std::size_t duplicate_count = 0;
    std::size_t rejected_count = 0;  // bid_wei at or above kMaxExactWei
};

/// Parses a non-negative decimal wei amount exactly.
inline std::uint64_t parse_wei(std::string_view s, std::size_t lineno) {
    if (!s.empty() && s.front() == '-') throw ValidationError("line " + std::to_string(lineno) + ": negative bid_wei");
    std::uint64_t v = 0;
    if (!csv::parse_int(s, v)) throw ParseError(lineno, "bad bid_wei '" + std::string(s) + "'");
    return v;
}

inline BidLoad read_bids(std::istream& in, std::uint64_t reserve_wei = kReserveWei) {
    detail::expect_header(in, {"round_id", "bidder", "bid_wei", "round_start_ms"}, "bids");

    std::map<std::pair<std::int64_t, std::string>, BidRecord> by_key;
    std::map<std::int64_t, std::int64_t> round_starts;
    BidLoad out;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 4) throw ParseError(lineno, "expected 4 fields, got " + std::to_string(f.size()));
        BidRecord b;
        if (!csv::parse_int(f[0], b.round_id)) throw ParseError(lineno, "bad round_id '" + std::string(f[0]) + "'");
        if (f[1].empty()) throw ParseError(lineno, "empty bidder");
        b.bidder = std::string(f[1]);
        b.bid_wei = parse_wei(f[2], lineno);
        if (b.bid_wei >= kMaxExactWei) {
            ++out.rejected_count;
            continue;
        }
        if (!csv::parse_int(f[3], b.round_start)) throw ParseError(lineno, "bad round_start_ms '" + std::string(f[3]) + "'");
        b.deadline = b.round_start - kDeadlineOffsetMs;
        b.censored = b.bid_wei <= reserve_wei;

        auto [rs, fresh] = round_starts.emplace(b.round_id, b.round_start);
        if (!fresh && rs->second != b.round_start)
            throw ValidationError("line " + std::to_string(lineno) + ": round " + std::to_string(b.round_id) +
                                  " has conflicting round_start_ms");

        auto key = std::make_pair(b.round_id, b.bidder);
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            by_key.emplace(std::move(key), std::move(b));
        } else {
            ++out.duplicate_count;
            if (b.bid_wei > it->second.bid_wei) it->second = std::move(b);
        }
    }
    out.records.reserve(by_key.size());
    for (auto& [k, v] : by_key) out.records.push_back(std::move(v));
    return out;
}

inline BidLoad load_bids(const std::string& path, std::uint64_t reserve_wei = kReserveWei) {
    auto in = detail::open_input(path);
    return read_bids(in, reserve_wei);
}

inline void write_bids(std::ostream& out, const std::vector<BidRecord>& bids) {
    out << "round_id,bidder,bid_wei,round_start_ms\n";
    for (const auto& b : bids) out << b.round_id << ',' << b.bidder << ',' << b.bid_wei << ',' << b.round_start << '\n';
}

// ---------------------------------------------------------------------------
// Round windows

/// Index of the bar opening at `t`, if present.
inline std::optional<std::size_t> find_bar(const CandleSeries& s, std::int64_t t) {
    auto it = std::lower_bound(s.bars.begin(), s.bars.end(), t,
                               [](const Candle& c, std::int64_t v) { return c.open_time < v; });
    if (it == s.bars.end() || it->open_time != t) return std::nullopt;
    return static_cast<std::size_t>(it - s.bars.begin());
}

/// T log returns from the T + 1 closes at round_start, round_start + bar, ..., round_start + T * bar.
/// Missing bars carry the previous close forward (one zero return each); more than `max_fill`
/// fills, or a missing first bar, is a coverage error.
inline ReturnWindow round_returns(const CandleSeries& candles, std::int64_t round_start, std::size_t T,
                                  std::size_t max_fill = 5, std::int64_t round_id = 0) {
    if (T == 0) throw ArgumentError("window length T must be positive");
    const auto first = find_bar(candles, round_start);
    if (!first) throw CoverageError(round_id, "no bar at round start " + std::to_string(round_start));

    ReturnWindow w;
    w.round_id = round_id;
    w.p_start = candles.bars[*first].open;
    w.returns.reserve(T);

    double prev = candles.bars[*first].close;
    std::size_t idx = *first;
    for (std::size_t t = 1; t <= T; ++t) {
        const auto ts = round_start + static_cast<std::int64_t>(t) * candles.bar_ms;
        double close = prev;
        if (idx + 1 < candles.bars.size() && candles.bars[idx + 1].open_time == ts) {
            ++idx;
            close = candles.bars[idx].close;
        } else {
            ++w.fill_count;
            if (w.fill_count > max_fill)
                throw CoverageError(round_id, "more than " + std::to_string(max_fill) + " missing bars");
        }
        w.returns.push_back(std::log(close) - std::log(prev));
        prev = close;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Dataset

struct BuildOptions {
    std::size_t T = kDefaultWindow;
    std::size_t L = kDefaultLag;
    bool lagged = false;
    std::size_t max_fill = 5;
};

struct DatasetBuild {
    RoundDataset data;
    std::size_t dropped_no_predecessor = 0;  // lagged rows whose round r-1 is absent
    std::size_t dropped_coverage = 0;        // rows whose round lacks candle coverage
    std::size_t floored_rounds = 0;          // rounds with a negative raw Newey-West value
    std::size_t filled_bars = 0;
    std::vector<std::string> warnings;

    std::size_t dropped_count() const noexcept { return dropped_no_predecessor + dropped_coverage; }
};

/// Correctly rounded bid_wei / 1e15.
inline double scale_wei(std::uint64_t wei) { return static_cast<double>(wei) / kWeiPerBidUnit; }

inline DatasetRow make_row(const BidRecord& b, const IvMoments& m, double p_start) {
    DatasetRow r;
    r.round_id = b.round_id;
    r.bidder = b.bidder;
    r.bid_scaled = scale_wei(b.bid_wei);
    r.censored = b.censored;
    r.x1 = m.e_iv / std::sqrt(p_start) * kX1Scale;
    r.x2 = m.var_iv * kX2Scale;
    r.p_start = p_start;
    r.round_start = b.round_start;
    return r;
}

/// Joins bids with round moments. With `lagged`, moments come from round r - 1 (which must itself
/// appear in the bid sample) while p_start stays the current round's opening price.
inline DatasetBuild build_dataset(const std::vector<BidRecord>& bids, const CandleSeries& candles,
                                  const BuildOptions& opt = {}) {
    struct RoundInfo {
        std::int64_t start = 0;
        std::optional<ReturnWindow> window;
        std::optional<IvMoments> moments;
        std::string failure;
    };
    std::map<std::int64_t, RoundInfo> rounds;
    for (const auto& b : bids) rounds[b.round_id].start = b.round_start;

    DatasetBuild out;
    for (auto& [id, info] : rounds) {
        try {
            info.window = round_returns(candles, info.start, opt.T, opt.max_fill, id);
            info.moments = round_moments(*info.window, opt.L);
            out.filled_bars += info.window->fill_count;
            out.floored_rounds += info.moments->floored ? 1 : 0;
        } catch (const CoverageError& e) {
            info.failure = e.what();
        }
    }

    std::map<std::int64_t, bool> warned;
    for (const auto& b : bids) {
        const auto& cur = rounds.at(b.round_id);
        const RoundInfo* src = &cur;
        if (opt.lagged) {
            auto it = rounds.find(b.round_id - 1);
            if (it == rounds.end()) {
                ++out.dropped_no_predecessor;
                continue;
            }
            src = &it->second;
        }
        if (!cur.window || !src->moments) {
            ++out.dropped_coverage;
            const auto& why = cur.window ? src->failure : cur.failure;
            if (!warned[b.round_id]) out.warnings.push_back(why);
            warned[b.round_id] = true;
            continue;
        }
        out.data.rows.push_back(make_row(b, *src->moments, cur.window->p_start));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset serialization

inline void write_dataset(std::ostream& out, const RoundDataset& d) {
    out << "round_id,bidder,bid_scaled,censored,x1,x2,p_start,round_start_ms\n";
    for (const auto& r : d.rows) {
        out << r.round_id << ',' << r.bidder << ',' << csv::format_double(r.bid_scaled) << ',' << (r.censored ? 1 : 0)
            << ',' << csv::format_double(r.x1) << ',' << csv::format_double(r.x2) << ','
            << csv::format_double(r.p_start) << ',' << r.round_start << '\n';
    }
}

inline std::string dataset_to_string(const RoundDataset& d) {
    std::ostringstream os;
    write_dataset(os, d);
    return os.str();
}

/// Reads the dataset CSV; the trailing round_start_ms column is optional (0 when absent).
inline RoundDataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "dataset: missing header");
    const auto header = csv::split(line);
    const std::vector<std::string_view> base = {"round_id", "bidder", "bid_scaled", "censored", "x1", "x2", "p_start"};
    bool has_start = header.size() == 8 && header[7] == "round_start_ms";
    bool ok = header.size() == 7 || has_start;
    for (std::size_t i = 0; ok && i < base.size(); ++i) ok = header[i] == base[i];
    if (!ok) throw ParseError(1, "dataset: unexpected header");

    RoundDataset d;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (csv::trim(line).empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != header.size()) throw ParseError(lineno, "wrong field count");
        DatasetRow r;
        int cens = 0;
        if (!csv::parse_int(f[0], r.round_id) || f[1].empty() || !csv::parse_double(f[2], r.bid_scaled) ||
            !csv::parse_int(f[3], cens) || !csv::parse_double(f[4], r.x1) || !csv::parse_double(f[5], r.x2) ||
            !csv::parse_double(f[6], r.p_start) || (has_start && !csv::parse_int(f[7], r.round_start)))
            throw ParseError(lineno, "malformed dataset row");
        r.bidder = std::string(f[1]);
        r.censored = cens != 0;
        d.rows.push_back(std::move(r));
    }
    return d;
}

inline RoundDataset load_dataset(const std::string& path) {
    auto in = detail::open_input(path);
    return read_dataset(in);
}

inline RoundDataset filter_bidder(const RoundDataset& d, const std::string& bidder) {
    RoundDataset out;
    for (const auto& r : d.rows)
        if (r.bidder == bidder) out.rows.push_back(r);
    return out;
}

/// Distinct bidders in first-appearance order.
inline std::vector<std::string> bidders_of(const RoundDataset& d) {
    std::vector<std::string> out;
    for (const auto& r : d.rows)
        if (std::find(out.begin(), out.end(), r.bidder) == out.end()) out.push_back(r.bidder);
    return out;
}

}  // namespace ela
