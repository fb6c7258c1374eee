#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ela {

/// One OHLCV bar. `open_time` is epoch milliseconds.
struct Candle {
    std::int64_t open_time = 0;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

struct CandleSeries {
    std::int64_t bar_ms = 1000;
    std::vector<Candle> bars;              // sorted by open_time, unique
    std::vector<std::int64_t> gaps;        // expected open_times with no bar
    std::size_t duplicate_count = 0;       // rows dropped by dedup
};

inline constexpr std::uint64_t kReserveWei = 1'000'000'000'000'000ULL;  // 0.001 ETH
inline constexpr std::int64_t kRoundMs = 60'000;
inline constexpr std::int64_t kDeadlineOffsetMs = 15'000;
inline constexpr double kWeiPerBidUnit = 1e15;  // exact in binary
inline constexpr double kX1Scale = 1e9;     // E[IV]/sqrt(P)
inline constexpr double kX2Scale = 1e12;    // Var(IV)
/// Ingestion rejects bid_wei at or above this. bid_scaled * 1e15 rounds back to bid_wei exactly below
/// 2^51 and to within one wei below 2^53.
inline constexpr std::uint64_t kMaxExactWei = 1ULL << 53;

struct BidRecord {
    std::int64_t round_id = 0;
    std::string bidder;
    std::uint64_t bid_wei = 0;
    std::int64_t round_start = 0;  // T_r, epoch ms
    std::int64_t deadline = 0;     // D_r, metadata only
    bool censored = false;
};

struct ReturnWindow {
    std::int64_t round_id = 0;
    std::vector<double> returns;
    double p_start = 0.0;
    std::size_t fill_count = 0;
};

struct DatasetRow {
    std::int64_t round_id = 0;
    std::string bidder;
    double bid_scaled = 0.0;
    bool censored = false;
    double x1 = 0.0;  // E[IV]/sqrt(P) * 1e9
    double x2 = 0.0;  // Var(IV) * 1e12
    double p_start = 0.0;
    std::int64_t round_start = 0;
};

struct RoundDataset {
    std::vector<DatasetRow> rows;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }
    std::size_t censored_count() const noexcept {
        std::size_t n = 0;
        for (const auto& r : rows) n += r.censored ? 1 : 0;
        return n;
    }
};

}  // namespace ela
