#include <cmath>
#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "ela/market_data.hpp"
#include "ela/subsample.hpp"

using namespace ela;

namespace {

constexpr std::int64_t may1 = 1'746'057'600'000;  // 2025-05-01T00:00:00Z

RoundDataset per_minute(std::size_t n, std::uint64_t seed = 1) {
    std::mt19937_64 g(seed);
    std::lognormal_distribution<double> x(3.0, 1.0);
    RoundDataset d;
    for (std::size_t i = 0; i < n; ++i) {
        DatasetRow r;
        r.round_id = static_cast<std::int64_t>(i);
        r.bidder = "0xaa";
        r.bid_scaled = 2.0;
        r.x1 = x(g);
        r.x2 = x(g);
        r.p_start = 3000.0;
        r.round_start = may1 + static_cast<std::int64_t>(i) * 60'000;
        d.rows.push_back(r);
    }
    return d;
}

}  // namespace

TEST_CASE("utc_month", "[subsample]") {
    CHECK(utc_month(may1) == "2025-05");
    CHECK(utc_month(may1 - 1) == "2025-04");
    CHECK(utc_month(0) == "1970-01");
    CHECK(utc_month(1'709'164'800'000) == "2024-02");  // 2024-02-29
}

TEST_CASE("monthly split of six months at one round per minute", "[subsample]") {
    const auto d = per_minute(264959);
    const auto months = split_monthly(d);
    REQUIRE(months.size() == 6);
    const std::size_t expected[] = {44640, 43200, 44640, 44640, 43200, 44639};
    const char* names[] = {"2025-05", "2025-06", "2025-07", "2025-08", "2025-09", "2025-10"};
    std::size_t total = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(months[i].name == names[i]);
        CHECK(months[i].data.size() == expected[i]);
        total += months[i].data.size();
    }
    CHECK(total == d.size());
}

TEST_CASE("monthly split edge cases", "[subsample]") {
    const auto one = per_minute(1000);
    const auto m = split_monthly(one);
    REQUIRE(m.size() == 1);
    CHECK(dataset_to_string(m[0].data) == dataset_to_string(one));

    const auto two = split_monthly(per_minute(44640 + 10));
    REQUIRE(two.size() == 2);
    CHECK(two[0].data.size() + two[1].data.size() == 44650);

    auto bad = per_minute(3);
    bad.rows[1].round_start = 0;
    CHECK_THROWS_AS(split_monthly(bad), ArgumentError);
}

TEST_CASE("regime split at the median", "[subsample]") {
    const auto d = per_minute(264959);
    const auto s = split_regime(d);
    CHECK(s.low.size() == 132480);
    CHECK(s.high.size() == 132479);
    for (const auto& r : s.low.rows) CHECK(r.x1 <= s.threshold);
    for (const auto& r : s.high.rows) CHECK(r.x1 > s.threshold);

    const auto even = split_regime(per_minute(1000, 2));
    CHECK(even.low.size() == 500);
    CHECK(even.high.size() == 500);
    CHECK_THROWS_AS(median_x1(RoundDataset{}), ArgumentError);
}

TEST_CASE("regime membership is invariant under a monotone transform of x1", "[subsample]") {
    const auto d = per_minute(999, 3);
    auto t = d;
    for (auto& r : t.rows) r.x1 = std::log(r.x1);
    const auto a = split_regime(d), b = split_regime(t);
    CHECK(b.threshold == std::log(a.threshold));
    std::set<std::int64_t> la, lb;
    for (const auto& r : a.low.rows) la.insert(r.round_id);
    for (const auto& r : b.low.rows) lb.insert(r.round_id);
    CHECK(la == lb);
}

TEST_CASE("subsamples partition the rows", "[subsample]") {
    const auto d = per_minute(90000, 4);
    std::multiset<std::int64_t> all;
    for (const auto& m : split_monthly(d))
        for (const auto& r : m.data.rows) all.insert(r.round_id);
    CHECK(all.size() == d.size());
    CHECK(std::set<std::int64_t>(all.begin(), all.end()).size() == d.size());

    const auto s = split_regime(d, 25.0);
    CHECK(s.threshold == 25.0);
    CHECK(s.low.size() + s.high.size() == d.size());
}
