#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "catch_amalgamated.hpp"
#include "ela/pipeline.hpp"

using namespace ela;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("ela_test_" + name + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_sim(std::size_t rounds, const fs::path& out) {
    RunConfig cfg;
    cfg.simulate = true;
    cfg.sim.n_rounds = rounds;
    cfg.sim.seed = 11;
    cfg.fit.starts = 1;
    cfg.out_dir = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("simulation runs are reproducible", "[pipeline]") {
    TempDir tmp("det");
    auto a = small_sim(800, tmp.path / "a");
    auto b = small_sim(800, tmp.path / "b");
    a.monthly = b.monthly = true;
    REQUIRE(run_pipeline(a).exit_code == 0);
    REQUIRE(run_pipeline(b).exit_code == 0);
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(tmp.path / "a")) {
        if (!e.is_regular_file()) continue;
        ++n;
        CHECK(slurp(e.path()) == slurp(tmp.path / "b" / fs::relative(e.path(), tmp.path / "a")));
    }
    CHECK(n >= 10);
    CHECK(fs::exists(tmp.path / "a" / "subsamples_linear_t.csv"));
    CHECK(fs::exists(tmp.path / "a" / "fits" / "linear_t__bidder0__full.csv"));
}

TEST_CASE("end-to-end signs", "[pipeline]") {
    TempDir tmp("signs");
    const auto res = run_pipeline(small_sim(3000, tmp.path));
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.tables.size() == 1);
    for (const auto& b : res.tables[0].bidders) {
        REQUIRE(b.full);
        CHECK(b.full->location[1]->estimate > 0.0);
        CHECK(b.full->location[2]->estimate < 0.0);
        CHECK(b.full->scale[2]->estimate < 0.0);
        REQUIRE(b.comparison);
        CHECK(b.comparison->lr_chi2 > 0.0);
    }
    const auto summary = slurp(tmp.path / "summary.txt");
    CHECK_FALSE(summary.empty());
}

TEST_CASE("unknown bidder yields an empty panel", "[pipeline]") {
    TempDir tmp("unknown");
    auto cfg = small_sim(300, tmp.path);
    cfg.bidders = {"bidder0", "0xnobody"};
    const auto res = run_pipeline(cfg);
    CHECK(res.exit_code == 0);
    REQUIRE(res.tables[0].bidders.size() == 2);
    CHECK_FALSE(res.tables[0].bidders[1].full);
    bool warned = false;
    for (const auto& w : res.warnings) warned = warned || w.find("0xnobody") != std::string::npos;
    CHECK(warned);
    CHECK(slurp(tmp.path / "table_linear_t.tex").find("Bidder 0xnobody") != std::string::npos);
}

TEST_CASE("fit failures go to a manifest and set the exit code", "[pipeline]") {
    TempDir tmp("fail");
    SimConfig sc;
    sc.n_rounds = 400;
    auto data = simulate_rounds(sc).data;
    for (auto& r : data.rows) {
        if (r.bidder != "bidder1") continue;
        r.censored = true;
        r.bid_scaled = 1.0;
    }
    const auto path = tmp.path / "dataset.in.csv";
    std::ofstream(path) << dataset_to_string(data);

    RunConfig cfg;
    cfg.dataset_path = path.string();
    cfg.out_dir = (tmp.path / "out").string();
    cfg.fit.starts = 1;
    const auto res = run_pipeline(cfg);
    CHECK(res.exit_code == 2);
    REQUIRE_FALSE(res.failures.empty());
    for (const auto& f : res.failures) CHECK(f.bidder == "bidder1");
    const auto manifest = slurp(tmp.path / "out" / "failures.csv");
    CHECK(manifest.find("bidder1") != std::string::npos);
    CHECK(res.tables[0].bidders[0].full);
}

TEST_CASE("lagged features", "[pipeline]") {
    RoundDataset d;
    d.rows.push_back({4, "a", 2.0, false, 10.0, 5.0, 400.0, 0});
    d.rows.push_back({5, "a", 3.0, false, 20.0, 6.0, 100.0, 60000});
    d.rows.push_back({5, "b", 1.0, true, 20.0, 6.0, 100.0, 60000});
    d.rows.push_back({7, "a", 3.0, false, 30.0, 7.0, 100.0, 180000});
    std::size_t dropped = 0;
    const auto l = lag_features(d, &dropped);
    CHECK(dropped == 2);
    REQUIRE(l.size() == 2);
    // x1 = E[IV]/sqrt(P): carry round 4's E[IV] to round 5's price
    CHECK(l.rows[0].x1 == 20.0);
    CHECK(l.rows[0].x2 == 5.0);
    CHECK(l.rows[1].bidder == "b");
    CHECK(l.rows[1].bid_scaled == 1.0);
}

TEST_CASE("run configuration from key = value text", "[pipeline]") {
    std::istringstream in(
        "simulate = true\nn_rounds = 77\nforms = linear,loglog\nfamilies = t,gauss\nT = 30\nL = 3\n"
        "lagged = true\nregime = true\nstarts = 3\nbidder_filter = x,y\n");
    const auto c = run_config_from(KeyValueConfig::parse(in));
    CHECK(c.simulate);
    CHECK(c.sim.n_rounds == 77);
    CHECK(c.specs.size() == 4);
    CHECK(c.T == 30);
    CHECK(c.L == 3);
    CHECK(c.lagged);
    CHECK(c.regime);
    CHECK(c.fit.starts == 3);
    CHECK(c.bidders == std::vector<std::string>{"x", "y"});
    CHECK(spec_tag(c.specs.back(), true) == "loglog_gauss_lagged");

    CHECK_THROWS_AS(parse_form("quadratic"), ConfigError);
    CHECK(parse_family("student_t") == Family::student_t);
    CHECK(parse_family("gaussian") == Family::gaussian);
}
