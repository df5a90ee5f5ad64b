#include <stdexcept>
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "eils/config.hpp"
#include "eils/metrics.hpp"

using namespace eils;
using namespace eils::metrics;

namespace {

std::optional<std::size_t> brute_recovery(const std::vector<double>& r, std::size_t shift, double thr,
                                          std::size_t window) {
    for (std::size_t e = shift; e < r.size(); ++e) {
        if (e + 1 < shift + window) continue;
        double sum = 0.0;
        for (std::size_t k = e + 1 - window; k <= e; ++k) sum += r[k];
        if (sum / static_cast<double>(window) >= thr) return e + 1 - shift;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("recovery: always good, never good") {
    std::vector<double> good(1000, 200.0);
    CHECK(recovery_time(good, 500) == std::optional<std::size_t>(100));
    std::vector<double> bad(1000, 200.0);
    for (std::size_t e = 500; e < 1000; ++e) bad[e] = 0.0;
    CHECK_FALSE(recovery_time(bad, 500).has_value());
    CHECK_THROWS_AS((void)recovery_time(good, 1000), std::out_of_range);
}

TEST_CASE("recovery: synthetic dip matches a brute-force scan") {
    std::vector<double> r(1000, 200.0);
    for (std::size_t e = 500; e < 550; ++e) r[e] = 10.0;
    const auto expected = brute_recovery(r, 500, 195.0, 100);
    REQUIRE(expected.has_value());
    CHECK(recovery_time(r, 500) == expected);
    // The trailing mean first reaches 195 once at most two dip episodes remain in the window.
    CHECK(*expected == 148);
}

TEST_CASE("recovery: random traces agree with the brute-force scan") {
    std::vector<double> r(700);
    for (std::size_t trial = 0; trial < 50; ++trial) {
        for (std::size_t e = 0; e < r.size(); ++e) r[e] = 190.0 + static_cast<double>((e * 7919 + trial * 104729) % 11);
        CHECK(recovery_time(r, 300, 195.0, 100) == brute_recovery(r, 300, 195.0, 100));
    }
}

TEST_CASE("reversal speed uses a strict positive threshold") {
    std::vector<double> r(400, 10.0);
    for (std::size_t e = 300; e < 320; ++e) r[e] = -1.0;
    for (std::size_t e = 320; e < 400; ++e) r[e] = 0.0;
    CHECK_FALSE(reversal_speed(r, 300).has_value());
    for (std::size_t e = 350; e < 400; ++e) r[e] = 9.0;
    const auto t = reversal_speed(r, 300);
    REQUIRE(t.has_value());
    CHECK(*t == 50 + 3);
}

TEST_CASE("coverage examples") {
    const env::MazeConfig cfg;
    CHECK(coverage_percent({{0, 0}}, cfg) == doctest::Approx(0.25));
    std::set<env::GridCell> all;
    for (int x = 0; x < 20; ++x) {
        for (int y = 0; y < 20; ++y) all.insert({x, y});
    }
    CHECK(coverage_percent(all, cfg) == doctest::Approx(100.0));
    // Snake path over rows 0..9 touches exactly half the grid.
    std::set<env::GridCell> snake;
    env::GridCell c{0, 0};
    snake.insert(c);
    for (int row = 0; row < 10; ++row) {
        const std::size_t dir = row % 2 == 0 ? 3 : 2;
        for (int k = 0; k < 19; ++k) snake.insert(c = env::grid_move(c, dir));
        if (row < 9) snake.insert(c = env::grid_move(c, 1));
    }
    CHECK(coverage_percent(snake, cfg) == doctest::Approx(50.0));
}

TEST_CASE("success rates") {
    std::vector<double> maze(300, 0.0);
    for (std::size_t e = 200; e < 300; ++e) maze[e] = 1.0;
    CHECK(maze_success_rate(maze).percent == 100.0);
    CHECK(maze_success_rate(std::vector<double>(300, 0.0)).percent == 0.0);
    const auto partial = maze_success_rate(std::vector<double>{1.0, 0.0});
    CHECK(partial.partial_window);
    CHECK(partial.percent == 50.0);
    std::vector<double> cart(1000, 200.0);
    for (std::size_t e = 500; e < 600; ++e) cart[e] = 20.0;
    CHECK(cartpole_success_rate(cart, 500).percent == doctest::Approx(80.0));
    std::vector<double> rev(400, -1.0);
    for (std::size_t e = 350; e < 400; ++e) rev[e] = 10.0;
    CHECK(reversal_success_rate(rev).percent == doctest::Approx(50.0));
}

TEST_CASE("population mean and std across seeds") {
    const std::vector<double> v{80, 90, 100, 85, 95};
    const auto ms = mean_std(v);
    CHECK(ms.mean == doctest::Approx(90.0));
    CHECK(ms.std == doctest::Approx(std::sqrt(50.0)));
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("summaries from records") {
    ExperimentConfig cfg;
    cfg.cartpole.shift_episode = 10;
    cfg.metrics.recovery_window = 5;
    std::vector<RunRecord> rs;
    for (std::uint64_t s : {0u, 1u}) {
        for (std::size_t e = 0; e < 30; ++e) {
            RunRecord r;
            r.seed = s;
            r.episode = e;
            r.episode_return = (s == 1 && e >= 10) ? 5.0 : 200.0;
            rs.push_back(r);
        }
    }
    const auto sum = summarize(rs, cfg);
    REQUIRE(sum.per_seed.size() == 2);
    CHECK(sum.per_seed[0].recovery == std::optional<std::size_t>(5));
    CHECK_FALSE(sum.per_seed[1].recovery.has_value());
    CHECK(sum.recovered == 1);
    CHECK(sum.complete);
    CHECK(sum.success.mean == doctest::Approx(50.0));
    CHECK(format_recovery(sum).find("1/2") != std::string::npos);

    rs.pop_back();
    CHECK_FALSE(summarize(rs, cfg).complete);
}
