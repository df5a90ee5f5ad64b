#include "eils/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace eils::metrics {

namespace {

// First index e >= start + window - 1 whose trailing window (all at or after
// `start`) satisfies `pred(mean)`.
template <typename Pred>
std::optional<std::size_t> first_window(std::span<const double> returns, std::size_t start, std::size_t window,
                                        Pred pred) {
    if (window == 0) throw std::invalid_argument("window must be positive");
    if (start >= returns.size()) throw std::out_of_range("regime change lies beyond the recorded episodes");
    double sum = 0.0;
    for (std::size_t e = start; e < returns.size(); ++e) {
        sum += returns[e];
        if (e >= start + window) sum -= returns[e - window];
        if (e + 1 >= start + window && pred(sum / static_cast<double>(window))) return e + 1 - start;
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::size_t> recovery_time(std::span<const double> returns, std::size_t shift, double threshold,
                                         std::size_t window) {
    return first_window(returns, shift, window, [threshold](double m) { return m >= threshold; });
}

std::optional<std::size_t> reversal_speed(std::span<const double> returns, std::size_t flip, std::size_t window) {
    return first_window(returns, flip, window, [](double m) { return m > 0.0; });
}

double coverage_percent(const std::set<env::GridCell>& visited, const env::MazeConfig& cfg) {
    std::size_t open_visited = 0;
    for (const auto& c : visited) open_visited += (cfg.inside(c) && !cfg.is_wall(c)) ? 1 : 0;
    return 100.0 * static_cast<double>(open_visited) / static_cast<double>(cfg.open_cell_count());
}

Rate maze_success_rate(std::span<const double> returns, std::size_t window) {
    Rate r;
    if (returns.empty()) return r;
    r.partial_window = returns.size() < window;
    const auto tail = returns.last(std::min(window, returns.size()));
    const auto hits = std::count_if(tail.begin(), tail.end(), [](double v) { return v > 0.0; });
    r.percent = 100.0 * static_cast<double>(hits) / static_cast<double>(tail.size());
    return r;
}

Rate cartpole_success_rate(std::span<const double> returns, std::size_t shift, double threshold) {
    Rate r;
    if (shift >= returns.size()) {
        r.partial_window = true;
        return r;
    }
    const auto post = returns.subspan(shift);
    const auto hits = std::count_if(post.begin(), post.end(), [threshold](double v) { return v >= threshold; });
    r.percent = 100.0 * static_cast<double>(hits) / static_cast<double>(post.size());
    return r;
}

Rate reversal_success_rate(std::span<const double> returns, std::size_t window) {
    return maze_success_rate(returns, window);
}

MeanStd mean_std(std::span<const double> values) {
    MeanStd m;
    if (values.empty()) return m;
    m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / static_cast<double>(values.size()));
    return m;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MetricsSummary summarize(const std::vector<RunRecord>& records, const ExperimentConfig& cfg) {
    MetricsSummary s;
    s.env = cfg.env;
    s.agent = cfg.agent;
    std::vector<double> successes;
    std::vector<double> coverages;
    std::vector<double> times;
    std::size_t expected_episodes = 0;

    for (const auto seed : seeds_in(records)) {
        const auto rs = records_for_seed(records, seed);
        const auto returns = returns_of(rs);
        SeedMetrics m;
        m.seed = seed;
        m.episodes = rs.size();
        for (std::size_t i = 0; i < rs.size(); ++i) {
            if (rs[i].episode != i) s.complete = false;
        }
        if (expected_episodes == 0) expected_episodes = rs.size();
        if (rs.size() != expected_episodes) s.complete = false;
        m.coverage = rs.empty() ? 0.0 : rs.back().coverage;

        const auto change = cfg.regime_change_episode();
        switch (cfg.env) {
            case env::EnvKind::dynamic_cartpole:
                m.success = cartpole_success_rate(returns, *change, cfg.metrics.recovery_threshold);
                if (*change < returns.size()) {
                    m.recovery = recovery_time(returns, *change, cfg.metrics.recovery_threshold, cfg.metrics.recovery_window);
                }
                break;
            case env::EnvKind::sparse_maze: m.success = maze_success_rate(returns, cfg.metrics.success_window); break;
            case env::EnvKind::reversal:
                m.success = reversal_success_rate(returns, cfg.metrics.success_window);
                if (*change < returns.size()) m.reversal = reversal_speed(returns, *change, cfg.metrics.reversal_window);
                break;
        }
        s.partial_window = s.partial_window || m.success.partial_window;
        successes.push_back(m.success.percent);
        coverages.push_back(m.coverage);
        const auto time = m.recovery ? m.recovery : m.reversal;
        if (time) times.push_back(static_cast<double>(*time));
        s.per_seed.push_back(m);
    }
    if (s.per_seed.empty()) s.complete = false;
    s.success = mean_std(successes);
    s.coverage = mean_std(coverages);
    s.recovered = times.size();
    if (!times.empty()) s.median_recovery = median(times);
    return s;
}

std::string format_recovery(const MetricsSummary& s) {
    if (s.env == env::EnvKind::sparse_maze) return "-";
    if (!s.median_recovery) return "N/A (failed)";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f (%zu/%zu)", *s.median_recovery, s.recovered, s.per_seed.size());
    return buf;
}

}  // namespace eils::metrics
