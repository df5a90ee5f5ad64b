#pragma once

// Recovery, success, coverage and reversal-speed metrics, per seed and
// aggregated across seeds.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "eils/config.hpp"
#include "eils/envs.hpp"
#include "eils/records.hpp"

namespace eils::metrics {

/// Episodes after `shift` until the trailing `window` mean of post-shift
/// returns first reaches `threshold`, counted inclusively: a run that is good
/// from the shift onwards recovers in exactly `window` episodes. nullopt means
/// not recovered. Throws std::out_of_range if `shift` is past the data.
[[nodiscard]] std::optional<std::size_t> recovery_time(std::span<const double> returns, std::size_t shift,
                                                       double threshold = 195.0, std::size_t window = 100);

/// Episodes after the rule flip until the trailing `window` mean of post-flip
/// returns is strictly positive; same counting convention as recovery_time.
[[nodiscard]] std::optional<std::size_t> reversal_speed(std::span<const double> returns, std::size_t flip,
                                                        std::size_t window = 50);

[[nodiscard]] double coverage_percent(const std::set<env::GridCell>& visited, const env::MazeConfig& cfg);

struct Rate {
    double percent = 0.0;
    bool partial_window = false;  // fewer episodes than the requested window
};

/// Percentage of the final `window` episodes that reached the goal.
[[nodiscard]] Rate maze_success_rate(std::span<const double> returns, std::size_t window = 100);
/// Percentage of post-shift episodes whose return is at least `threshold`.
[[nodiscard]] Rate cartpole_success_rate(std::span<const double> returns, std::size_t shift, double threshold = 195.0);
/// Percentage of the final `window` episodes with positive return.
[[nodiscard]] Rate reversal_success_rate(std::span<const double> returns, std::size_t window = 100);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // population
};

[[nodiscard]] MeanStd mean_std(std::span<const double> values);
[[nodiscard]] double median(std::vector<double> values);

struct SeedMetrics {
    std::uint64_t seed = 0;
    std::size_t episodes = 0;
    Rate success;
    double coverage = 0.0;                     // final coverage column value
    std::optional<std::size_t> recovery;       // cartpole
    std::optional<std::size_t> reversal;       // reversal
};

struct MetricsSummary {
    env::EnvKind env = env::EnvKind::dynamic_cartpole;
    AgentArm agent = AgentArm::eils_full;
    std::vector<SeedMetrics> per_seed;
    MeanStd success;
    MeanStd coverage;
    std::size_t recovered = 0;                 // seeds with a recovery / reversal time
    std::optional<double> median_recovery;     // over recovered seeds
    bool complete = true;
    bool partial_window = false;
};

/// Summary for records of a single (env, agent) run. `complete` is false when
/// seeds hold differing or gappy episode ranges.
[[nodiscard]] MetricsSummary summarize(const std::vector<RunRecord>& records, const ExperimentConfig& cfg);

[[nodiscard]] std::string format_recovery(const MetricsSummary& s);

}  // namespace eils::metrics
