#pragma once

// Success/recovery comparison table across agent arms and environments.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "eils/config.hpp"
#include "eils/metrics.hpp"
#include "eils/records.hpp"

namespace eils {

struct ComparisonRow {
    env::EnvKind env = env::EnvKind::dynamic_cartpole;
    AgentArm agent = AgentArm::eils_full;
    metrics::MetricsSummary summary;
    bool complete = true;
};

/// One row per (config, records) pair; each config names its env and agent.
[[nodiscard]] std::vector<ComparisonRow> compare_arms(
    const std::vector<std::pair<ExperimentConfig, std::vector<RunRecord>>>& runs);

/// Rows for every records_{env}_{agent}.csv found in `dir`, in a fixed
/// env/agent order. `base` supplies shift episodes and metric windows.
[[nodiscard]] std::vector<ComparisonRow> compare_directory(const std::filesystem::path& dir, const ExperimentConfig& base);

void write_summary_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path);
[[nodiscard]] std::string format_table(const std::vector<ComparisonRow>& rows);

}  // namespace eils
