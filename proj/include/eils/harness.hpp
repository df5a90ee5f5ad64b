#pragma once

// Training loop: collect a rollout while stepping the internal state and the
// modulated hyperparameters every environment step, then run the PPO update
// with the hyperparameters in force at rollout end, then train the forward
// model.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "eils/config.hpp"
#include "eils/envs.hpp"
#include "eils/metrics.hpp"
#include "eils/records.hpp"

namespace eils {

enum class LoopEvent { ism_step, modulate, ppo_update, dynamics_update };

struct LoopHooks {
    /// Called with each stage as it happens; used to check call ordering.
    std::function<void(LoopEvent)> on_event;
    /// Called after every PPO update with the hyperparameters it used.
    std::function<void(const modulation::HyperparamSet&, const ppo::UpdateStats&)> on_update;
};

struct SeedResult {
    std::uint64_t seed = 0;
    std::vector<RunRecord> records;
    VisitCounts visits;
    std::size_t aborted_updates = 0;
    std::size_t skipped_dynamics_updates = 0;
    double curiosity_setpoint = 0.0;
};

struct ExperimentResult {
    std::vector<RunRecord> records;  // seed-list order, then episode order
    std::vector<SeedResult> seeds;   // records moved out into `records`
    VisitCounts visits;
    metrics::MetricsSummary summary;
    std::size_t aborted_updates = 0;
};

[[nodiscard]] std::unique_ptr<env::Environment> make_environment(const ExperimentConfig& cfg);

/// Deterministic stream seed for a purpose tag within one run seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// One seed, single-threaded. Throws ConfigError on an invalid config.
[[nodiscard]] SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const LoopHooks& hooks = {});

/// All seeds of `cfg`, fanned out over `cfg.jobs` worker threads and merged in
/// seed-list order.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& cfg);

[[nodiscard]] std::string records_filename(env::EnvKind env, AgentArm agent);
[[nodiscard]] std::string visits_filename(env::EnvKind env, AgentArm agent);

/// Writes records_{env}_{agent}.csv, visits for grid environments, and
/// config_echo.ini into cfg.out_dir.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace eils
