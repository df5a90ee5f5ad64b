#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eils/envs.hpp"
#include "eils/ism.hpp"
#include "eils/modulation.hpp"
#include "eils/ppo.hpp"

namespace eils {

/// Raised for invalid experiment configuration; the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AgentArm { ppo_baseline, eils_full, eils_ablated };

[[nodiscard]] std::string_view to_string(AgentArm arm);
[[nodiscard]] AgentArm parse_agent_arm(std::string_view name);

struct MetricsConfig {
    double recovery_threshold = 195.0;
    std::size_t recovery_window = 100;
    std::size_t success_window = 100;
    std::size_t reversal_window = 50;
    /// Trailing episodes whose visited cells make up the coverage column; 0
    /// accumulates over the whole run.
    std::size_t coverage_window = 100;
};

struct ExperimentConfig {
    env::EnvKind env = env::EnvKind::dynamic_cartpole;
    AgentArm agent = AgentArm::eils_full;
    std::size_t episodes = 1000;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    /// Worker threads for the per-seed fan-out; 0 picks the hardware concurrency.
    std::size_t jobs = 0;

    ppo::PpoConfig ppo;
    ism::IsmConfig ism;
    modulation::ModulationConfig modulation;
    /// Fixed curiosity setpoint; calibrated from early impulses when empty.
    std::optional<double> curiosity_setpoint;
    double dynamics_lr = 1e-3;

    env::CartPoleConfig cartpole;
    env::MazeConfig maze;
    std::optional<std::filesystem::path> maze_wall_file;
    env::ReversalConfig reversal;

    MetricsConfig metrics;
    std::filesystem::path out_dir = "out";

    /// Throws ConfigError.
    void validate() const;
    /// Modulation settings for this arm with base lr/clip taken from the PPO config.
    [[nodiscard]] modulation::ModulationConfig arm_modulation() const;
    /// Episode at which the environment changes regime, if it has one.
    [[nodiscard]] std::optional<std::size_t> regime_change_episode() const;
};

/// Overlays an INI file (sections experiment, ppo, ism, modulation, dynamics,
/// cartpole, maze, reversal, metrics) onto `base`. Throws ConfigError on unknown
/// keys or unparsable values.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
[[nodiscard]] ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
void write_config(std::ostream& out, const ExperimentConfig& cfg);

[[nodiscard]] std::vector<std::uint64_t> parse_seed_list(std::string_view text);

}  // namespace eils
