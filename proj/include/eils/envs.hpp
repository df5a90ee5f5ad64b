#pragma once

// Benchmark environments: Dynamic CartPole (mid-run physics shift), Sparse Maze
// (single sparse goal) and the Key-Door reversal task (reward rule flip).

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eils::env {

using Observation = std::vector<double>;

struct GridCell {
    int x = 0;
    int y = 0;
    auto operator<=>(const GridCell&) const = default;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;  // true terminal state: no bootstrapping past it
    bool truncated = false;   // step cap reached
    [[nodiscard]] bool done() const { return terminated || truncated; }
};

enum class EnvKind { dynamic_cartpole, sparse_maze, reversal };

[[nodiscard]] std::string_view to_string(EnvKind kind);
[[nodiscard]] EnvKind parse_env_kind(std::string_view name);

class Environment {
public:
    virtual ~Environment() = default;

    [[nodiscard]] virtual std::size_t observation_dim() const = 0;
    [[nodiscard]] virtual std::size_t action_count() const = 0;

    /// Called before each episode's reset; environments with a schedule (physics
    /// shift, rule flip) switch regime here.
    virtual void begin_episode(std::size_t episode) = 0;
    virtual Observation reset(std::uint64_t seed) = 0;
    virtual StepResult step(std::size_t action) = 0;

    /// Phase id of the current episode (1 before a shift/flip, 2 after).
    [[nodiscard]] virtual int phase() const = 0;
    /// Agent cell for grid environments.
    [[nodiscard]] virtual std::optional<GridCell> agent_cell() const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Dynamic CartPole

using CartState = std::array<double, 4>;  // x, x_dot, theta, theta_dot

struct CartPoleConfig {
    double gravity = 9.8;
    double pole_mass = 0.1;
    double cart_mass = 1.0;
    double pole_half_length = 0.5;
    double force_magnitude = 10.0;
    double timestep = 0.02;
    double angle_limit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
    double position_limit = 2.4;
    std::size_t max_steps = 200;
    std::size_t shift_episode = 500;
    double shifted_gravity = 30.0;
    double shifted_pole_mass = 0.2;

    void validate() const;
};

struct CartPoleTransition {
    CartState next;
    double reward = 0.0;
    bool done = false;
};

/// 1.0 while the pole angle and the cart position are inside their limits.
[[nodiscard]] double cartpole_reward(const CartState& state, const CartPoleConfig& cfg);
/// One semi-implicit Euler step of the cart-pole equations of motion.
[[nodiscard]] CartPoleTransition cartpole_step(const CartState& state, std::size_t action,
                                               const CartPoleConfig& cfg);
[[nodiscard]] CartPoleConfig apply_phase_shift(const CartPoleConfig& cfg, std::size_t episode);

class CartPoleEnv final : public Environment {
public:
    explicit CartPoleEnv(CartPoleConfig cfg = {});

    [[nodiscard]] std::size_t observation_dim() const override { return 4; }
    [[nodiscard]] std::size_t action_count() const override { return 2; }
    void begin_episode(std::size_t episode) override;
    Observation reset(std::uint64_t seed) override;
    StepResult step(std::size_t action) override;
    [[nodiscard]] int phase() const override { return phase_; }

    [[nodiscard]] const CartPoleConfig& base_config() const { return base_; }
    [[nodiscard]] const CartPoleConfig& active_config() const { return active_; }
    [[nodiscard]] const CartState& state() const { return state_; }

private:
    CartPoleConfig base_;
    CartPoleConfig active_;
    CartState state_{};
    std::size_t steps_ = 0;
    int phase_ = 1;
};

// ---------------------------------------------------------------------------
// Sparse Maze

enum class MazeAction : std::size_t { up = 0, down = 1, left = 2, right = 3 };

struct MazeConfig {
    int width = 20;
    int height = 20;
    GridCell start{0, 0};
    GridCell goal{19, 19};
    std::set<GridCell> walls;
    std::size_t max_steps = 400;

    [[nodiscard]] bool inside(GridCell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
    [[nodiscard]] bool is_wall(GridCell c) const { return walls.contains(c); }
    [[nodiscard]] std::size_t open_cell_count() const;
    void validate() const;
};

/// Reads `x,y` pairs, one per line; blank lines and `#` comments are skipped.
[[nodiscard]] std::set<GridCell> load_wall_file(const std::filesystem::path& path);

struct MazeTransition {
    GridCell next;
    double reward = 0.0;
    bool done = false;
};

/// Grid move with wall/boundary blocking; reaching the goal pays 1 and ends the
/// episode. The step cap is enforced by MazeEnv.
[[nodiscard]] MazeTransition maze_step(GridCell cell, std::size_t action, const MazeConfig& cfg);
[[nodiscard]] GridCell grid_move(GridCell cell, std::size_t action);

class MazeEnv final : public Environment {
public:
    explicit MazeEnv(MazeConfig cfg = {});

    [[nodiscard]] std::size_t observation_dim() const override { return 2; }
    [[nodiscard]] std::size_t action_count() const override { return 4; }
    void begin_episode(std::size_t) override {}
    Observation reset(std::uint64_t seed) override;
    StepResult step(std::size_t action) override;
    [[nodiscard]] int phase() const override { return 1; }
    [[nodiscard]] std::optional<GridCell> agent_cell() const override { return cell_; }

    [[nodiscard]] const MazeConfig& config() const { return cfg_; }
    [[nodiscard]] Observation observe() const;

private:
    MazeConfig cfg_;
    GridCell cell_;
    std::size_t steps_ = 0;
};

// ---------------------------------------------------------------------------
// Key-Door reversal

struct ReversalConfig {
    int width = 10;
    int height = 10;
    GridCell start{5, 0};
    GridCell red_key{1, 5};
    GridCell blue_key{9, 5};
    GridCell door{5, 9};
    double phase1_red = 10.0;
    double phase1_blue = -1.0;
    double phase2_red = -1.0;
    double phase2_blue = 10.0;
    std::size_t flip_episode = 300;
    std::size_t max_steps = 100;

    [[nodiscard]] bool inside(GridCell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
    void validate() const;
};

struct ReversalState {
    GridCell cell;
    bool has_red = false;
    bool has_blue = false;
    auto operator<=>(const ReversalState&) const = default;
};

struct KeyRewards {
    double red = 0.0;
    double blue = 0.0;
    auto operator<=>(const KeyRewards&) const = default;
};

[[nodiscard]] KeyRewards reversal_rewards(const ReversalConfig& cfg, int phase);

struct ReversalTransition {
    ReversalState next;
    double reward = 0.0;
    bool done = false;
};

/// Stepping onto an uncollected key collects it and pays that key's reward for
/// the given phase; stepping onto the door ends the episode with reward 0.
[[nodiscard]] ReversalTransition reversal_step(const ReversalState& state, std::size_t action,
                                               const ReversalConfig& cfg, int phase);

class ReversalEnv final : public Environment {
public:
    explicit ReversalEnv(ReversalConfig cfg = {});

    [[nodiscard]] std::size_t observation_dim() const override { return 6; }
    [[nodiscard]] std::size_t action_count() const override { return 4; }
    void begin_episode(std::size_t episode) override;
    Observation reset(std::uint64_t seed) override;
    StepResult step(std::size_t action) override;
    [[nodiscard]] int phase() const override { return phase_; }
    [[nodiscard]] std::optional<GridCell> agent_cell() const override { return state_.cell; }

    [[nodiscard]] const ReversalState& state() const { return state_; }
    [[nodiscard]] Observation observe() const;

private:
    ReversalConfig cfg_;
    ReversalState state_;
    std::size_t steps_ = 0;
    int phase_ = 1;
};

}  // namespace eils::env
