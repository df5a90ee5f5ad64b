#include "eils/envs.hpp"

#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace eils::env {

std::string_view to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::dynamic_cartpole: return "dynamic-cartpole";
        case EnvKind::sparse_maze: return "sparse-maze";
        case EnvKind::reversal: return "reversal";
    }
    return "unknown";
}

EnvKind parse_env_kind(std::string_view name) {
    if (name == "dynamic-cartpole") return EnvKind::dynamic_cartpole;
    if (name == "sparse-maze") return EnvKind::sparse_maze;
    if (name == "reversal") return EnvKind::reversal;
    throw std::invalid_argument("unknown environment: " + std::string(name));
}

GridCell grid_move(GridCell cell, std::size_t action) {
    switch (static_cast<MazeAction>(action)) {
        case MazeAction::up: --cell.y; break;
        case MazeAction::down: ++cell.y; break;
        case MazeAction::left: --cell.x; break;
        case MazeAction::right: ++cell.x; break;
        default: throw std::invalid_argument("grid action out of range: " + std::to_string(action));
    }
    return cell;
}

// ---------------------------------------------------------------------------

void CartPoleConfig::validate() const {
    const double positive[] = {gravity, pole_mass, cart_mass, pole_half_length, force_magnitude,
                               timestep, angle_limit, position_limit, shifted_gravity, shifted_pole_mass};
    for (double v : positive) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("cartpole: physical quantities must be positive");
    }
    if (max_steps == 0) throw std::invalid_argument("cartpole: max_steps must be positive");
}

double cartpole_reward(const CartState& s, const CartPoleConfig& cfg) {
    return (std::abs(s[2]) < cfg.angle_limit && std::abs(s[0]) < cfg.position_limit) ? 1.0 : 0.0;
}

CartPoleTransition cartpole_step(const CartState& s, std::size_t action, const CartPoleConfig& cfg) {
    if (action > 1) throw std::invalid_argument("cartpole action must be 0 or 1");
    const double force = action == 1 ? cfg.force_magnitude : -cfg.force_magnitude;
    const double total_mass = cfg.cart_mass + cfg.pole_mass;
    const double pole_mass_length = cfg.pole_mass * cfg.pole_half_length;
    const double cos_t = std::cos(s[2]);
    const double sin_t = std::sin(s[2]);

    const double temp = (force + pole_mass_length * s[3] * s[3] * sin_t) / total_mass;
    const double theta_acc = (cfg.gravity * sin_t - cos_t * temp) /
                             (cfg.pole_half_length * (4.0 / 3.0 - cfg.pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

    CartPoleTransition t;
    t.next = s;
    t.next[1] += cfg.timestep * x_acc;
    t.next[0] += cfg.timestep * t.next[1];
    t.next[3] += cfg.timestep * theta_acc;
    t.next[2] += cfg.timestep * t.next[3];
    t.reward = cartpole_reward(t.next, cfg);
    t.done = t.reward == 0.0;
    return t;
}

CartPoleConfig apply_phase_shift(const CartPoleConfig& cfg, std::size_t episode) {
    CartPoleConfig out = cfg;
    if (episode >= cfg.shift_episode) {
        out.gravity = cfg.shifted_gravity;
        out.pole_mass = cfg.shifted_pole_mass;
    }
    return out;
}

CartPoleEnv::CartPoleEnv(CartPoleConfig cfg) : base_(cfg), active_(cfg) { base_.validate(); }

void CartPoleEnv::begin_episode(std::size_t episode) {
    active_ = apply_phase_shift(base_, episode);
    phase_ = episode >= base_.shift_episode ? 2 : 1;
}

Observation CartPoleEnv::reset(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (double& v : state_) v = dist(rng);
    steps_ = 0;
    return {state_.begin(), state_.end()};
}

StepResult CartPoleEnv::step(std::size_t action) {
    const auto t = cartpole_step(state_, action, active_);
    state_ = t.next;
    ++steps_;
    StepResult r;
    r.observation.assign(state_.begin(), state_.end());
    r.reward = t.reward;
    r.terminated = t.done;
    r.truncated = !t.done && steps_ >= active_.max_steps;
    return r;
}

// ---------------------------------------------------------------------------

std::size_t MazeConfig::open_cell_count() const {
    std::size_t walls_inside = 0;
    for (const auto& w : walls) walls_inside += inside(w) ? 1 : 0;
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) - walls_inside;
}

void MazeConfig::validate() const {
    if (width < 2 || height < 2) throw std::invalid_argument("maze: grid must be at least 2x2");
    if (max_steps == 0) throw std::invalid_argument("maze: max_steps must be positive");
    if (start == goal) throw std::invalid_argument("maze: start and goal coincide");
    if (!inside(start) || !inside(goal)) throw std::invalid_argument("maze: start/goal outside the grid");
    if (is_wall(start) || is_wall(goal)) throw std::invalid_argument("maze: start/goal on a wall");

    std::vector<char> seen(static_cast<std::size_t>(width * height), 0);
    std::queue<GridCell> frontier;
    frontier.push(start);
    seen[static_cast<std::size_t>(start.y * width + start.x)] = 1;
    while (!frontier.empty()) {
        const GridCell c = frontier.front();
        frontier.pop();
        if (c == goal) return;
        for (std::size_t a = 0; a < 4; ++a) {
            const GridCell n = grid_move(c, a);
            if (!inside(n) || is_wall(n)) continue;
            auto& flag = seen[static_cast<std::size_t>(n.y * width + n.x)];
            if (flag) continue;
            flag = 1;
            frontier.push(n);
        }
    }
    throw std::invalid_argument("maze: goal unreachable from start");
}

std::set<GridCell> load_wall_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open wall file: " + path.string());
    std::set<GridCell> walls;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        GridCell c;
        char comma = 0;
        if (!(ss >> c.x >> comma >> c.y) || comma != ',') {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected x,y");
        }
        walls.insert(c);
    }
    return walls;
}

MazeTransition maze_step(GridCell cell, std::size_t action, const MazeConfig& cfg) {
    MazeTransition t;
    const GridCell moved = grid_move(cell, action);
    t.next = (cfg.inside(moved) && !cfg.is_wall(moved)) ? moved : cell;
    t.done = t.next == cfg.goal;
    t.reward = t.done ? 1.0 : 0.0;
    return t;
}

MazeEnv::MazeEnv(MazeConfig cfg) : cfg_(std::move(cfg)), cell_(cfg_.start) { cfg_.validate(); }

Observation MazeEnv::observe() const {
    return {static_cast<double>(cell_.x) / (cfg_.width - 1), static_cast<double>(cell_.y) / (cfg_.height - 1)};
}

Observation MazeEnv::reset(std::uint64_t) {
    cell_ = cfg_.start;
    steps_ = 0;
    return observe();
}

StepResult MazeEnv::step(std::size_t action) {
    const auto t = maze_step(cell_, action, cfg_);
    cell_ = t.next;
    ++steps_;
    StepResult r;
    r.observation = observe();
    r.reward = t.reward;
    r.terminated = t.done;
    r.truncated = !t.done && steps_ >= cfg_.max_steps;
    return r;
}

// ---------------------------------------------------------------------------

void ReversalConfig::validate() const {
    if (width < 2 || height < 2) throw std::invalid_argument("reversal: grid must be at least 2x2");
    if (max_steps == 0) throw std::invalid_argument("reversal: max_steps must be positive");
    for (GridCell c : {start, red_key, blue_key, door}) {
        if (!inside(c)) throw std::invalid_argument("reversal: object outside the grid");
    }
    if (red_key == blue_key || red_key == door || blue_key == door) {
        throw std::invalid_argument("reversal: keys and door must occupy distinct cells");
    }
    if (start == red_key || start == blue_key || start == door) {
        throw std::invalid_argument("reversal: start cell must be empty");
    }
    if (phase2_red != phase1_blue || phase2_blue != phase1_red) {
        throw std::invalid_argument("reversal: phase-2 rewards must swap the phase-1 key values");
    }
}

KeyRewards reversal_rewards(const ReversalConfig& cfg, int phase) {
    return phase == 2 ? KeyRewards{cfg.phase2_red, cfg.phase2_blue} : KeyRewards{cfg.phase1_red, cfg.phase1_blue};
}

ReversalTransition reversal_step(const ReversalState& s, std::size_t action, const ReversalConfig& cfg, int phase) {
    ReversalTransition t;
    t.next = s;
    const GridCell moved = grid_move(s.cell, action);
    if (cfg.inside(moved)) t.next.cell = moved;
    const auto rewards = reversal_rewards(cfg, phase);
    if (t.next.cell == cfg.red_key && !t.next.has_red) {
        t.next.has_red = true;
        t.reward = rewards.red;
    } else if (t.next.cell == cfg.blue_key && !t.next.has_blue) {
        t.next.has_blue = true;
        t.reward = rewards.blue;
    }
    t.done = t.next.cell == cfg.door;
    return t;
}

ReversalEnv::ReversalEnv(ReversalConfig cfg) : cfg_(cfg), state_{cfg.start} { cfg_.validate(); }

void ReversalEnv::begin_episode(std::size_t episode) { phase_ = episode >= cfg_.flip_episode ? 2 : 1; }

Observation ReversalEnv::observe() const {
    return {static_cast<double>(state_.cell.x) / (cfg_.width - 1),
            static_cast<double>(state_.cell.y) / (cfg_.height - 1),
            state_.has_red ? 1.0 : 0.0,
            state_.has_blue ? 1.0 : 0.0,
            state_.has_red ? 0.0 : 1.0,
            state_.has_blue ? 0.0 : 1.0};
}

Observation ReversalEnv::reset(std::uint64_t) {
    state_ = ReversalState{cfg_.start};
    steps_ = 0;
    return observe();
}

StepResult ReversalEnv::step(std::size_t action) {
    const auto t = reversal_step(state_, action, cfg_, phase_);
    state_ = t.next;
    ++steps_;
    StepResult r;
    r.observation = observe();
    r.reward = t.reward;
    r.terminated = t.done;
    r.truncated = !t.done && steps_ >= cfg_.max_steps;
    return r;
}

}  // namespace eils::env
