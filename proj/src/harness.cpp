#include "eils/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "eils/dynamics.hpp"
#include "eils/ism.hpp"
#include "eils/modulation.hpp"
#include "eils/nn.hpp"
#include "eils/ppo.hpp"

namespace eils {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

enum SeedTag : std::uint64_t {
    kAgentInit = 1,
    kDynamicsInit = 2,
    kPolicySampling = 3,
    kMinibatchShuffle = 4,
    kEpisodeReset = 1u << 20,
};

// Union of visited cells over the trailing `window` episodes (all episodes when
// window is 0).
class CoverageTracker {
public:
    CoverageTracker(const env::MazeConfig& grid, std::size_t window) : grid_(grid), window_(window) {}

    void visit(env::GridCell c) { current_.insert(c); }

    double close_episode() {
        for (const auto& c : current_) {
            if (counts_[c]++ == 0) ++distinct_;
        }
        history_.push_back(std::move(current_));
        current_.clear();
        if (window_ > 0 && history_.size() > window_) {
            for (const auto& c : history_.front()) {
                if (--counts_[c] == 0) --distinct_;
            }
            history_.erase(history_.begin());
        }
        return 100.0 * static_cast<double>(distinct_) / static_cast<double>(grid_.open_cell_count());
    }

private:
    env::MazeConfig grid_;
    std::size_t window_;
    std::set<env::GridCell> current_;
    std::vector<std::set<env::GridCell>> history_;
    std::map<env::GridCell, std::size_t> counts_;
    std::size_t distinct_ = 0;
};

env::MazeConfig coverage_grid(const ExperimentConfig& cfg) {
    if (cfg.env == env::EnvKind::sparse_maze) return cfg.maze;
    env::MazeConfig g;
    g.width = cfg.reversal.width;
    g.height = cfg.reversal.height;
    return g;
}

struct EpisodeAccumulator {
    double ret = 0.0;
    std::size_t length = 0;
    double sigma = 0.0, kappa = 0.0, phi = 0.0, alpha = 0.0, beta = 0.0, epsilon = 0.0, deficit = 0.0;

    void add(const ism::InternalState& s, const modulation::HyperparamSet& hp, double deficit_value, double reward) {
        ret += reward;
        ++length;
        sigma += s.stress;
        kappa += s.curiosity;
        phi += s.confidence;
        alpha += hp.lr;
        beta += hp.entropy_coef;
        epsilon += hp.clip;
        deficit += deficit_value;
    }

    RunRecord finish(std::uint64_t seed, std::size_t episode, int phase, double coverage) const {
        const double n = static_cast<double>(std::max<std::size_t>(length, 1));
        return RunRecord{seed,      episode,     ret,           length,      sigma / n, kappa / n, phi / n,
                         alpha / n, beta / n,    epsilon / n,   deficit / n, coverage,  phase};
    }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(splitmix64(seed) ^ splitmix64(~tag)); }

std::unique_ptr<env::Environment> make_environment(const ExperimentConfig& cfg) {
    switch (cfg.env) {
        case env::EnvKind::dynamic_cartpole: return std::make_unique<env::CartPoleEnv>(cfg.cartpole);
        case env::EnvKind::sparse_maze: return std::make_unique<env::MazeEnv>(cfg.maze);
        case env::EnvKind::reversal: return std::make_unique<env::ReversalEnv>(cfg.reversal);
    }
    throw ConfigError("unknown environment");
}

SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const LoopHooks& hooks) {
    cfg.validate();
    auto emit = [&hooks](LoopEvent e) {
        if (hooks.on_event) hooks.on_event(e);
    };

    SeedResult result;
    result.seed = seed;
    auto environment = make_environment(cfg);
    const std::size_t obs_dim = environment->observation_dim();
    const std::size_t actions = environment->action_count();
    const bool eils_arm = cfg.agent != AgentArm::ppo_baseline;
    const bool grid_env = cfg.env != env::EnvKind::dynamic_cartpole;

    ppo::AgentNets nets(obs_dim, actions, derive_seed(seed, kAgentInit));
    nn::AdamState agent_opt(nets.net());
    std::optional<dynamics::DynamicsModel> forward_model;
    if (eils_arm) forward_model.emplace(obs_dim, actions, derive_seed(seed, kDynamicsInit), cfg.dynamics_lr);

    ism::InternalStateModule state_module(cfg.ism);
    ism::SetpointCalibrator calibrator(cfg.ism.setpoint_calibration_steps);
    auto mod_cfg = cfg.arm_modulation();
    std::mt19937_64 policy_rng(derive_seed(seed, kPolicySampling));
    std::mt19937_64 shuffle_rng(derive_seed(seed, kMinibatchShuffle));
    CoverageTracker coverage(coverage_grid(cfg), cfg.metrics.coverage_window);

    auto step_hyperparams = [&](std::size_t episode) {
        auto hp = modulation::modulate(state_module.state(), mod_cfg);
        if (!eils_arm) hp.lr = ppo::baseline_lr(cfg.ppo, episode);
        return hp;
    };

    std::size_t episode = 0;
    environment->begin_episode(episode);
    auto observation = environment->reset(derive_seed(seed, kEpisodeReset + episode));
    if (grid_env) coverage.visit(*environment->agent_cell());
    auto current = nets.evaluate(observation);
    auto hp = step_hyperparams(episode);
    EpisodeAccumulator acc;
    ppo::RolloutBuffer buffer;
    buffer.transitions.reserve(cfg.ppo.batch_size);

    while (episode < cfg.episodes) {
        const std::size_t action = nn::categorical_sample(current.probs, policy_rng);
        auto step = environment->step(action);
        const auto next = nets.evaluate(step.observation);
        if (grid_env) {
            const auto cell = *environment->agent_cell();
            coverage.visit(cell);
            ++result.visits[cell];
        }

        ppo::Transition t;
        t.observation = observation;
        t.action = action;
        t.reward = step.reward;
        t.next_observation = step.observation;
        t.terminated = step.terminated;
        t.truncated = step.truncated;
        t.log_prob = std::log(current.probs[action]);
        t.value = current.value;
        t.next_value = next.value;
        t.td_error = ppo::td_error(t.reward, t.value, t.next_value, t.terminated, cfg.ppo.gamma);

        double impulse = 0.0;
        if (forward_model) {
            impulse = dynamics::curiosity_impulse(*forward_model, t.observation, action, t.next_observation);
            calibrator.observe(impulse);
            if (!cfg.curiosity_setpoint) mod_cfg.curiosity_setpoint = calibrator.value();
        }
        const auto& s = state_module.step(t.td_error, impulse, t.value);
        emit(LoopEvent::ism_step);
        hp = step_hyperparams(episode);
        emit(LoopEvent::modulate);
        const ism::Setpoint setpoint{0.0, mod_cfg.curiosity_setpoint, 1.0};
        acc.add(s, hp, ism::homeostatic_deficit(s, setpoint), t.reward);
        buffer.transitions.push_back(std::move(t));

        if (step.done()) {
            const double cov = grid_env ? coverage.close_episode() : 0.0;
            result.records.push_back(acc.finish(seed, episode, environment->phase(), cov));
            acc = {};
            ++episode;
            if (episode >= cfg.episodes) break;
            environment->begin_episode(episode);
            observation = environment->reset(derive_seed(seed, kEpisodeReset + episode));
            if (grid_env) coverage.visit(*environment->agent_cell());
            current = nets.evaluate(observation);
        } else {
            observation = std::move(step.observation);
            current = next;
        }

        if (buffer.size() >= cfg.ppo.batch_size) {
            ppo::compute_gae(buffer, cfg.ppo.gamma, cfg.ppo.gae_decay);
            const auto stats = ppo::ppo_update(nets, buffer, hp, cfg.ppo, agent_opt, shuffle_rng);
            emit(LoopEvent::ppo_update);
            if (stats.aborted) ++result.aborted_updates;
            if (hooks.on_update) hooks.on_update(hp, stats);
            if (forward_model) {
                if (dynamics::train_dynamics(*forward_model, buffer).skipped) ++result.skipped_dynamics_updates;
                emit(LoopEvent::dynamics_update);
            }
            buffer.clear();
            current = nets.evaluate(observation);
        }
    }
    result.curiosity_setpoint = mod_cfg.curiosity_setpoint;
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.seeds.size();
    std::size_t jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, n);

    std::vector<SeedResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = run_seed(cfg, cfg.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentResult out;
    for (auto& r : results) {
        out.records.insert(out.records.end(), r.records.begin(), r.records.end());
        r.records.clear();
        for (const auto& [cell, count] : r.visits) out.visits[cell] += count;
        out.aborted_updates += r.aborted_updates;
    }
    out.seeds = std::move(results);
    out.summary = metrics::summarize(out.records, cfg);
    return out;
}

std::string records_filename(env::EnvKind env, AgentArm agent) {
    return "records_" + std::string(env::to_string(env)) + "_" + std::string(to_string(agent)) + ".csv";
}

std::string visits_filename(env::EnvKind env, AgentArm agent) {
    return "visits_" + std::string(env::to_string(env)) + "_" + std::string(to_string(agent)) + ".csv";
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
    std::filesystem::create_directories(cfg.out_dir);
    emit_csv(result.records, cfg.out_dir / records_filename(cfg.env, cfg.agent));
    if (cfg.env != env::EnvKind::dynamic_cartpole) {
        emit_visits(result.visits, cfg.out_dir / visits_filename(cfg.env, cfg.agent));
    }
    const auto echo = cfg.out_dir / "config_echo.ini";
    std::ofstream out(echo);
    if (!out) throw std::runtime_error("cannot open for writing: " + echo.string());
    write_config(out, cfg);
}

}  // namespace eils
