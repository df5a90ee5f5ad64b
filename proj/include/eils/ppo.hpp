#pragma once

// Clipped-surrogate actor-critic. The learning rate, entropy coefficient and
// clip range arrive with every update instead of living in the config.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "eils/modulation.hpp"
#include "eils/nn.hpp"

namespace eils::ppo {

struct Transition {
    std::vector<double> observation;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_observation;
    bool terminated = false;  // no bootstrap through this step
    bool truncated = false;   // episode boundary reached by the step cap
    double log_prob = 0.0;    // behaviour policy log-probability of `action`
    double value = 0.0;       // V(s_t)
    double next_value = 0.0;  // V(s_{t+1}), evaluated at collection time
    double td_error = 0.0;

    [[nodiscard]] bool episode_end() const { return terminated || truncated; }
};

struct RolloutBuffer {
    std::vector<Transition> transitions;
    std::vector<double> advantages;             // raw GAE
    std::vector<double> returns;                // advantages + values
    std::vector<double> normalized_advantages;  // zero mean, unit variance

    [[nodiscard]] std::size_t size() const { return transitions.size(); }
    [[nodiscard]] bool empty() const { return transitions.empty(); }
    [[nodiscard]] bool has_advantages() const { return advantages.size() == transitions.size() && !empty(); }
    void clear();
};

struct PpoConfig {
    double gamma = 0.99;
    double base_clip = 0.2;
    double base_lr = 3e-4;
    std::size_t batch_size = 256;  // rollout length per update
    double gae_decay = 0.95;
    std::size_t epochs = 8;
    std::size_t minibatch_size = 64;
    // The critic shares the policy's hidden layers and regresses undiscounted
    // returns near 100, so its loss term is kept small to leave the policy
    // gradient visible in the shared layers.
    double value_coef = 0.01;
    double max_grad_norm = 0.5;
    /// Baseline arm: fixed entropy coefficient and linear lr decay to
    /// `final_lr`, reached after `lr_decay_episodes` episodes.
    double baseline_entropy = 0.01;
    double final_lr = 1e-5;
    std::size_t lr_decay_episodes = 500;

    void validate() const;
};

/// Learning rate of the decaying baseline schedule at a given episode.
[[nodiscard]] double baseline_lr(const PpoConfig& cfg, std::size_t episode);

struct PolicyOutput {
    std::vector<double> probs;
    double value = 0.0;
};

/// Scale applied to the initial logit weights so a fresh policy is close to
/// uniform.
inline constexpr double kPolicyInitGain = 0.01;

/// Shared tanh backbone with a linear actor head (logits, first `action_count`
/// outputs) and a linear critic head (last output); both heads read the same
/// hidden features.
class AgentNets {
public:
    AgentNets(std::size_t observation_dim, std::size_t action_count, std::uint64_t seed,
              std::size_t hidden = nn::kDefaultHidden);

    [[nodiscard]] PolicyOutput evaluate(std::span<const double> observation) const;
    [[nodiscard]] std::size_t action_count() const { return actions_; }
    [[nodiscard]] std::size_t observation_dim() const { return net_.input_dim(); }

    [[nodiscard]] nn::MlpNet& net() { return net_; }
    [[nodiscard]] const nn::MlpNet& net() const { return net_; }

private:
    std::size_t actions_;
    nn::MlpNet net_;
};

[[nodiscard]] double td_error(double reward, double value, double next_value, bool terminated, double gamma);

/// Fills advantages, returns and normalized advantages. Sums are truncated at
/// episode boundaries; bootstrapping comes from each transition's next_value.
void compute_gae(RolloutBuffer& buffer, double gamma, double gae_decay);

[[nodiscard]] double clipped_surrogate(double log_prob_new, double log_prob_old, double advantage, double clip);

struct UpdateStats {
    double policy_loss = 0.0;   // mean negative surrogate
    double value_loss = 0.0;    // mean squared value error
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double initial_objective = 0.0;           // mean surrogate before any step
    double initial_ratio_max_deviation = 0.0;  // max |rho - 1| before any step
    double mean_grad_norm = 0.0;
    std::size_t optimizer_steps = 0;
    bool aborted = false;
};

/// Maximises surrogate + entropy_coef * entropy - value_coef * (V - R)^2 over
/// `cfg.epochs` shuffled passes. On a non-finite loss or gradient the nets and
/// optimizer state are restored and `aborted` is set.
UpdateStats ppo_update(AgentNets& nets, const RolloutBuffer& buffer, const modulation::HyperparamSet& hp,
                       const PpoConfig& cfg, nn::AdamState& opt, std::mt19937_64& rng);

}  // namespace eils::ppo
