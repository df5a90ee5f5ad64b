#include "eils/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eils::ppo {

void RolloutBuffer::clear() {
    transitions.clear();
    advantages.clear();
    returns.clear();
    normalized_advantages.clear();
}

void PpoConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("ppo: gamma must lie in [0,1]");
    if (!(base_clip > 0.0 && base_clip < 1.0)) throw std::invalid_argument("ppo: base_clip must lie in (0,1)");
    if (!(gae_decay >= 0.0 && gae_decay <= 1.0)) throw std::invalid_argument("ppo: gae_decay must lie in [0,1]");
    if (!(base_lr > 0.0 && final_lr > 0.0)) throw std::invalid_argument("ppo: learning rates must be positive");
    if (batch_size == 0 || epochs == 0 || minibatch_size == 0) {
        throw std::invalid_argument("ppo: batch, epoch and minibatch sizes must be positive");
    }
    if (!(value_coef > 0.0 && max_grad_norm > 0.0 && baseline_entropy >= 0.0)) {
        throw std::invalid_argument("ppo: value_coef and max_grad_norm must be positive");
    }
}

double baseline_lr(const PpoConfig& cfg, std::size_t episode) {
    if (cfg.lr_decay_episodes == 0 || episode >= cfg.lr_decay_episodes) return cfg.final_lr;
    const double frac = static_cast<double>(episode) / static_cast<double>(cfg.lr_decay_episodes);
    return cfg.base_lr + (cfg.final_lr - cfg.base_lr) * frac;
}

AgentNets::AgentNets(std::size_t observation_dim, std::size_t action_count, std::uint64_t seed, std::size_t hidden)
    : actions_(action_count),
      net_(nn::MlpNet::initialized(observation_dim, action_count + 1, nn::Head::linear, seed, hidden)) {
    if (action_count < 2) throw std::invalid_argument("AgentNets: need at least two actions");
    // Near-uniform initial policy: shrink the logit rows of the output layer.
    const std::size_t last = net_.layers().size() - 1;
    for (std::size_t o = 0; o < action_count; ++o) {
        for (std::size_t i = 0; i < hidden; ++i) net_.weight(last, o, i) *= kPolicyInitGain;
        net_.bias(last, o) = 0.0;
    }
}

PolicyOutput AgentNets::evaluate(std::span<const double> observation) const {
    auto out = net_.forward(observation);
    PolicyOutput p;
    p.value = out[actions_];
    out.resize(actions_);
    nn::softmax_in_place(out);
    p.probs = std::move(out);
    return p;
}

double td_error(double reward, double value, double next_value, bool terminated, double gamma) {
    return reward + gamma * next_value * (terminated ? 0.0 : 1.0) - value;
}

void compute_gae(RolloutBuffer& buffer, double gamma, double gae_decay) {
    if (buffer.empty()) throw std::invalid_argument("compute_gae: empty buffer");
    const std::size_t n = buffer.size();
    buffer.advantages.assign(n, 0.0);
    buffer.returns.assign(n, 0.0);
    double running = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const auto& t = buffer.transitions[k];
        const double delta = td_error(t.reward, t.value, t.next_value, t.terminated, gamma);
        const double carry = t.episode_end() ? 0.0 : running;
        running = delta + gamma * gae_decay * carry;
        buffer.advantages[k] = running;
        buffer.returns[k] = running + t.value;
    }

    const double mean = std::accumulate(buffer.advantages.begin(), buffer.advantages.end(), 0.0) / n;
    double var = 0.0;
    for (double a : buffer.advantages) var += (a - mean) * (a - mean);
    var /= static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(var + 1e-12);
    buffer.normalized_advantages.resize(n);
    for (std::size_t k = 0; k < n; ++k) buffer.normalized_advantages[k] = (buffer.advantages[k] - mean) * scale;
}

double clipped_surrogate(double log_prob_new, double log_prob_old, double advantage, double clip) {
    const double ratio = std::exp(log_prob_new - log_prob_old);
    const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    return std::min(ratio * advantage, clipped * advantage);
}

namespace {

struct SampleTerms {
    double surrogate = 0.0;
    double entropy = 0.0;
    double value_error = 0.0;
    bool clipped = false;
};

// Loss gradient for one sample with respect to the net outputs (logits, value),
// scaled by `weight`.
SampleTerms sample_gradient(const std::vector<double>& raw_out, std::size_t actions, const Transition& t,
                            double advantage, double ret, const modulation::HyperparamSet& hp,
                            double value_coef, double weight, std::vector<double>& out_grad) {
    std::vector<double> probs(raw_out.begin(), raw_out.begin() + static_cast<std::ptrdiff_t>(actions));
    nn::softmax_in_place(probs);
    const double value = raw_out[actions];
    const double log_prob = std::log(probs[t.action]);
    const double ratio = std::exp(log_prob - t.log_prob);
    const double clipped_ratio = std::clamp(ratio, 1.0 - hp.clip, 1.0 + hp.clip);
    const double unclipped_obj = ratio * advantage;
    const double clipped_obj = clipped_ratio * advantage;

    SampleTerms terms;
    terms.surrogate = std::min(unclipped_obj, clipped_obj);
    terms.entropy = nn::categorical_entropy(probs);
    terms.value_error = value - ret;
    terms.clipped = std::abs(ratio - 1.0) > hp.clip;

    // d(surrogate)/d(log_prob) is ratio*A when the unclipped branch is active.
    const double surrogate_slope = unclipped_obj <= clipped_obj ? unclipped_obj : 0.0;
    out_grad.assign(actions + 1, 0.0);
    for (std::size_t j = 0; j < actions; ++j) {
        const double dlogp = (j == t.action ? 1.0 : 0.0) - probs[j];
        const double dentropy = probs[j] > 0.0 ? -probs[j] * (std::log(probs[j]) + terms.entropy) : 0.0;
        out_grad[j] = weight * (-surrogate_slope * dlogp - hp.entropy_coef * dentropy);
    }
    out_grad[actions] = weight * value_coef * 2.0 * terms.value_error;
    return terms;
}

}  // namespace

UpdateStats ppo_update(AgentNets& nets, const RolloutBuffer& buffer, const modulation::HyperparamSet& hp,
                       const PpoConfig& cfg, nn::AdamState& opt, std::mt19937_64& rng) {
    if (!buffer.has_advantages() || buffer.normalized_advantages.size() != buffer.size()) {
        throw std::invalid_argument("ppo_update: advantages must be computed first");
    }
    if (!(hp.lr > 0.0) || !(hp.clip > 0.0 && hp.clip < 1.0) || !(hp.entropy_coef >= 0.0)) {
        throw std::invalid_argument("ppo_update: hyperparameters out of range");
    }
    auto& net = nets.net();
    const std::size_t actions = nets.action_count();
    const std::size_t n = buffer.size();
    const auto& adv = buffer.normalized_advantages;

    UpdateStats stats;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& t = buffer.transitions[k];
        const auto p = nets.evaluate(t.observation);
        const double log_prob = std::log(p.probs[t.action]);
        stats.initial_ratio_max_deviation =
            std::max(stats.initial_ratio_max_deviation, std::abs(std::exp(log_prob - t.log_prob) - 1.0));
        stats.initial_objective += clipped_surrogate(log_prob, t.log_prob, adv[k], hp.clip);
    }
    stats.initial_objective /= static_cast<double>(n);

    const std::vector<double> saved_params(net.params().begin(), net.params().end());
    const nn::AdamState saved_opt = opt;
    auto abort = [&] {
        std::copy(saved_params.begin(), saved_params.end(), net.params().begin());
        opt = saved_opt;
        stats.aborted = true;
        return stats;
    };

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> out_grad;
    std::size_t samples = 0;
    double grad_norm_sum = 0.0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t begin = 0; begin < n; begin += cfg.minibatch_size) {
            const std::size_t end = std::min(n, begin + cfg.minibatch_size);
            const double weight = 1.0 / static_cast<double>(end - begin);
            auto grads = net.zero_gradients();
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t k = order[i];
                const auto& t = buffer.transitions[k];
                const auto trace = net.forward_trace(t.observation);
                const auto terms = sample_gradient(trace.output, actions, t, adv[k], buffer.returns[k], hp,
                                                   cfg.value_coef, weight, out_grad);
                const double loss = -terms.surrogate - hp.entropy_coef * terms.entropy +
                                    cfg.value_coef * terms.value_error * terms.value_error;
                if (!std::isfinite(loss)) return abort();
                net.accumulate_backward(trace, out_grad, grads);

                stats.policy_loss -= terms.surrogate;
                stats.value_loss += terms.value_error * terms.value_error;
                stats.entropy += terms.entropy;
                stats.clip_fraction += terms.clipped ? 1.0 : 0.0;
                ++samples;
            }
            const double norm = grads.l2_norm();
            if (!std::isfinite(norm)) return abort();
            grad_norm_sum += norm;
            if (norm > cfg.max_grad_norm) grads.scale(cfg.max_grad_norm / norm);
            if (!nn::adam_step(net, grads, opt, hp.lr)) return abort();
            ++stats.optimizer_steps;
        }
    }
    if (!net.all_finite()) return abort();

    const double inv = 1.0 / static_cast<double>(samples);
    stats.policy_loss *= inv;
    stats.value_loss *= inv;
    stats.entropy *= inv;
    stats.clip_fraction *= inv;
    stats.mean_grad_norm = grad_norm_sum / static_cast<double>(stats.optimizer_steps);
    return stats;
}

}  // namespace eils::ppo
