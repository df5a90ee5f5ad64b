#include "eils/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eils::dynamics {

DynamicsModel::DynamicsModel(std::size_t observation_dim, std::size_t action_count, std::uint64_t seed, double lr,
                             std::size_t minibatch_size, std::size_t hidden)
    : observation_dim_(observation_dim),
      action_count_(action_count),
      lr_(lr),
      minibatch_size_(minibatch_size),
      net_(nn::MlpNet::initialized(observation_dim + action_count, observation_dim, nn::Head::linear, seed, hidden)),
      opt_(net_) {
    if (!(lr > 0.0) || minibatch_size == 0) throw std::invalid_argument("DynamicsModel: lr and minibatch must be positive");
}

std::vector<double> DynamicsModel::encode(std::span<const double> observation, std::size_t action) const {
    if (observation.size() != observation_dim_) throw std::invalid_argument("DynamicsModel: observation size mismatch");
    if (action >= action_count_) throw std::invalid_argument("DynamicsModel: action out of range");
    std::vector<double> x(observation.begin(), observation.end());
    x.resize(observation_dim_ + action_count_, 0.0);
    x[observation_dim_ + action] = 1.0;
    return x;
}

std::vector<double> DynamicsModel::predict(std::span<const double> observation, std::size_t action) const {
    return net_.forward(encode(observation, action));
}

double squared_error(std::span<const double> prediction, std::span<const double> target) {
    if (prediction.size() != target.size()) throw std::invalid_argument("squared_error: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const double d = prediction[i] - target[i];
        s += d * d;
    }
    return s;
}

double curiosity_impulse(const DynamicsModel& model, std::span<const double> observation, std::size_t action,
                         std::span<const double> next_observation) {
    return squared_error(model.predict(observation, action), next_observation);
}

double mean_prediction_error(const DynamicsModel& model, const ppo::RolloutBuffer& buffer) {
    if (buffer.empty()) throw std::invalid_argument("mean_prediction_error: empty buffer");
    double total = 0.0;
    for (const auto& t : buffer.transitions) {
        total += curiosity_impulse(model, t.observation, t.action, t.next_observation);
    }
    return total / static_cast<double>(buffer.size());
}

DynamicsTrainResult train_dynamics(DynamicsModel& model, const ppo::RolloutBuffer& buffer) {
    if (buffer.empty()) throw std::invalid_argument("train_dynamics: empty buffer");
    auto& net = model.net();
    const std::vector<double> saved_params(net.params().begin(), net.params().end());
    const nn::AdamState saved_opt = model.optimizer();

    DynamicsTrainResult result;
    const std::size_t n = buffer.size();
    std::vector<double> grad_out(model.observation_dim());
    for (std::size_t begin = 0; begin < n && !result.skipped; begin += model.minibatch_size()) {
        const std::size_t end = std::min(n, begin + model.minibatch_size());
        const double weight = 1.0 / static_cast<double>(end - begin);
        auto grads = net.zero_gradients();
        for (std::size_t k = begin; k < end; ++k) {
            const auto& t = buffer.transitions[k];
            const auto trace = net.forward_trace(model.encode(t.observation, t.action));
            for (std::size_t i = 0; i < grad_out.size(); ++i) {
                grad_out[i] = weight * 2.0 * (trace.output[i] - t.next_observation[i]);
            }
            net.accumulate_backward(trace, grad_out, grads);
        }
        if (!nn::adam_step(net, grads, model.optimizer(), model.lr())) result.skipped = true;
    }
    if (!result.skipped) {
        result.loss = mean_prediction_error(model, buffer);
        if (!std::isfinite(result.loss) || !net.all_finite()) result.skipped = true;
    }
    if (result.skipped) {
        std::copy(saved_params.begin(), saved_params.end(), net.params().begin());
        model.optimizer() = saved_opt;
        result.loss = mean_prediction_error(model, buffer);
    }
    return result;
}

}  // namespace eils::dynamics
