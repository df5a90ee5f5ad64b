#pragma once

// Forward dynamics model f(s, a) -> s'. Its squared prediction error is the raw
// curiosity impulse.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eils/nn.hpp"
#include "eils/ppo.hpp"

namespace eils::dynamics {

class DynamicsModel {
public:
    DynamicsModel(std::size_t observation_dim, std::size_t action_count, std::uint64_t seed,
                  double lr = 1e-3, std::size_t minibatch_size = 64, std::size_t hidden = nn::kDefaultHidden);

    /// Observation followed by the one-hot action.
    [[nodiscard]] std::vector<double> encode(std::span<const double> observation, std::size_t action) const;
    [[nodiscard]] std::vector<double> predict(std::span<const double> observation, std::size_t action) const;

    [[nodiscard]] std::size_t observation_dim() const { return observation_dim_; }
    [[nodiscard]] std::size_t action_count() const { return action_count_; }
    [[nodiscard]] double lr() const { return lr_; }
    [[nodiscard]] std::size_t minibatch_size() const { return minibatch_size_; }

    [[nodiscard]] nn::MlpNet& net() { return net_; }
    [[nodiscard]] const nn::MlpNet& net() const { return net_; }
    [[nodiscard]] nn::AdamState& optimizer() { return opt_; }

private:
    std::size_t observation_dim_;
    std::size_t action_count_;
    double lr_;
    std::size_t minibatch_size_;
    nn::MlpNet net_;
    nn::AdamState opt_;
};

[[nodiscard]] double squared_error(std::span<const double> prediction, std::span<const double> target);

/// ||f(s, a) - s'||^2.
[[nodiscard]] double curiosity_impulse(const DynamicsModel& model, std::span<const double> observation,
                                       std::size_t action, std::span<const double> next_observation);

/// Mean curiosity impulse over the buffer.
[[nodiscard]] double mean_prediction_error(const DynamicsModel& model, const ppo::RolloutBuffer& buffer);

struct DynamicsTrainResult {
    double loss = 0.0;  // mean squared prediction error after the pass
    bool skipped = false;
};

/// One in-order pass of minibatch Adam on the mean squared prediction error.
/// A non-finite loss or gradient restores the model and sets `skipped`.
DynamicsTrainResult train_dynamics(DynamicsModel& model, const ppo::RolloutBuffer& buffer);

}  // namespace eils::dynamics
