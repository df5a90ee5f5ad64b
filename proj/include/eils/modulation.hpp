#pragma once

// Transfer functions from the internal state to the PPO hyperparameters
// {learning rate, entropy coefficient, clip range}.

#include "eils/ism.hpp"

namespace eils::modulation {

struct ModulationConfig {
    double base_lr = 3e-4;
    double stress_sensitivity = 5.0;  // lr is capped at base_lr * (1 + sensitivity)
    double entropy_min = 0.0;
    double entropy_max = 0.1;
    double curiosity_setpoint = 0.0;
    double base_clip = 0.2;
    double confidence_sensitivity = 0.5;

    bool disable_stress = false;
    bool disable_curiosity = false;
    bool disable_confidence = false;
    /// Entropy coefficient used when curiosity modulation is disabled.
    double fixed_entropy = 0.01;

    void validate() const;
};

struct HyperparamSet {
    double lr = 0.0;
    double entropy_coef = 0.0;
    double clip = 0.0;
};

[[nodiscard]] double logistic(double x);

[[nodiscard]] double modulate_lr(double stress, const ModulationConfig& cfg);
[[nodiscard]] double modulate_entropy(double curiosity, const ModulationConfig& cfg);
[[nodiscard]] double modulate_clip(double confidence, const ModulationConfig& cfg);
[[nodiscard]] HyperparamSet modulate(const ism::InternalState& state, const ModulationConfig& cfg);

}  // namespace eils::modulation
