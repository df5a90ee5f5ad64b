#include "eils/modulation.hpp"

#include <cmath>
#include <stdexcept>

namespace eils::modulation {

void ModulationConfig::validate() const {
    if (!(base_lr > 0.0)) throw std::invalid_argument("modulation: base_lr must be positive");
    if (!(stress_sensitivity >= 0.0)) throw std::invalid_argument("modulation: stress_sensitivity must be >= 0");
    if (!(entropy_min >= 0.0 && entropy_min <= entropy_max)) {
        throw std::invalid_argument("modulation: need 0 <= entropy_min <= entropy_max");
    }
    if (!(confidence_sensitivity >= 0.0 && confidence_sensitivity < 1.0)) {
        throw std::invalid_argument("modulation: confidence_sensitivity must lie in [0,1)");
    }
    if (!(base_clip > 0.0 && base_clip < 1.0)) throw std::invalid_argument("modulation: base_clip must lie in (0,1)");
    if (!(fixed_entropy >= 0.0)) throw std::invalid_argument("modulation: fixed_entropy must be >= 0");
}

double logistic(double x) {
    // Split by sign so neither branch overflows.
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double modulate_lr(double stress, const ModulationConfig& cfg) {
    if (cfg.disable_stress) return cfg.base_lr;
    return cfg.base_lr * (1.0 + cfg.stress_sensitivity * std::tanh(stress));
}

double modulate_entropy(double curiosity, const ModulationConfig& cfg) {
    if (cfg.disable_curiosity) return cfg.fixed_entropy;
    return cfg.entropy_min + (cfg.entropy_max - cfg.entropy_min) * logistic(cfg.curiosity_setpoint - curiosity);
}

double modulate_clip(double confidence, const ModulationConfig& cfg) {
    if (cfg.disable_confidence) return cfg.base_clip;
    return cfg.base_clip * (1.0 - cfg.confidence_sensitivity * confidence);
}

HyperparamSet modulate(const ism::InternalState& s, const ModulationConfig& cfg) {
    return {modulate_lr(s.stress, cfg), modulate_entropy(s.curiosity, cfg), modulate_clip(s.confidence, cfg)};
}

}  // namespace eils::modulation
