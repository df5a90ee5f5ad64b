#include "eils/ism.hpp"

#include <algorithm>
#include <stdexcept>

namespace eils::ism {

void IsmConfig::validate() const {
    if (!(stress_decay > 0.0 && stress_decay < 1.0)) throw std::invalid_argument("ism: stress_decay must lie in (0,1)");
    if (!(curiosity_decay > 0.0 && curiosity_decay < 1.0)) {
        throw std::invalid_argument("ism: curiosity_decay must lie in (0,1)");
    }
    if (confidence_window < 2) throw std::invalid_argument("ism: confidence_window must be at least 2");
}

ValueWindow::ValueWindow(std::size_t capacity) : buffer_(capacity, 0.0) {
    if (capacity == 0) throw std::invalid_argument("ValueWindow: capacity must be positive");
}

void ValueWindow::push(double value) {
    buffer_[head_] = value;
    head_ = (head_ + 1) % buffer_.size();
    size_ = std::min(size_ + 1, buffer_.size());
}

void ValueWindow::clear() {
    head_ = 0;
    size_ = 0;
}

std::vector<double> ValueWindow::values() const {
    std::vector<double> out;
    out.reserve(size_);
    const std::size_t cap = buffer_.size();
    const std::size_t oldest = (head_ + cap - size_) % cap;
    for (std::size_t i = 0; i < size_; ++i) out.push_back(buffer_[(oldest + i) % cap]);
    return out;
}

double ValueWindow::variance() const {
    if (size_ < 2) return 0.0;
    const auto v = values();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size());
}

double stress_impulse(double td_error) { return std::max(0.0, -td_error); }

double stress_update(double previous, double td_error, double decay) {
    return (1.0 - decay) * previous + decay * stress_impulse(td_error);
}

double curiosity_update(double previous, double impulse, double decay) {
    return (1.0 - decay) * previous + decay * impulse;
}

double confidence(const ValueWindow& window) {
    if (window.size() < 2) return 1.0;
    return 1.0 / (1.0 + window.variance());
}

double homeostatic_deficit(const InternalState& s, const Setpoint& target) {
    const double ds = s.stress - target.stress;
    const double dk = s.curiosity - target.curiosity;
    const double dc = s.confidence - target.confidence;
    return 0.5 * (ds * ds + dk * dk + dc * dc);
}

InternalStateModule::InternalStateModule(IsmConfig cfg) : cfg_(cfg), window_(cfg.confidence_window) {
    cfg_.validate();
}

const InternalState& InternalStateModule::step(double td_error, double curiosity_impulse, double value) {
    state_.stress = stress_update(state_.stress, td_error, cfg_.stress_decay);
    state_.curiosity = curiosity_update(state_.curiosity, curiosity_impulse, cfg_.curiosity_decay);
    window_.push(value);
    state_.confidence = confidence(window_);
    return state_;
}

void InternalStateModule::reset() {
    state_ = InternalState{};
    window_.clear();
}

void SetpointCalibrator::observe(double impulse) {
    if (frozen()) return;
    sum_ += impulse;
    ++count_;
}

}  // namespace eils::ism
