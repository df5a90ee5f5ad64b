#pragma once

// Internal State Module: stress and curiosity as exponential moving averages of
// their impulses, confidence from the variance of a sliding window of critic
// values.

#include <cstddef>
#include <vector>

namespace eils::ism {

struct InternalState {
    double stress = 0.0;
    double curiosity = 0.0;
    double confidence = 1.0;
};

/// Target internal state used by the homeostatic deficit: calm, curiosity at
/// its setpoint, fully confident.
struct Setpoint {
    double stress = 0.0;
    double curiosity = 0.0;
    double confidence = 1.0;
};

struct IsmConfig {
    double stress_decay = 0.05;
    double curiosity_decay = 0.01;
    std::size_t confidence_window = 50;
    /// Steps over which the curiosity setpoint is calibrated as the mean impulse.
    std::size_t setpoint_calibration_steps = 500;

    void validate() const;
};

/// Ring buffer of the most recent critic values.
class ValueWindow {
public:
    explicit ValueWindow(std::size_t capacity);

    void push(double value);
    void clear();
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] std::size_t capacity() const { return buffer_.size(); }
    /// Contents from oldest to newest.
    [[nodiscard]] std::vector<double> values() const;
    /// Population variance of the contents, 0 for fewer than two samples.
    [[nodiscard]] double variance() const;

private:
    std::vector<double> buffer_;
    std::size_t head_ = 0;
    std::size_t size_ = 0;
};

[[nodiscard]] double stress_impulse(double td_error);
[[nodiscard]] double stress_update(double previous, double td_error, double decay);
[[nodiscard]] double curiosity_update(double previous, double impulse, double decay);
/// 1 / (1 + Var(window)); 1 when the window holds fewer than two values.
[[nodiscard]] double confidence(const ValueWindow& window);
[[nodiscard]] double homeostatic_deficit(const InternalState& state, const Setpoint& setpoint);

class InternalStateModule {
public:
    explicit InternalStateModule(IsmConfig cfg = {});

    /// Applies the stress and curiosity EMAs, pushes `value` into the window
    /// and recomputes confidence.
    const InternalState& step(double td_error, double curiosity_impulse, double value);
    void reset();

    [[nodiscard]] const InternalState& state() const { return state_; }
    [[nodiscard]] const ValueWindow& window() const { return window_; }
    [[nodiscard]] const IsmConfig& config() const { return cfg_; }

private:
    IsmConfig cfg_;
    InternalState state_;
    ValueWindow window_;
};

/// Running mean of curiosity impulses over the first `steps` samples, frozen
/// afterwards.
class SetpointCalibrator {
public:
    explicit SetpointCalibrator(std::size_t steps) : target_(steps) {}

    void observe(double impulse);
    [[nodiscard]] double value() const { return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_); }
    [[nodiscard]] bool frozen() const { return count_ >= target_; }
    [[nodiscard]] std::size_t samples() const { return count_; }

private:
    std::size_t target_;
    std::size_t count_ = 0;
    double sum_ = 0.0;
};

}  // namespace eils::ism
