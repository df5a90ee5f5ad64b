#pragma once

// Dense MLP kernel: fixed (input, hidden, hidden, output) topology with tanh
// hidden layers, a linear or softmax head, and an Adam optimizer that takes its
// step size on every call.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace eils::nn {

enum class Head { linear, softmax };

inline constexpr std::size_t kDefaultHidden = 64;

/// Location of one dense layer inside the flat parameter vector.
///
/// Weights are stored column-major (`out` contiguous values per input unit) so
/// that forward passes accumulate each output in a fixed input order; batched
/// and single-sample evaluation are therefore bit-identical.
struct LayerLayout {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
};

/// Gradient with the same flat layout as the parameters of the net it came from.
struct GradientSet {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return values.size(); }
    [[nodiscard]] bool all_finite() const;
    [[nodiscard]] double l2_norm() const;
    void scale(double factor);
    void add(const GradientSet& other);
};

/// Per-layer activations kept from a forward pass for the backward pass.
struct ForwardTrace {
    std::vector<std::vector<double>> activations;  // input, hidden..., pre-head output
    std::vector<double> output;                    // after the head
};

class MlpNet {
public:
    /// Zero-initialised net with two hidden layers of width `hidden`.
    MlpNet(std::size_t input_dim, std::size_t output_dim, Head head,
           std::size_t hidden = kDefaultHidden);

    /// Uniform ±1/sqrt(fan_in) initialisation; each layer draws from its own
    /// generator derived from `seed` and the layer index.
    static MlpNet initialized(std::size_t input_dim, std::size_t output_dim, Head head,
                              std::uint64_t seed, std::size_t hidden = kDefaultHidden);

    [[nodiscard]] std::size_t input_dim() const { return layers_.front().in; }
    [[nodiscard]] std::size_t output_dim() const { return layers_.back().out; }
    [[nodiscard]] std::size_t hidden_dim() const { return layers_.front().out; }
    [[nodiscard]] Head head() const { return head_; }
    [[nodiscard]] const std::vector<LayerLayout>& layers() const { return layers_; }

    [[nodiscard]] std::span<double> params() { return params_; }
    [[nodiscard]] std::span<const double> params() const { return params_; }
    [[nodiscard]] std::size_t param_count() const { return params_.size(); }

    /// Weight (row `o`, column `i`) of layer `l`.
    [[nodiscard]] double& weight(std::size_t l, std::size_t o, std::size_t i);
    [[nodiscard]] double& bias(std::size_t l, std::size_t o);

    [[nodiscard]] std::vector<double> forward(std::span<const double> input) const;
    [[nodiscard]] ForwardTrace forward_trace(std::span<const double> input) const;

    /// Accumulates d<output, output_grad>/d(params) into `grads`. Returns the
    /// gradient with respect to the input.
    std::vector<double> accumulate_backward(const ForwardTrace& trace,
                                            std::span<const double> output_grad,
                                            GradientSet& grads) const;

    [[nodiscard]] GradientSet zero_gradients() const { return GradientSet{std::vector<double>(params_.size(), 0.0)}; }
    [[nodiscard]] bool all_finite() const;

private:
    Head head_;
    std::vector<LayerLayout> layers_;
    std::vector<double> params_;
};

[[nodiscard]] std::vector<double> mlp_forward(const MlpNet& net, std::span<const double> input);
[[nodiscard]] GradientSet mlp_backward(const MlpNet& net, std::span<const double> input,
                                       std::span<const double> output_grad);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(const MlpNet& net)
        : first_moment(net.param_count(), 0.0), second_moment(net.param_count(), 0.0) {}

    void reset();
};

/// One Adam update with step size `lr`. Returns false, leaving both the net and
/// the state untouched, when the gradient has non-finite entries.
[[nodiscard]] bool adam_step(MlpNet& net, const GradientSet& grads, AdamState& opt, double lr);

void softmax_in_place(std::span<double> logits);
[[nodiscard]] std::vector<double> softmax(std::span<const double> logits);

/// Draws index i with probability probs[i]. Throws std::invalid_argument when
/// the vector is not normalised.
[[nodiscard]] std::size_t categorical_sample(std::span<const double> probs, std::mt19937_64& rng);

/// Entropy in nats; zero-probability entries contribute nothing.
[[nodiscard]] double categorical_entropy(std::span<const double> probs);

}  // namespace eils::nn
