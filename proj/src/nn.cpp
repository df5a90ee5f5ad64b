#include "eils/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eils::nn {

namespace {

void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

// out = b + W x, accumulated one input column at a time.
void dense_forward(const LayerLayout& layer, std::span<const double> params,
                   std::span<const double> x, std::span<double> out) {
    const double* w = params.data() + layer.weight_offset;
    const double* b = params.data() + layer.bias_offset;
    std::copy(b, b + layer.out, out.begin());
    for (std::size_t i = 0; i < layer.in; ++i) {
        const double xi = x[i];
        const double* col = w + i * layer.out;
        for (std::size_t o = 0; o < layer.out; ++o) out[o] += col[o] * xi;
    }
}

}  // namespace

bool GradientSet::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double GradientSet::l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

void GradientSet::scale(double factor) {
    for (double& v : values) v *= factor;
}

void GradientSet::add(const GradientSet& other) {
    require_dim(other.values.size(), values.size(), "GradientSet::add");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
}

MlpNet::MlpNet(std::size_t input_dim, std::size_t output_dim, Head head, std::size_t hidden)
    : head_(head) {
    if (input_dim == 0 || output_dim == 0 || hidden == 0) {
        throw std::invalid_argument("MlpNet: dimensions must be positive");
    }
    const std::size_t dims[] = {input_dim, hidden, hidden, output_dim};
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < std::size(dims); ++l) {
        LayerLayout layer{dims[l], dims[l + 1], offset, offset + dims[l] * dims[l + 1]};
        offset = layer.bias_offset + layer.out;
        layers_.push_back(layer);
    }
    params_.assign(offset, 0.0);
}

MlpNet MlpNet::initialized(std::size_t input_dim, std::size_t output_dim, Head head,
                           std::uint64_t seed, std::size_t hidden) {
    MlpNet net(input_dim, output_dim, head, hidden);
    for (std::size_t l = 0; l < net.layers_.size(); ++l) {
        const auto& layer = net.layers_[l];
        std::seed_seq seq{seed, static_cast<std::uint64_t>(l), std::uint64_t{0x6d6c70}};
        std::mt19937_64 rng(seq);
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        const std::size_t end = layer.bias_offset + layer.out;
        for (std::size_t p = layer.weight_offset; p < end; ++p) net.params_[p] = dist(rng);
    }
    return net;
}

double& MlpNet::weight(std::size_t l, std::size_t o, std::size_t i) {
    const auto& layer = layers_.at(l);
    if (o >= layer.out || i >= layer.in) throw std::out_of_range("MlpNet::weight");
    return params_[layer.weight_offset + i * layer.out + o];
}

double& MlpNet::bias(std::size_t l, std::size_t o) {
    const auto& layer = layers_.at(l);
    if (o >= layer.out) throw std::out_of_range("MlpNet::bias");
    return params_[layer.bias_offset + o];
}

ForwardTrace MlpNet::forward_trace(std::span<const double> input) const {
    require_dim(input.size(), input_dim(), "MlpNet::forward");
    ForwardTrace trace;
    trace.activations.reserve(layers_.size() + 1);
    trace.activations.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        std::vector<double> out(layers_[l].out);
        dense_forward(layers_[l], params_, trace.activations.back(), out);
        if (l + 1 < layers_.size()) {
            for (double& v : out) v = std::tanh(v);
        }
        trace.activations.push_back(std::move(out));
    }
    trace.output = trace.activations.back();
    if (head_ == Head::softmax) softmax_in_place(trace.output);
    return trace;
}

std::vector<double> MlpNet::forward(std::span<const double> input) const {
    return forward_trace(input).output;
}

std::vector<double> MlpNet::accumulate_backward(const ForwardTrace& trace,
                                                std::span<const double> output_grad,
                                                GradientSet& grads) const {
    require_dim(output_grad.size(), output_dim(), "MlpNet::backward");
    require_dim(grads.values.size(), params_.size(), "MlpNet::backward gradient set");

    // Gradient with respect to the pre-head output.
    std::vector<double> g(output_grad.begin(), output_grad.end());
    if (head_ == Head::softmax) {
        const auto& p = trace.output;
        const double dot = std::inner_product(p.begin(), p.end(), g.begin(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] = p[k] * (g[k] - dot);
    }

    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        const auto& x = trace.activations[l];
        const double* w = params_.data() + layer.weight_offset;
        double* gw = grads.values.data() + layer.weight_offset;
        double* gb = grads.values.data() + layer.bias_offset;
        std::vector<double> gx(layer.in, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) gb[o] += g[o];
        for (std::size_t i = 0; i < layer.in; ++i) {
            const double xi = x[i];
            const double* col = w + i * layer.out;
            double* gcol = gw + i * layer.out;
            double acc = 0.0;
            for (std::size_t o = 0; o < layer.out; ++o) {
                gcol[o] += g[o] * xi;
                acc += col[o] * g[o];
            }
            gx[i] = acc;
        }
        if (l > 0) {
            // x is tanh output of the previous layer.
            for (std::size_t i = 0; i < layer.in; ++i) gx[i] *= 1.0 - x[i] * x[i];
        }
        g = std::move(gx);
    }
    return g;
}

bool MlpNet::all_finite() const {
    return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> mlp_forward(const MlpNet& net, std::span<const double> input) {
    return net.forward(input);
}

GradientSet mlp_backward(const MlpNet& net, std::span<const double> input,
                         std::span<const double> output_grad) {
    auto grads = net.zero_gradients();
    const auto trace = net.forward_trace(input);
    net.accumulate_backward(trace, output_grad, grads);
    return grads;
}

void AdamState::reset() {
    std::fill(first_moment.begin(), first_moment.end(), 0.0);
    std::fill(second_moment.begin(), second_moment.end(), 0.0);
    step = 0;
}

bool adam_step(MlpNet& net, const GradientSet& grads, AdamState& opt, double lr) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("adam_step: lr must be positive");
    require_dim(grads.values.size(), net.param_count(), "adam_step gradients");
    require_dim(opt.first_moment.size(), net.param_count(), "adam_step first moment");
    require_dim(opt.second_moment.size(), net.param_count(), "adam_step second moment");
    if (!grads.all_finite()) return false;

    ++opt.step;
    const double t = static_cast<double>(opt.step);
    const double bias1 = 1.0 - std::pow(opt.beta1, t);
    const double bias2 = 1.0 - std::pow(opt.beta2, t);
    auto params = net.params();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads.values[i];
        double& m = opt.first_moment[i];
        double& v = opt.second_moment[i];
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v = opt.beta2 * v + (1.0 - opt.beta2) * g * g;
        const double m_hat = m / bias1;
        const double v_hat = v / bias2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
    return true;
}

void softmax_in_place(std::span<double> logits) {
    if (logits.empty()) return;
    const double peak = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : logits) v /= total;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    softmax_in_place(out);
    return out;
}

std::size_t categorical_sample(std::span<const double> probs, std::mt19937_64& rng) {
    if (probs.empty()) throw std::invalid_argument("categorical_sample: empty distribution");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument("categorical_sample: probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("categorical_sample: probabilities sum to " + std::to_string(total));
    }
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cumulative += probs[i];
        last_positive = i;
        if (u < cumulative) return i;
    }
    return last_positive;
}

double categorical_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace eils::nn
