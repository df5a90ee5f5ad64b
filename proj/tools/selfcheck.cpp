#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "eils/ism.hpp"
#include "eils/modulation.hpp"
#include "eils/nn.hpp"
#include "eils/ppo.hpp"

namespace eils::tools {

namespace {

// Max relative error of analytic vs central-difference gradients over random
// parameter coordinates.
double gradient_error(std::size_t in, std::size_t out, nn::Head head, std::uint64_t seed, std::size_t probes) {
    auto net = nn::MlpNet::initialized(in, out, head, seed);
    std::mt19937_64 rng(seed + 17);
    std::normal_distribution<double> normal;
    std::vector<double> x(in);
    std::vector<double> g(out);
    for (double& v : x) v = normal(rng);
    for (double& v : g) v = normal(rng);
    const auto objective = [&](const nn::MlpNet& n) {
        const auto y = n.forward(x);
        double s = 0.0;
        for (std::size_t i = 0; i < out; ++i) s += y[i] * g[i];
        return s;
    };
    const auto grads = nn::mlp_backward(net, x, g);
    std::uniform_int_distribution<std::size_t> pick(0, net.param_count() - 1);
    double worst = 0.0;
    const double h = 1e-5;
    for (std::size_t p = 0; p < probes; ++p) {
        const std::size_t k = pick(rng);
        const double saved = net.params()[k];
        net.params()[k] = saved + h;
        const double up = objective(net);
        net.params()[k] = saved - h;
        const double down = objective(net);
        net.params()[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = grads.values[k];
        worst = std::max(worst, std::abs(an - fd) / std::max(1e-6, std::abs(an) + std::abs(fd)));
    }
    return worst;
}

double gae_error(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::bernoulli_distribution end(0.25);
    double worst = 0.0;
    for (std::size_t len = 1; len <= 8; ++len) {
        for (int trial = 0; trial < 50; ++trial) {
            ppo::RolloutBuffer b;
            for (std::size_t i = 0; i < len; ++i) {
                ppo::Transition t;
                t.reward = u(rng);
                t.value = u(rng);
                t.next_value = u(rng);
                t.terminated = end(rng);
                t.truncated = !t.terminated && end(rng);
                b.transitions.push_back(t);
            }
            const double gamma = 0.99;
            const double lambda = 0.95;
            ppo::compute_gae(b, gamma, lambda);
            for (std::size_t t = 0; t < len; ++t) {
                double sum = 0.0;
                double w = 1.0;
                for (std::size_t k = t; k < len; ++k) {
                    const auto& tr = b.transitions[k];
                    const double delta = tr.reward + gamma * tr.next_value * (tr.terminated ? 0.0 : 1.0) - tr.value;
                    sum += w * delta;
                    if (tr.terminated || tr.truncated) break;
                    w *= gamma * lambda;
                }
                worst = std::max(worst, std::abs(sum - b.advantages[t]));
            }
        }
    }
    return worst;
}

double ema_error() {
    double worst = 0.0;
    for (double eta : {0.05, 0.01}) {
        for (double c : {0.5, 1.0, 3.0}) {
            double s = 0.0;
            for (int t = 1; t <= 300; ++t) {
                s = ism::curiosity_update(s, c, eta);
                worst = std::max(worst, std::abs(s - c * (1.0 - std::pow(1.0 - eta, t))));
            }
        }
    }
    return worst;
}

double confidence_error(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 3.0);
    ism::ValueWindow w(50);
    std::vector<double> all;
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double v = normal(rng);
        w.push(v);
        all.push_back(v);
        const std::size_t n = std::min<std::size_t>(all.size(), 50);
        if (n < 2) continue;
        double mean = 0.0;
        for (std::size_t k = all.size() - n; k < all.size(); ++k) mean += all[k];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t k = all.size() - n; k < all.size(); ++k) var += (all[k] - mean) * (all[k] - mean);
        var /= static_cast<double>(n);
        worst = std::max(worst, std::abs(ism::confidence(w) - 1.0 / (1.0 + var)));
    }
    return worst;
}

}  // namespace

bool run_self_checks(std::ostream& out) {
    bool ok = true;
    auto report = [&](const std::string& name, double value, double tol) {
        const bool pass = std::isfinite(value) && value < tol;
        ok = ok && pass;
        out << (pass ? "PASS " : "FAIL ") << name << ": " << value << " (tolerance " << tol << ")\n";
    };
    report("gradient 4-64-64-2 softmax", gradient_error(4, 2, nn::Head::softmax, 1, 100), 1e-3);
    report("gradient 4-64-64-3 linear (agent)", gradient_error(4, 3, nn::Head::linear, 2, 100), 1e-3);
    report("gradient 6-64-64-4 linear (maze dynamics)", gradient_error(6, 4, nn::Head::linear, 3, 100), 1e-3);
    report("gradient 10-64-64-6 linear (reversal dynamics)", gradient_error(10, 6, nn::Head::linear, 4, 100), 1e-3);
    report("gae vs brute force", gae_error(5), 1e-10);
    report("ema closed form", ema_error(), 1e-12);
    report("confidence vs brute-force variance", confidence_error(6), 1e-12);

    modulation::ModulationConfig m;
    report("lr ceiling 6x base", std::abs(modulation::modulate_lr(1e6, m) - 6.0 * m.base_lr), 1e-15);
    m.curiosity_setpoint = 0.3;
    report("entropy midpoint at setpoint", std::abs(modulation::modulate_entropy(0.3, m) - 0.05), 1e-15);
    return ok;
}

}  // namespace eils::tools
