// Acceptance runner: trains every arm needed by the eight acceptance criteria,
// evaluates each one from the emitted CSV files and prints one PASS/FAIL line
// per criterion. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eils/config.hpp"
#include "eils/harness.hpp"
#include "eils/ism.hpp"
#include "eils/metrics.hpp"
#include "eils/modulation.hpp"
#include "eils/nn.hpp"
#include "eils/ppo.hpp"
#include "eils/records.hpp"

namespace fs = std::filesystem;
using namespace eils;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string list(const std::vector<std::optional<std::size_t>>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? " " : "") + (v[i] ? std::to_string(*v[i]) : std::string("-"));
    }
    return s + "]";
}

class Runner {
public:
    Runner(fs::path out, std::size_t jobs) : out_(std::move(out)), jobs_(jobs) {}

    // Trains (env, arm) over the standard five seeds unless already done and
    // returns the records read back from the CSV on disk.
    std::vector<RunRecord> records(env::EnvKind kind, AgentArm arm) {
        const auto key = std::string(env::to_string(kind)) + "/" + std::string(to_string(arm));
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const auto cfg = config(kind, arm, out_);
        const auto t0 = std::chrono::steady_clock::now();
        const auto result = run_experiment(cfg);
        write_outputs(cfg, result);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << "  trained " << key << " (" << cfg.seeds.size() << " seeds x " << cfg.episodes
                  << " episodes) in " << fmt("%.0f", secs) << " s\n"
                  << std::flush;
        auto loaded = load_csv(cfg.out_dir / records_filename(kind, arm));
        cache_[key] = loaded;
        return loaded;
    }

    ExperimentConfig config(env::EnvKind kind, AgentArm arm, const fs::path& dir) const {
        ExperimentConfig cfg;
        cfg.env = kind;
        cfg.agent = arm;
        cfg.episodes = 1000;
        cfg.seeds = {0, 1, 2, 3, 4};
        cfg.jobs = jobs_;
        cfg.out_dir = dir;
        return cfg;
    }

    const fs::path& out() const { return out_; }
    std::size_t jobs() const { return jobs_; }

private:
    fs::path out_;
    std::size_t jobs_;
    std::map<std::string, std::vector<RunRecord>> cache_;
};

std::vector<std::optional<std::size_t>> recoveries(const std::vector<RunRecord>& records, std::size_t shift) {
    std::vector<std::optional<std::size_t>> out;
    for (auto seed : seeds_in(records)) {
        out.push_back(metrics::recovery_time(returns_of(records_for_seed(records, seed)), shift));
    }
    return out;
}

std::size_t count_recovered(const std::vector<std::optional<std::size_t>>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const auto& r) { return r.has_value(); }));
}

double median_with_failures(const std::vector<std::optional<std::size_t>>& v) {
    std::vector<double> xs;
    for (const auto& r : v) xs.push_back(r ? static_cast<double>(*r) : std::numeric_limits<double>::infinity());
    return metrics::median(xs);
}

Verdict criterion1(Runner& run) {
    const auto ppo = recoveries(run.records(env::EnvKind::dynamic_cartpole, AgentArm::ppo_baseline), 500);
    const auto full = recoveries(run.records(env::EnvKind::dynamic_cartpole, AgentArm::eils_full), 500);
    const double med = median_with_failures(full);
    const bool pass = ppo.size() - count_recovered(ppo) >= 4 && count_recovered(full) >= 4 && med <= 150.0;
    return {pass, "ppo recovery " + list(ppo) + ", eils recovery " + list(full) + ", eils median " + fmt("%.1f", med) +
                      " (need ppo failed >= 4/5, eils recovered >= 4/5, median <= 150)"};
}

Verdict criterion2(Runner& run) {
    const auto records = run.records(env::EnvKind::dynamic_cartpole, AgentArm::eils_full);
    // Seed-mean trace per episode, as plotted in the diagnostic figures.
    std::map<std::size_t, std::pair<double, double>> sums;
    std::map<std::size_t, std::size_t> counts;
    for (const auto& r : records) {
        sums[r.episode].first += r.alpha;
        sums[r.episode].second += r.sigma;
        ++counts[r.episode];
    }
    auto alpha = [&](std::size_t e) { return sums[e].first / static_cast<double>(counts[e]); };
    auto sigma = [&](std::size_t e) { return sums[e].second / static_cast<double>(counts[e]); };
    double before = 0.0;
    for (std::size_t e = 400; e < 500; ++e) before += alpha(e);
    before /= 100.0;
    std::size_t peak_alpha = 500, peak_sigma = 500;
    for (std::size_t e = 500; e <= 560; ++e) {
        if (alpha(e) > alpha(peak_alpha)) peak_alpha = e;
        if (sigma(e) > sigma(peak_sigma)) peak_sigma = e;
    }
    const double ratio = alpha(peak_alpha) / before;
    std::size_t seeds_ok = 0;
    for (auto seed : seeds_in(records)) {
        const auto rs = records_for_seed(records, seed);
        double b = 0.0;
        for (std::size_t e = 400; e < 500; ++e) b += rs[e].alpha;
        double m = 0.0;
        for (std::size_t e = 500; e <= 560; ++e) m = std::max(m, rs[e].alpha);
        seeds_ok += m >= 3.0 * b / 100.0;
    }
    const bool pass = ratio >= 3.0 && peak_sigma <= peak_alpha;
    return {pass, "seed-mean alpha peak/pre-shift mean " + fmt("%.2f", ratio) + " (need >= 3), peak sigma at episode " +
                      std::to_string(peak_sigma) + ", peak alpha at episode " + std::to_string(peak_alpha) +
                      "; individual seeds reaching 3x: " + std::to_string(seeds_ok) + "/5"};
}

Verdict criterion3(Runner& run) {
    const auto ablated = recoveries(run.records(env::EnvKind::dynamic_cartpole, AgentArm::eils_ablated), 500);
    return {count_recovered(ablated) <= 1,
            "ablated recovery " + list(ablated) + " (need recovered <= 1/5)"};
}

Verdict criterion4(Runner& run) {
    ExperimentConfig cfg;
    cfg.env = env::EnvKind::sparse_maze;
    cfg.agent = AgentArm::ppo_baseline;
    const auto ppo = metrics::summarize(run.records(env::EnvKind::sparse_maze, AgentArm::ppo_baseline), cfg);
    cfg.agent = AgentArm::eils_full;
    const auto full = metrics::summarize(run.records(env::EnvKind::sparse_maze, AgentArm::eils_full), cfg);
    const bool success = full.success.mean >= 2.0 * ppo.success.mean && full.success.mean > 0.0;
    const bool coverage = full.coverage.mean >= 60.0 && ppo.coverage.mean <= 35.0;
    return {success && coverage, "success eils " + fmt("%.1f", full.success.mean) + "% vs ppo " +
                                     fmt("%.1f", ppo.success.mean) + "% (need >= 2x), coverage eils " +
                                     fmt("%.1f", full.coverage.mean) + "% (need >= 60) vs ppo " +
                                     fmt("%.1f", ppo.coverage.mean) + "% (need <= 35)"};
}

Verdict criterion5(Runner& run) {
    auto speeds = [&](AgentArm arm) {
        std::vector<std::optional<std::size_t>> out;
        const auto records = run.records(env::EnvKind::reversal, arm);
        for (auto seed : seeds_in(records)) {
            out.push_back(metrics::reversal_speed(returns_of(records_for_seed(records, seed)), 300, 50));
        }
        return out;
    };
    const auto ppo = speeds(AgentArm::ppo_baseline);
    const auto full = speeds(AgentArm::eils_full);
    const double mp = median_with_failures(ppo);
    const double mf = median_with_failures(full);
    return {std::isfinite(mf) && mf < mp, "episodes to positive trailing-50 mean: eils " + list(full) + " median " +
                                              fmt("%g", mf) + ", ppo " + list(ppo) + " median " + fmt("%g", mp) +
                                              " (need eils strictly fewer)"};
}

double brute_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size());
}

Verdict criterion6() {
    double ema_err = 0.0;
    for (double eta : {0.05, 0.01}) {
        for (double c : {0.5, 1.0, 4.0}) {
            double s = 0.0, k = 0.0;
            for (int t = 1; t <= 1000; ++t) {
                s = ism::stress_update(s, -c, eta);
                k = ism::curiosity_update(k, c, eta);
                const double closed = c * (1.0 - std::pow(1.0 - eta, t));
                ema_err = std::max({ema_err, std::abs(s - closed), std::abs(k - closed)});
            }
        }
    }
    std::mt19937_64 rng(6);
    std::normal_distribution<double> normal(0.0, 3.0);
    double var_err = 0.0;
    ism::ValueWindow window(50);
    std::vector<double> history;
    for (int i = 0; i < 5000; ++i) {
        const double v = normal(rng);
        window.push(v);
        history.push_back(v);
        const std::size_t n = std::min<std::size_t>(history.size(), 50);
        const std::vector<double> tail(history.end() - static_cast<std::ptrdiff_t>(n), history.end());
        var_err = std::max(var_err, std::abs(ism::confidence(window) - 1.0 / (1.0 + brute_variance(tail))));
    }

    modulation::ModulationConfig cfg;
    cfg.curiosity_setpoint = 0.3;
    std::exponential_distribution<double> stress(0.5), curiosity(3.0);
    std::uniform_real_distribution<double> conf(1e-6, 1.0);
    std::size_t violations = 0;
    const double h = 1e-6;
    for (int i = 0; i < 1000000; ++i) {
        const ism::InternalState s{stress(rng), curiosity(rng), conf(rng)};
        const auto a = modulation::modulate(s, cfg);
        const auto b = modulation::modulate({s.stress + h, s.curiosity + h, std::min(1.0, s.confidence + h)}, cfg);
        const bool bounded = a.lr >= cfg.base_lr && a.lr <= 6.0 * cfg.base_lr && a.entropy_coef >= cfg.entropy_min &&
                             a.entropy_coef <= cfg.entropy_max && a.clip >= 0.5 * cfg.base_clip && a.clip <= cfg.base_clip;
        const bool monotone = b.lr >= a.lr && b.entropy_coef <= a.entropy_coef && b.clip <= a.clip;
        const bool continuous = b.lr - a.lr <= 5.0 * cfg.base_lr * h * 1.000001 &&
                                a.entropy_coef - b.entropy_coef <= 0.025 * h * 1.000001 &&
                                a.clip - b.clip <= 0.1 * h * 1.000001 + 1e-15;
        violations += !(bounded && monotone && continuous);
    }
    const double ceiling = modulation::modulate_lr(std::numeric_limits<double>::infinity(), cfg) / cfg.base_lr;
    const double midpoint = modulation::modulate_entropy(cfg.curiosity_setpoint, cfg);
    const bool pass = ema_err < 1e-12 && var_err < 1e-12 && violations == 0 && std::abs(ceiling - 6.0) < 1e-12 &&
                      std::abs(midpoint - 0.05) < 1e-12;
    return {pass, "EMA err " + fmt("%.1e", ema_err) + ", confidence err " + fmt("%.1e", var_err) +
                      ", modulation violations " + std::to_string(violations) + "/1000000, lr ceiling " +
                      fmt("%.12g", ceiling) + "x, entropy midpoint " + fmt("%.12g", midpoint)};
}

double gradient_error(std::size_t in, std::size_t out, nn::Head head, std::uint64_t seed, std::size_t probes) {
    auto net = nn::MlpNet::initialized(in, out, head, seed);
    std::mt19937_64 rng(seed ^ 0x5eed);
    std::normal_distribution<double> normal;
    std::vector<double> x(in), g(out);
    for (double& v : x) v = normal(rng);
    for (double& v : g) v = normal(rng);
    auto objective = [&] {
        const auto y = net.forward(x);
        return std::inner_product(y.begin(), y.end(), g.begin(), 0.0);
    };
    const auto grads = nn::mlp_backward(net, x, g);
    std::uniform_int_distribution<std::size_t> pick(0, net.param_count() - 1);
    double worst = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        const std::size_t k = pick(rng);
        const double saved = net.params()[k];
        net.params()[k] = saved + 1e-5;
        const double up = objective();
        net.params()[k] = saved - 1e-5;
        const double down = objective();
        net.params()[k] = saved;
        const double fd = (up - down) / 2e-5;
        worst = std::max(worst, std::abs(grads.values[k] - fd) / std::max(1e-6, std::abs(grads.values[k]) + std::abs(fd)));
    }
    return worst;
}

Verdict criterion7() {
    struct Arch {
        std::size_t in, out;
        nn::Head head;
    };
    // Agent nets (A logits + value), forward models (obs + one-hot -> obs) and a
    // softmax policy for each environment.
    const std::vector<Arch> archs{{4, 3, nn::Head::linear},  {2, 5, nn::Head::linear},  {6, 5, nn::Head::linear},
                                  {6, 4, nn::Head::linear},  {6, 2, nn::Head::linear},  {10, 6, nn::Head::linear},
                                  {4, 2, nn::Head::softmax}, {2, 4, nn::Head::softmax}, {6, 4, nn::Head::softmax}};
    double grad_err = 0.0;
    for (std::size_t i = 0; i < archs.size(); ++i) {
        grad_err = std::max(grad_err, gradient_error(archs[i].in, archs[i].out, archs[i].head, 100 + i, 200));
    }

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::bernoulli_distribution end(0.25);
    double gae_err = 0.0;
    std::size_t trajectories = 0;
    for (std::size_t len = 1; len <= 8; ++len) {
        for (int trial = 0; trial < 500; ++trial, ++trajectories) {
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
            ppo::compute_gae(b, 0.99, 0.95);
            for (std::size_t t = 0; t < len; ++t) {
                double sum = 0.0, w = 1.0;
                for (std::size_t k = t; k < len; ++k) {
                    const auto& tr = b.transitions[k];
                    sum += w * (tr.reward + 0.99 * tr.next_value * (tr.terminated ? 0.0 : 1.0) - tr.value);
                    if (tr.terminated || tr.truncated) break;
                    w *= 0.99 * 0.95;
                }
                gae_err = std::max(gae_err, std::abs(sum - b.advantages[t]));
            }
        }
    }

    double softmax_err = 0.0;
    std::normal_distribution<double> wide(0.0, 20.0);
    for (int i = 0; i < 2000; ++i) {
        const auto net = nn::MlpNet::initialized(4, 2 + i % 5, nn::Head::softmax, 7000 + i);
        std::vector<double> x(4);
        for (double& v : x) v = wide(rng);
        const auto p = net.forward(x);
        softmax_err = std::max(softmax_err, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
    }
    const bool pass = grad_err < 1e-3 && gae_err < 1e-10 && softmax_err < 1e-6;
    return {pass, "max gradient rel err " + fmt("%.1e", grad_err) + " (" + std::to_string(archs.size()) +
                      " architectures x 200 probes), GAE err " + fmt("%.1e", gae_err) + " over " +
                      std::to_string(trajectories) + " trajectories, softmax err " + fmt("%.1e", softmax_err)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict criterion8(Runner& run) {
    (void)run.records(env::EnvKind::dynamic_cartpole, AgentArm::eils_full);
    const auto repeat_dir = run.out() / "repeat";
    const auto cfg = run.config(env::EnvKind::dynamic_cartpole, AgentArm::eils_full, repeat_dir);
    write_outputs(cfg, run_experiment(cfg));
    const auto name = records_filename(cfg.env, cfg.agent);
    const auto a = slurp(run.out() / name);
    const auto b = slurp(repeat_dir / name);
    return {!a.empty() && a == b, name + " repeated run: " + std::to_string(a.size()) + " bytes, " +
                                      (a == b ? "bit-identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out = fs::temp_directory_path() / "eils_acceptance";
    std::size_t jobs = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--out" && i + 1 < argc) {
            out = argv[++i];
        } else if (arg == "--jobs" && i + 1 < argc) {
            jobs = std::stoul(argv[++i]);
        } else {
            std::cerr << "usage: eils_acceptance [--out DIR] [--jobs N]\n";
            return 2;
        }
    }
    fs::create_directories(out);
    Runner run(out, jobs);

    std::vector<std::pair<int, Verdict>> verdicts;
    auto record = [&](int n, Verdict v) {
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << '\n' << std::flush;
        verdicts.emplace_back(n, std::move(v));
    };
    record(6, criterion6());
    record(7, criterion7());
    record(1, criterion1(run));
    record(2, criterion2(run));
    record(3, criterion3(run));
    record(8, criterion8(run));
    record(4, criterion4(run));
    record(5, criterion5(run));

    std::sort(verdicts.begin(), verdicts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::cout << "\nsummary\n";
    int failed = 0;
    for (const auto& [n, v] : verdicts) {
        std::cout << "  criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << '\n';
        failed += !v.pass;
    }
    std::cout << "records written to " << out.string() << '\n';
    return failed == 0 ? 0 : 1;
}
