// eils: run homeostatic-PPO experiments, compare arms, draw figures, self-test.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "eils/compare.hpp"
#include "eils/config.hpp"
#include "eils/figures.hpp"
#include "eils/harness.hpp"
#include "selfcheck.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitSelfTest = 3;

bool records_finite(const std::vector<eils::RunRecord>& records) {
    for (const auto& r : records) {
        for (double v : {r.episode_return, r.sigma, r.kappa, r.phi, r.alpha, r.beta, r.epsilon, r.deficit, r.coverage}) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

eils::ExperimentConfig base_config(const std::string& config_path) {
    eils::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = eils::load_config(config_path, cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homeostatic meta-regulation of PPO: experiments and diagnostics"};
    app.require_subcommand(1);

    std::string env_name = "dynamic-cartpole";
    std::string agent_name = "eils";
    std::optional<std::size_t> episodes;
    std::string seeds_text;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::size_t> jobs;

    auto* run = app.add_subcommand("run", "Train one agent arm on one environment over a seed list");
    run->add_option("--env", env_name, "dynamic-cartpole | sparse-maze | reversal")
        ->check(CLI::IsMember({"dynamic-cartpole", "sparse-maze", "reversal"}));
    run->add_option("--agent", agent_name, "ppo | eils | eils-ablated")->check(CLI::IsMember({"ppo", "eils", "eils-ablated"}));
    run->add_option("--episodes", episodes, "Episodes per seed");
    run->add_option("--seeds", seeds_text, "Comma-separated seed list");
    run->add_option("--config", config_path, "INI config file");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--jobs", jobs, "Worker threads (0 = hardware concurrency)");

    auto* compare = app.add_subcommand("compare", "Summarise all runs found in an output directory");
    compare->add_option("--out", out_dir, "Directory holding records_*.csv")->required();
    compare->add_option("--config", config_path, "INI config with shift episodes and metric windows");

    auto* figures = app.add_subcommand("figures", "Write SVG diagnostics for the runs in an output directory");
    figures->add_option("--out", out_dir, "Directory holding records_*.csv")->required();
    figures->add_option("--config", config_path, "INI config with shift episodes and grid sizes");

    auto* check = app.add_subcommand("check", "Run gradient and oracle self-tests");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = base_config(config_path);
            cfg.env = eils::env::parse_env_kind(env_name);
            cfg.agent = eils::parse_agent_arm(agent_name);
            if (episodes) cfg.episodes = *episodes;
            if (!seeds_text.empty()) cfg.seeds = eils::parse_seed_list(seeds_text);
            if (jobs) cfg.jobs = *jobs;
            cfg.out_dir = out_dir;
            cfg.validate();

            const auto result = eils::run_experiment(cfg);
            eils::write_outputs(cfg, result);
            std::cout << eils::format_table(eils::compare_arms({{cfg, result.records}}));
            std::cout << "wrote " << (cfg.out_dir / eils::records_filename(cfg.env, cfg.agent)).string() << '\n';
            if (result.aborted_updates > 0 || !records_finite(result.records)) {
                std::cerr << "numeric failure: " << result.aborted_updates << " aborted updates\n";
                return kExitNumeric;
            }
            return 0;
        }
        if (*compare) {
            const auto cfg = base_config(config_path);
            const auto rows = eils::compare_directory(out_dir, cfg);
            if (rows.empty()) {
                std::cerr << "no records_*.csv files in " << out_dir << '\n';
                return kExitConfig;
            }
            eils::write_summary_csv(rows, std::filesystem::path(out_dir) / "summary.csv");
            std::cout << eils::format_table(rows);
            return 0;
        }
        if (*figures) {
            const auto cfg = base_config(config_path);
            for (const auto& notice : eils::figures::emit_figures(out_dir, cfg)) std::cout << notice << '\n';
            return 0;
        }
        if (*check) {
            return eils::tools::run_self_checks(std::cout) ? 0 : kExitSelfTest;
        }
    } catch (const eils::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
