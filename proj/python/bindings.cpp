#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "eils/config.hpp"
#include "eils/harness.hpp"
#include "eils/metrics.hpp"
#include "eils/modulation.hpp"

namespace py = pybind11;
using namespace eils;

namespace {

ExperimentConfig make_config(const std::string& env, const std::string& agent, std::size_t episodes,
                             const std::vector<std::uint64_t>& seeds,
                             const std::optional<std::filesystem::path>& config) {
    ExperimentConfig cfg = config ? load_config(*config) : ExperimentConfig{};
    cfg.env = env::parse_env_kind(env);
    cfg.agent = parse_agent_arm(agent);
    cfg.episodes = episodes;
    cfg.seeds = seeds;
    cfg.validate();
    return cfg;
}

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["seed"] = r.seed;
    d["episode"] = r.episode;
    d["return"] = r.episode_return;
    d["length"] = r.length;
    d["sigma"] = r.sigma;
    d["kappa"] = r.kappa;
    d["phi"] = r.phi;
    d["alpha"] = r.alpha;
    d["beta"] = r.beta;
    d["epsilon"] = r.epsilon;
    d["deficit"] = r.deficit;
    d["coverage"] = r.coverage;
    d["phase"] = r.phase;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Internal-state modulated PPO: training loop, environments and metrics.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "modulate",
        [](double stress, double curiosity, double confidence, double curiosity_setpoint, bool ablated) {
            modulation::ModulationConfig cfg;
            cfg.curiosity_setpoint = curiosity_setpoint;
            cfg.disable_stress = ablated;
            cfg.validate();
            const auto hp = modulation::modulate({stress, curiosity, confidence}, cfg);
            return py::make_tuple(hp.lr, hp.entropy_coef, hp.clip);
        },
        py::arg("stress"), py::arg("curiosity"), py::arg("confidence"), py::arg("curiosity_setpoint") = 0.0,
        py::arg("ablated") = false, "Returns (learning rate, entropy coefficient, clip range).");

    m.def(
        "run",
        [](const std::string& env, const std::string& agent, std::size_t episodes, std::vector<std::uint64_t> seeds,
           std::optional<std::filesystem::path> config, std::optional<std::filesystem::path> out) {
            auto cfg = make_config(env, agent, episodes, seeds, config);
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(cfg);
            }
            if (out) {
                cfg.out_dir = *out;
                write_outputs(cfg, result);
            }
            py::list rows;
            for (const auto& r : result.records) rows.append(record_dict(r));
            return rows;
        },
        py::arg("env"), py::arg("agent"), py::arg("episodes"), py::arg("seeds") = std::vector<std::uint64_t>{0},
        py::arg("config") = py::none(), py::arg("out") = py::none(),
        "Trains one arm over the given seeds and returns one dict per (seed, episode).");

    m.def(
        "recovery_time",
        [](const std::vector<double>& returns, std::size_t shift, double threshold, std::size_t window) {
            return metrics::recovery_time(returns, shift, threshold, window);
        },
        py::arg("returns"), py::arg("shift"), py::arg("threshold") = 195.0, py::arg("window") = 100);

    m.def(
        "reversal_speed",
        [](const std::vector<double>& returns, std::size_t flip, std::size_t window) {
            return metrics::reversal_speed(returns, flip, window);
        },
        py::arg("returns"), py::arg("flip"), py::arg("window") = 50);

    m.def("parse_seed_list", [](const std::string& text) { return parse_seed_list(text); });
}
