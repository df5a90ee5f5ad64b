#include "eils/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace eils {

namespace pt = boost::property_tree;

std::string_view to_string(AgentArm arm) {
    switch (arm) {
        case AgentArm::ppo_baseline: return "ppo";
        case AgentArm::eils_full: return "eils";
        case AgentArm::eils_ablated: return "eils-ablated";
    }
    return "unknown";
}

AgentArm parse_agent_arm(std::string_view name) {
    if (name == "ppo" || name == "ppo-baseline") return AgentArm::ppo_baseline;
    if (name == "eils" || name == "eils-full") return AgentArm::eils_full;
    if (name == "eils-ablated") return AgentArm::eils_ablated;
    throw ConfigError("unknown agent: " + std::string(name));
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto s = trim(text);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ConfigError(key + ": not a number: " + text);
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto s = trim(text);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(key + ": not a nonnegative integer: " + text);
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(key + ": not a boolean: " + text);
}

env::GridCell parse_cell(const std::string& key, const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError(key + ": expected x,y");
    return {static_cast<int>(parse_double(key, text.substr(0, comma))),
            static_cast<int>(parse_double(key, text.substr(comma + 1)))};
}

std::string format_cell(env::GridCell c) { return std::to_string(c.x) + "," + std::to_string(c.y); }

struct Field {
    std::string section;
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

std::vector<Field> bind_fields(ExperimentConfig& c) {
    std::vector<Field> f;
    auto real = [&f](std::string sec, std::string key, double& ref) {
        const std::string name = sec + "." + key;
        f.push_back({sec, key, [&ref, name](const std::string& v) { ref = parse_double(name, v); },
                     [&ref] { return format_double(ref); }});
    };
    auto count = [&f](std::string sec, std::string key, std::size_t& ref) {
        const std::string name = sec + "." + key;
        f.push_back({sec, key, [&ref, name](const std::string& v) { ref = parse_unsigned(name, v); },
                     [&ref] { return std::to_string(ref); }});
    };
    auto flag = [&f](std::string sec, std::string key, bool& ref) {
        const std::string name = sec + "." + key;
        f.push_back({sec, key, [&ref, name](const std::string& v) { ref = parse_bool(name, v); },
                     [&ref] { return std::string(ref ? "true" : "false"); }});
    };
    auto cell = [&f](std::string sec, std::string key, env::GridCell& ref) {
        const std::string name = sec + "." + key;
        f.push_back({sec, key, [&ref, name](const std::string& v) { ref = parse_cell(name, v); },
                     [&ref] { return format_cell(ref); }});
    };

    f.push_back({"experiment", "env", [&c](const std::string& v) {
                     try {
                         c.env = env::parse_env_kind(trim(v));
                     } catch (const std::invalid_argument& e) {
                         throw ConfigError(e.what());
                     }
                 },
                 [&c] { return std::string(env::to_string(c.env)); }});
    f.push_back({"experiment", "agent", [&c](const std::string& v) { c.agent = parse_agent_arm(trim(v)); },
                 [&c] { return std::string(to_string(c.agent)); }});
    count("experiment", "episodes", c.episodes);
    f.push_back({"experiment", "seeds", [&c](const std::string& v) { c.seeds = parse_seed_list(v); },
                 [&c] {
                     std::string s;
                     for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? "," : "") + std::to_string(c.seeds[i]);
                     return s;
                 }});
    count("experiment", "jobs", c.jobs);
    f.push_back({"experiment", "out", [&c](const std::string& v) { c.out_dir = trim(v); },
                 [&c] { return c.out_dir.string(); }});

    real("ppo", "gamma", c.ppo.gamma);
    real("ppo", "clip_base", c.ppo.base_clip);
    real("ppo", "lr_base", c.ppo.base_lr);
    count("ppo", "batch_size", c.ppo.batch_size);
    real("ppo", "gae_decay", c.ppo.gae_decay);
    count("ppo", "epochs", c.ppo.epochs);
    count("ppo", "minibatch_size", c.ppo.minibatch_size);
    real("ppo", "value_coef", c.ppo.value_coef);
    real("ppo", "max_grad_norm", c.ppo.max_grad_norm);
    real("ppo", "baseline_entropy", c.ppo.baseline_entropy);
    real("ppo", "baseline_final_lr", c.ppo.final_lr);
    count("ppo", "baseline_lr_decay_episodes", c.ppo.lr_decay_episodes);

    real("ism", "stress_decay", c.ism.stress_decay);
    real("ism", "curiosity_decay", c.ism.curiosity_decay);
    count("ism", "confidence_window", c.ism.confidence_window);
    count("ism", "setpoint_calibration_steps", c.ism.setpoint_calibration_steps);

    real("modulation", "stress_sensitivity", c.modulation.stress_sensitivity);
    real("modulation", "entropy_min", c.modulation.entropy_min);
    real("modulation", "entropy_max", c.modulation.entropy_max);
    real("modulation", "confidence_sensitivity", c.modulation.confidence_sensitivity);
    real("modulation", "fixed_entropy", c.modulation.fixed_entropy);
    flag("modulation", "disable_stress", c.modulation.disable_stress);
    flag("modulation", "disable_curiosity", c.modulation.disable_curiosity);
    flag("modulation", "disable_confidence", c.modulation.disable_confidence);
    f.push_back({"modulation", "curiosity_setpoint",
                 [&c](const std::string& v) {
                     const auto s = trim(v);
                     if (s == "auto") {
                         c.curiosity_setpoint.reset();
                     } else {
                         c.curiosity_setpoint = parse_double("modulation.curiosity_setpoint", s);
                     }
                 },
                 [&c] { return c.curiosity_setpoint ? format_double(*c.curiosity_setpoint) : std::string("auto"); }});

    real("dynamics", "lr", c.dynamics_lr);

    auto& cp = c.cartpole;
    real("cartpole", "gravity", cp.gravity);
    real("cartpole", "pole_mass", cp.pole_mass);
    real("cartpole", "cart_mass", cp.cart_mass);
    real("cartpole", "pole_half_length", cp.pole_half_length);
    real("cartpole", "force_magnitude", cp.force_magnitude);
    real("cartpole", "timestep", cp.timestep);
    real("cartpole", "angle_limit", cp.angle_limit);
    real("cartpole", "position_limit", cp.position_limit);
    count("cartpole", "max_steps", cp.max_steps);
    count("cartpole", "shift_episode", cp.shift_episode);
    real("cartpole", "shifted_gravity", cp.shifted_gravity);
    real("cartpole", "shifted_pole_mass", cp.shifted_pole_mass);

    auto& mz = c.maze;
    f.push_back({"maze", "width", [&mz](const std::string& v) { mz.width = static_cast<int>(parse_unsigned("maze.width", v)); },
                 [&mz] { return std::to_string(mz.width); }});
    f.push_back({"maze", "height", [&mz](const std::string& v) { mz.height = static_cast<int>(parse_unsigned("maze.height", v)); },
                 [&mz] { return std::to_string(mz.height); }});
    cell("maze", "start", mz.start);
    cell("maze", "goal", mz.goal);
    count("maze", "max_steps", mz.max_steps);
    f.push_back({"maze", "wall_file",
                 [&c](const std::string& v) {
                     const auto s = trim(v);
                     if (s.empty()) {
                         c.maze_wall_file.reset();
                     } else {
                         c.maze_wall_file = s;
                     }
                 },
                 [&c] { return c.maze_wall_file ? c.maze_wall_file->string() : std::string(); }});

    auto& rv = c.reversal;
    f.push_back({"reversal", "width", [&rv](const std::string& v) { rv.width = static_cast<int>(parse_unsigned("reversal.width", v)); },
                 [&rv] { return std::to_string(rv.width); }});
    f.push_back({"reversal", "height", [&rv](const std::string& v) { rv.height = static_cast<int>(parse_unsigned("reversal.height", v)); },
                 [&rv] { return std::to_string(rv.height); }});
    cell("reversal", "start", rv.start);
    cell("reversal", "red_key", rv.red_key);
    cell("reversal", "blue_key", rv.blue_key);
    cell("reversal", "door", rv.door);
    real("reversal", "phase1_red", rv.phase1_red);
    real("reversal", "phase1_blue", rv.phase1_blue);
    real("reversal", "phase2_red", rv.phase2_red);
    real("reversal", "phase2_blue", rv.phase2_blue);
    count("reversal", "flip_episode", rv.flip_episode);
    count("reversal", "max_steps", rv.max_steps);

    real("metrics", "recovery_threshold", c.metrics.recovery_threshold);
    count("metrics", "recovery_window", c.metrics.recovery_window);
    count("metrics", "success_window", c.metrics.success_window);
    count("metrics", "reversal_window", c.metrics.reversal_window);
    count("metrics", "coverage_window", c.metrics.coverage_window);
    return f;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> seeds;
    std::string item;
    std::istringstream ss{std::string(text)};
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        seeds.push_back(parse_unsigned("seeds", item));
    }
    if (seeds.empty()) throw ConfigError("seed list is empty");
    return seeds;
}

void ExperimentConfig::validate() const {
    if (episodes == 0) throw ConfigError("episodes must be at least 1");
    if (seeds.empty()) throw ConfigError("seed list must not be empty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seed list must hold distinct values");
    }
    if (!(dynamics_lr > 0.0)) throw ConfigError("dynamics.lr must be positive");
    if (metrics.recovery_window == 0 || metrics.success_window == 0 || metrics.reversal_window == 0) {
        throw ConfigError("metric windows must be positive");
    }
    try {
        ppo.validate();
        ism.validate();
        arm_modulation().validate();
        switch (env) {
            case env::EnvKind::dynamic_cartpole: cartpole.validate(); break;
            case env::EnvKind::sparse_maze: maze.validate(); break;
            case env::EnvKind::reversal: reversal.validate(); break;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

modulation::ModulationConfig ExperimentConfig::arm_modulation() const {
    auto m = modulation;
    m.base_lr = ppo.base_lr;
    m.base_clip = ppo.base_clip;
    if (curiosity_setpoint) m.curiosity_setpoint = *curiosity_setpoint;
    switch (agent) {
        case AgentArm::ppo_baseline:
            m.disable_stress = m.disable_curiosity = m.disable_confidence = true;
            m.fixed_entropy = ppo.baseline_entropy;
            break;
        case AgentArm::eils_ablated: m.disable_stress = true; break;
        case AgentArm::eils_full: break;
    }
    return m;
}

std::optional<std::size_t> ExperimentConfig::regime_change_episode() const {
    switch (env) {
        case env::EnvKind::dynamic_cartpole: return cartpole.shift_episode;
        case env::EnvKind::reversal: return reversal.flip_episode;
        case env::EnvKind::sparse_maze: return std::nullopt;
    }
    return std::nullopt;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    auto fields = bind_fields(base);
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) throw ConfigError("config: key outside a section: " + section);
        for (const auto& [key, value] : body) {
            auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
            if (it == fields.end()) throw ConfigError("config: unknown key " + section + "." + key);
            it->set(value.data());
        }
    }
    if (base.maze_wall_file) {
        try {
            base.maze.walls = env::load_wall_file(*base.maze_wall_file);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
    return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
    ExperimentConfig copy = cfg;
    std::string section;
    for (const auto& f : bind_fields(copy)) {
        if (f.section != section) {
            out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
            section = f.section;
        }
        out << f.key << " = " << f.get() << '\n';
    }
}

}  // namespace eils
