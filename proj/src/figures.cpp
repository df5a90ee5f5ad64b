#include "eils/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "eils/harness.hpp"

namespace eils::figures {

namespace {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

enum class Field { ret, sigma, alpha };

double field_of(const RunRecord& r, Field f) {
    switch (f) {
        case Field::ret: return r.episode_return;
        case Field::sigma: return r.sigma;
        case Field::alpha: return r.alpha;
    }
    return 0.0;
}

// Mean over seeds per episode, restricted to [lo, hi].
Series episode_mean(const std::vector<RunRecord>& records, Field f, std::size_t lo, std::size_t hi) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& r : records) {
        if (r.episode < lo || r.episode > hi) continue;
        auto& [sum, n] = acc[r.episode];
        sum += field_of(r, f);
        ++n;
    }
    Series s;
    for (const auto& [ep, v] : acc) {
        s.x.push_back(static_cast<double>(ep));
        s.y.push_back(v.first / static_cast<double>(v.second));
    }
    return s;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) < 1e-2 || std::abs(v) >= 1e4)) {
        std::snprintf(buf, sizeof buf, "%.1e", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.3g", v);
    }
    return buf;
}

struct Panel {
    double left, top, width, height;
    std::string title;
    std::string color;
    Series series;
};

void draw_panel(std::ostream& svg, const Panel& p, double x_lo, double x_hi, std::optional<double> marker) {
    double y_lo = 0.0;
    double y_hi = 1e-12;
    for (double v : p.series.y) {
        y_lo = std::min(y_lo, v);
        y_hi = std::max(y_hi, v);
    }
    y_hi += 0.05 * (y_hi - y_lo);
    const auto sx = [&](double x) { return p.left + (x - x_lo) / std::max(1e-12, x_hi - x_lo) * p.width; };
    const auto sy = [&](double y) { return p.top + p.height - (y - y_lo) / (y_hi - y_lo) * p.height; };

    svg << "<rect x=\"" << num(p.left) << "\" y=\"" << num(p.top) << "\" width=\"" << num(p.width) << "\" height=\""
        << num(p.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << num(p.left) << "\" y=\"" << num(p.top - 6) << "\" font-size=\"13\">" << p.title << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double y = y_lo + (y_hi - y_lo) * k / 4.0;
        svg << "<text x=\"" << num(p.left - 6) << "\" y=\"" << num(sy(y) + 4)
            << "\" font-size=\"10\" text-anchor=\"end\">" << tick(y) << "</text>\n";
    }
    for (int k = 0; k <= 5; ++k) {
        const double x = x_lo + (x_hi - x_lo) * k / 5.0;
        svg << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(p.top + p.height + 14)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << tick(std::round(x)) << "</text>\n";
    }
    if (!p.series.x.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << p.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < p.series.x.size(); ++i) svg << num(sx(p.series.x[i])) << ',' << num(sy(p.series.y[i])) << ' ';
        svg << "\"/>\n";
    }
    if (marker) {
        svg << "<line x1=\"" << num(sx(*marker)) << "\" y1=\"" << num(p.top) << "\" x2=\"" << num(sx(*marker))
            << "\" y2=\"" << num(p.top + p.height) << "\" stroke=\"red\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n";
    }
}

bool write_panels(const std::vector<Panel>& panels, double x_lo, double x_hi, std::optional<double> marker,
                  const std::string& title, const std::filesystem::path& path) {
    const double width = 760;
    const double height = 60 + 190 * static_cast<double>(panels.size());
    std::ofstream svg(path);
    if (!svg) throw std::runtime_error("cannot open for writing: " + path.string());
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" << title << "</text>\n";
    for (const auto& p : panels) draw_panel(svg, p, x_lo, x_hi, marker);
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 8 << "\" font-size=\"12\" text-anchor=\"middle\">episode</text>\n";
    svg << "</svg>\n";
    return true;
}

std::string heat_color(double t) {
    // Dark blue to yellow.
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(20 + 235 * t));
    const int g = static_cast<int>(std::lround(20 + 210 * std::sqrt(t)));
    const int b = static_cast<int>(std::lround(80 * (1.0 - t) + 30));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

bool write_recovery_figure(const std::vector<RunRecord>& records, std::size_t shift, const std::filesystem::path& path) {
    if (records.empty()) return false;
    std::size_t last = 0;
    for (const auto& r : records) last = std::max(last, r.episode);
    const double left = 80;
    std::vector<Panel> panels{
        {left, 50, 640, 150, "Episode return", "#1f77b4", episode_mean(records, Field::ret, 0, last)},
        {left, 240, 640, 150, "Stress (sigma)", "#ff7f0e", episode_mean(records, Field::sigma, 0, last)},
        {left, 430, 640, 150, "Learning rate (alpha)", "#2ca02c", episode_mean(records, Field::alpha, 0, last)},
    };
    return write_panels(panels, 0, static_cast<double>(last), static_cast<double>(shift),
                        "Recovery after the regime change", path);
}

bool write_panic_signature(const std::vector<RunRecord>& records, std::size_t shift, const std::filesystem::path& path,
                           std::size_t before, std::size_t after) {
    const std::size_t lo = shift > before ? shift - before : 0;
    const std::size_t hi = shift + after;
    const auto sigma = episode_mean(records, Field::sigma, lo, hi);
    if (sigma.x.empty()) return false;
    std::vector<Panel> panels{
        {80, 50, 640, 150, "Stress (sigma)", "#ff7f0e", sigma},
        {80, 240, 640, 150, "Learning rate (alpha)", "#2ca02c", episode_mean(records, Field::alpha, lo, hi)},
    };
    return write_panels(panels, static_cast<double>(lo), static_cast<double>(hi), static_cast<double>(shift),
                        "Stress and plasticity around the shift", path);
}

std::vector<std::filesystem::path> write_heatmaps(const std::vector<std::pair<std::string, VisitCounts>>& arms,
                                                  int width, int height, const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    double peak = 0.0;
    for (const auto& [label, visits] : arms) {
        for (const auto& [cell, n] : visits) peak = std::max(peak, std::log1p(static_cast<double>(n)));
    }
    if (peak <= 0.0) return written;
    const double cell_px = 24;
    for (const auto& [label, visits] : arms) {
        const auto path = dir / ("heatmap_" + label + ".svg");
        std::ofstream svg(path);
        if (!svg) throw std::runtime_error("cannot open for writing: " + path.string());
        const double w = width * cell_px + 40;
        const double h = height * cell_px + 60;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << w / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">Visitation (log scale): "
            << label << "</text>\n";
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const auto it = visits.find(env::GridCell{x, y});
                const double v = it == visits.end() ? 0.0 : std::log1p(static_cast<double>(it->second));
                svg << "<rect x=\"" << 20 + x * cell_px << "\" y=\"" << 40 + y * cell_px << "\" width=\"" << cell_px
                    << "\" height=\"" << cell_px << "\" fill=\"" << heat_color(v / peak) << "\"/>\n";
            }
        }
        svg << "</svg>\n";
        written.push_back(path);
    }
    return written;
}

std::vector<std::string> emit_figures(const std::filesystem::path& dir, const ExperimentConfig& cfg) {
    std::vector<std::string> notices;
    const AgentArm arms[] = {AgentArm::ppo_baseline, AgentArm::eils_full, AgentArm::eils_ablated};

    for (const auto env_kind : {env::EnvKind::dynamic_cartpole, env::EnvKind::reversal}) {
        const std::size_t shift =
            env_kind == env::EnvKind::dynamic_cartpole ? cfg.cartpole.shift_episode : cfg.reversal.flip_episode;
        for (const auto arm : arms) {
            const auto file = dir / records_filename(env_kind, arm);
            const std::string stem = std::string(env::to_string(env_kind)) + "_" + std::string(to_string(arm));
            if (!std::filesystem::exists(file)) continue;
            const auto records = load_csv(file);
            const auto recovery = dir / ("recovery_" + stem + ".svg");
            const auto panic = dir / ("panic_" + stem + ".svg");
            notices.push_back(write_recovery_figure(records, shift, recovery) ? "wrote " + recovery.string()
                                                                              : "skipped " + recovery.string() + ": no records");
            notices.push_back(write_panic_signature(records, shift, panic) ? "wrote " + panic.string()
                                                                           : "skipped " + panic.string() + ": no episodes near the shift");
        }
    }

    std::vector<std::pair<std::string, VisitCounts>> maze_arms;
    for (const auto arm : arms) {
        const auto file = dir / visits_filename(env::EnvKind::sparse_maze, arm);
        if (std::filesystem::exists(file)) maze_arms.emplace_back(std::string(to_string(arm)), load_visits(file));
    }
    if (maze_arms.empty()) {
        notices.push_back("skipped maze heatmaps: no visit data");
    } else {
        const auto written = write_heatmaps(maze_arms, cfg.maze.width, cfg.maze.height, dir);
        if (written.empty()) notices.push_back("skipped maze heatmaps: visit tables are empty");
        for (const auto& p : written) notices.push_back("wrote " + p.string());
    }
    return notices;
}

}  // namespace eils::figures
