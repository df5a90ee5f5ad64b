#include "eils/compare.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eils/harness.hpp"

namespace eils {

namespace {

std::string fmt(const char* pattern, double a, double b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

std::string time_cell(const ComparisonRow& row) {
    if (row.env == env::EnvKind::sparse_maze) return "";
    return row.summary.median_recovery ? fmt("%.1f", *row.summary.median_recovery, 0) : "not-recovered";
}

}  // namespace

std::vector<ComparisonRow> compare_arms(const std::vector<std::pair<ExperimentConfig, std::vector<RunRecord>>>& runs) {
    std::vector<ComparisonRow> rows;
    for (const auto& [cfg, records] : runs) {
        ComparisonRow row;
        row.env = cfg.env;
        row.agent = cfg.agent;
        row.summary = metrics::summarize(records, cfg);
        row.complete = row.summary.complete;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ComparisonRow> compare_directory(const std::filesystem::path& dir, const ExperimentConfig& base) {
    std::vector<std::pair<ExperimentConfig, std::vector<RunRecord>>> runs;
    for (const auto env_kind : {env::EnvKind::sparse_maze, env::EnvKind::dynamic_cartpole, env::EnvKind::reversal}) {
        for (const auto arm : {AgentArm::ppo_baseline, AgentArm::eils_full, AgentArm::eils_ablated}) {
            const auto file = dir / records_filename(env_kind, arm);
            if (!std::filesystem::exists(file)) continue;
            ExperimentConfig cfg = base;
            cfg.env = env_kind;
            cfg.agent = arm;
            runs.emplace_back(cfg, load_csv(file));
        }
    }
    return compare_arms(runs);
}

void write_summary_csv(const std::vector<ComparisonRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "env,agent,seeds,success_mean,success_std,coverage_mean,coverage_std,recovered,median_recovery,complete\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        out << env::to_string(r.env) << ',' << to_string(r.agent) << ',' << s.per_seed.size() << ','
            << fmt("%.6g,%.6g", s.success.mean, s.success.std) << ',' << fmt("%.6g,%.6g", s.coverage.mean, s.coverage.std)
            << ',' << s.recovered << ',' << time_cell(r) << ',' << (r.complete ? "true" : "false") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string format_table(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %-14s %-18s %-16s %-18s\n", "env", "agent", "success %", "coverage %",
                  "recovery (eps)");
    out << line;
    for (const auto& r : rows) {
        const auto& s = r.summary;
        const std::string success = fmt("%.1f +/- %.1f", s.success.mean, s.success.std);
        const std::string coverage =
            r.env == env::EnvKind::dynamic_cartpole ? "-" : fmt("%.1f +/- %.1f", s.coverage.mean, s.coverage.std);
        std::string recovery = metrics::format_recovery(s);
        if (!r.complete) recovery += " [incomplete]";
        std::snprintf(line, sizeof line, "%-18s %-14s %-18s %-16s %-18s\n", std::string(env::to_string(r.env)).c_str(),
                      std::string(to_string(r.agent)).c_str(), success.c_str(), coverage.c_str(), recovery.c_str());
        out << line;
    }
    return out.str();
}

}  // namespace eils
