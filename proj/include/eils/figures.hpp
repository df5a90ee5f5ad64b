#pragma once

// Standalone SVG diagnostics: recovery panels, the zoomed stress/plasticity
// view around a regime change, and maze visitation heatmaps.

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "eils/config.hpp"
#include "eils/records.hpp"

namespace eils::figures {

/// Return, stress and learning-rate panels (seed means per episode) with a
/// dashed marker at `shift`. Returns false and writes nothing for empty input.
bool write_recovery_figure(const std::vector<RunRecord>& records, std::size_t shift, const std::filesystem::path& path);

/// Stress over learning rate, restricted to [shift - before, shift + after].
bool write_panic_signature(const std::vector<RunRecord>& records, std::size_t shift, const std::filesystem::path& path,
                           std::size_t before = 20, std::size_t after = 60);

/// One heatmap per labelled visit table, all on a shared color scale. Writes
/// heatmap_{label}.svg files into `dir`; returns the paths written.
std::vector<std::filesystem::path> write_heatmaps(const std::vector<std::pair<std::string, VisitCounts>>& arms,
                                                  int width, int height, const std::filesystem::path& dir);

/// Scans `dir` for records/visits files and writes every figure it has data
/// for. Returns one notice per figure written or skipped.
std::vector<std::string> emit_figures(const std::filesystem::path& dir, const ExperimentConfig& cfg);

}  // namespace eils::figures
