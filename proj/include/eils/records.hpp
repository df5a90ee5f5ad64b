#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "eils/envs.hpp"

namespace eils {

/// One row per (seed, episode). Internal-state and hyperparameter columns are
/// means over the episode's steps.
struct RunRecord {
    std::uint64_t seed = 0;
    std::size_t episode = 0;
    double episode_return = 0.0;
    std::size_t length = 0;
    double sigma = 0.0;
    double kappa = 0.0;
    double phi = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    double deficit = 0.0;
    double coverage = 0.0;  // percent of open cells, grid environments only
    int phase = 1;

    bool operator==(const RunRecord&) const = default;
};

inline constexpr const char* kCsvHeader =
    "seed,episode,return,length,sigma,kappa,phi,alpha,beta,epsilon,deficit,coverage,phase";

void write_csv(std::ostream& out, const std::vector<RunRecord>& records);
/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path);
[[nodiscard]] std::vector<RunRecord> read_csv(std::istream& in);
[[nodiscard]] std::vector<RunRecord> load_csv(const std::filesystem::path& path);

/// Per-cell visit counts, summed over seeds.
using VisitCounts = std::map<env::GridCell, std::uint64_t>;

void emit_visits(const VisitCounts& visits, const std::filesystem::path& path);
[[nodiscard]] VisitCounts load_visits(const std::filesystem::path& path);

/// Records of one seed, ordered by episode.
[[nodiscard]] std::vector<RunRecord> records_for_seed(const std::vector<RunRecord>& records, std::uint64_t seed);
[[nodiscard]] std::vector<std::uint64_t> seeds_in(const std::vector<RunRecord>& records);
[[nodiscard]] std::vector<double> returns_of(const std::vector<RunRecord>& records);

}  // namespace eils
