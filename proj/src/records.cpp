#include "eils/records.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eils {

namespace {

void put_double(std::ostream& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
}

template <typename T>
T parse_field(const std::string& text, std::size_t line) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("csv line " + std::to_string(line) + ": bad field '" + text + "'");
    }
    return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.seed << ',' << r.episode << ',';
        put_double(out, r.episode_return);
        out << ',' << r.length;
        for (double v : {r.sigma, r.kappa, r.phi, r.alpha, r.beta, r.epsilon, r.deficit, r.coverage}) {
            out << ',';
            put_double(out, v);
        }
        out << ',' << r.phase << '\n';
    }
}

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_csv(out, records);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<RunRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("csv: unexpected header");
    std::vector<RunRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 13) throw std::runtime_error("csv line " + std::to_string(line_no) + ": expected 13 fields");
        RunRecord r;
        r.seed = parse_field<std::uint64_t>(cells[0], line_no);
        r.episode = parse_field<std::size_t>(cells[1], line_no);
        r.episode_return = parse_field<double>(cells[2], line_no);
        r.length = parse_field<std::size_t>(cells[3], line_no);
        r.sigma = parse_field<double>(cells[4], line_no);
        r.kappa = parse_field<double>(cells[5], line_no);
        r.phi = parse_field<double>(cells[6], line_no);
        r.alpha = parse_field<double>(cells[7], line_no);
        r.beta = parse_field<double>(cells[8], line_no);
        r.epsilon = parse_field<double>(cells[9], line_no);
        r.deficit = parse_field<double>(cells[10], line_no);
        r.coverage = parse_field<double>(cells[11], line_no);
        r.phase = parse_field<int>(cells[12], line_no);
        records.push_back(r);
    }
    return records;
}

std::vector<RunRecord> load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    try {
        return read_csv(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void emit_visits(const VisitCounts& visits, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "x,y,count\n";
    for (const auto& [cell, n] : visits) out << cell.x << ',' << cell.y << ',' << n << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

VisitCounts load_visits(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::getline(in, line);
    VisitCounts visits;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        env::GridCell c;
        std::uint64_t n = 0;
        char comma1 = 0;
        char comma2 = 0;
        std::istringstream ss(line);
        if (!(ss >> c.x >> comma1 >> c.y >> comma2 >> n)) throw std::runtime_error(path.string() + ": bad visit row");
        visits[c] += n;
    }
    return visits;
}

std::vector<RunRecord> records_for_seed(const std::vector<RunRecord>& records, std::uint64_t seed) {
    std::vector<RunRecord> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [seed](const RunRecord& r) { return r.seed == seed; });
    std::stable_sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) { return a.episode < b.episode; });
    return out;
}

std::vector<std::uint64_t> seeds_in(const std::vector<RunRecord>& records) {
    std::vector<std::uint64_t> seeds;
    for (const auto& r : records) {
        if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
    }
    return seeds;
}

std::vector<double> returns_of(const std::vector<RunRecord>& records) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.episode_return);
    return out;
}

}  // namespace eils
