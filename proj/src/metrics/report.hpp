#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dgp {

struct EvalRecord {
    std::string task;
    std::string method;
    std::uint64_t seed = 0;
    double rel_error = 0.0;
    double max_error = 0.0;
    double seconds_per_design = 0.0;
    // Additional task metrics (e.g. "epe_fraction"); summarized in the JSON only.
    std::map<std::string, double> extra;

    void validate() const;
};

double median(std::vector<double> v);

// Writes <stem>.csv (columns task, method, seed, rel_error, max_error,
// seconds_per_design) and <stem>.json with per-(task, method) medians.
void write_report(const std::vector<EvalRecord>& records, const std::filesystem::path& stem);

} // namespace dgp
