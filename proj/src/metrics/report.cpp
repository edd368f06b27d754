#include "metrics/report.hpp"

#include "core/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dgp {

void EvalRecord::validate() const
{
    for (double v : {rel_error, max_error, seconds_per_design})
        require(std::isfinite(v) && v >= 0.0, ErrorCode::NonFinite,
                "report: metrics of " + task + "/" + method + " must be finite and >= 0");
    for (const auto& [k, v] : extra)
        require(std::isfinite(v), ErrorCode::NonFinite, "report: metric " + k + " is not finite");
}

double median(std::vector<double> v)
{
    require(!v.empty(), "median of an empty list");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext)
{
    return std::filesystem::path(stem.string() + ext);
}

} // namespace

void write_report(const std::vector<EvalRecord>& records, const std::filesystem::path& stem)
{
    require(!records.empty(), "report: no records to write");
    for (const auto& r : records) r.validate();
    if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());

    const auto csv_path = with_suffix(stem, ".csv");
    std::ofstream csv(csv_path, std::ios::binary);
    require(static_cast<bool>(csv), ErrorCode::Io, "report: cannot write " + csv_path.string());
    csv << "task,method,seed,rel_error,max_error,seconds_per_design\n";
    for (const auto& r : records)
        csv << r.task << ',' << r.method << ',' << r.seed << ',' << fmt(r.rel_error) << ',' << fmt(r.max_error) << ','
            << fmt(r.seconds_per_design) << '\n';
    require(static_cast<bool>(csv), ErrorCode::Io, "report: write failed for " + csv_path.string());

    // Groups in first-appearance order.
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& r : records)
        if (std::find(keys.begin(), keys.end(), std::pair{r.task, r.method}) == keys.end())
            keys.emplace_back(r.task, r.method);

    nlohmann::ordered_json medians = nlohmann::ordered_json::array();
    for (const auto& [task, method] : keys) {
        std::vector<double> rel, mx, sec;
        std::map<std::string, std::vector<double>> extra;
        for (const auto& r : records) {
            if (r.task != task || r.method != method) continue;
            rel.push_back(r.rel_error);
            mx.push_back(r.max_error);
            sec.push_back(r.seconds_per_design);
            for (const auto& [k, v] : r.extra) extra[k].push_back(v);
        }
        nlohmann::ordered_json e = {{"task", task},
                                    {"method", method},
                                    {"count", rel.size()},
                                    {"rel_error", median(rel)},
                                    {"max_error", median(mx)},
                                    {"seconds_per_design", median(sec)}};
        for (const auto& [k, v] : extra) e[k] = median(v);
        medians.push_back(std::move(e));
    }
    const auto json_path = with_suffix(stem, ".json");
    std::ofstream js(json_path, std::ios::binary);
    require(static_cast<bool>(js), ErrorCode::Io, "report: cannot write " + json_path.string());
    js << nlohmann::ordered_json{{"records", records.size()}, {"medians", medians}}.dump(2) << '\n';
    require(static_cast<bool>(js), ErrorCode::Io, "report: write failed for " + json_path.string());
}

} // namespace dgp
