#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "zeus/eval.hpp"
#include "zeus/uncertainty.hpp"

namespace zeus {

struct Report {
    std::string model_id;
    std::string dataset;
    std::optional<DatasetStats> stats;
    std::vector<EvalResult> methods;
    std::vector<StrategyScore> strategies;
    std::optional<Strategy> chosen_lu;
    std::optional<Strategy> chosen_ha;
    std::optional<SensitivityFit> sensitivity;

    bool empty() const noexcept { return methods.empty() && strategies.empty() && !sensitivity; }

    // Replaces the result with the same method name, else appends.
    void upsert(EvalResult result);
    void set_ranking(const StrategyRanking& ranking);

    bool operator==(const Report&) const = default;
};

std::string report_to_json(const Report& report);
Report report_from_json(const std::string& text);

// Long-format table: section,name,metric,value
std::string report_to_csv(const Report& report);

// Writes <out_dir>/report.json and <out_dir>/report.csv. Throws
// ValidationError for a report without results and IoError when the
// directory cannot be written.
void emit_report(const Report& report, const std::filesystem::path& out_dir);
Report load_report(const std::filesystem::path& path);

}  // namespace zeus
