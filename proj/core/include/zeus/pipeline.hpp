#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zeus/cache.hpp"
#include "zeus/config.hpp"
#include "zeus/dataset.hpp"
#include "zeus/demos.hpp"
#include "zeus/eval.hpp"
#include "zeus/report.hpp"
#include "zeus/select.hpp"
#include "zeus/uncertainty.hpp"

namespace zeus {

// Runs the stages of a RunConfig against files in out_dir:
//   estimate         -> estimates.jsonl, stats.json
//   select S         -> selection_<S>.json
//   build_demos S    -> demos_<S>.json (S may also be AutoCoT or FewShot)
//   evaluate         -> report.json, report.csv
//   rank_strategies  -> report.json, report.csv
//   sensitivity      -> report.json, report.csv
// Provider traffic goes through the response cache in cache_dir.
class Pipeline {
public:
    explicit Pipeline(RunConfig config);
    ~Pipeline();

    EstimateBatch estimate();
    Selection select(Strategy strategy);
    DemonstrationSet build_demos(const std::string& strategy, std::optional<int> k = std::nullopt);
    std::vector<EvalResult> evaluate(const std::vector<MethodSpec>& methods);
    StrategyRanking rank_strategies();
    SensitivityFit sensitivity();

    // Requests that reached the backend (cache misses) since construction.
    std::size_t provider_calls() const;
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    const RunConfig& config() const noexcept { return config_; }
    const DatasetSplit& split() const noexcept { return split_; }
    TextGenerator& generator();

    std::filesystem::path estimates_path() const;
    std::filesystem::path stats_path() const;
    std::filesystem::path selection_path(Strategy s) const;
    std::filesystem::path demos_path(const std::string& name) const;
    std::filesystem::path report_path() const;

private:
    struct Providers;

    std::vector<UncertaintyEstimate> require_estimates() const;
    DemonstrationSet demos_for(const MethodSpec& method);
    Report current_report() const;

    RunConfig config_;
    DatasetSplit split_;
    std::unique_ptr<Providers> providers_;
    std::vector<std::string> warnings_;
};

}  // namespace zeus
