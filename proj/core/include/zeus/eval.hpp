#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zeus/demos.hpp"
#include "zeus/providers.hpp"
#include "zeus/select.hpp"
#include "zeus/types.hpp"
#include "zeus/uncertainty.hpp"

namespace zeus {

enum class MethodKind { ZeroShot, FewShot, ZeroShotCoT, ManualCoT, AutoCoT, Zeus };

struct MethodSpec {
    MethodKind kind = MethodKind::ZeroShot;
    Strategy strategy = Strategy::All;  // ZEUS only

    bool needs_demos() const noexcept;
    // "ZeroShot", "FewShot", "ZeroShotCoT", "ManualCoT", "AutoCoT", "ZEUS(Hard)".
    std::string name() const;
    // Case-insensitive; dashes, spaces and underscores are ignored.
    static MethodSpec parse(std::string_view text);
    static std::vector<MethodSpec> parse_list(std::string_view comma_separated);

    bool operator==(const MethodSpec&) const = default;
};

struct EvalRecord {
    std::string question_id;
    int run = 0;
    std::string prediction;
    std::string gold;
    bool correct = false;

    bool operator==(const EvalRecord&) const = default;
};

struct EvalResult {
    std::string method;
    std::vector<double> run_accuracies;
    double mean_accuracy = 0.0;
    std::vector<EvalRecord> records;  // question-major, then run

    bool operator==(const EvalResult&) const = default;
};

struct InferenceOptions {
    int runs = 3;
    std::size_t max_concurrency = 0;  // 0 = generator's own limit
};

// Prompt for one test question under `method` (stage one for ZeroShotCoT).
std::string method_prompt(const MethodSpec& method, const DemonstrationSet* demos, const Question& q,
                          const TaskKind& kind);

// Answers every test question at temperature 0, `runs` times, and scores
// the predictions against gold. Demo-based methods need `demos`.
EvalResult run_inference(std::span<const Question> test_qs, const MethodSpec& method, const DemonstrationSet* demos,
                         const TaskKind& kind, TextGenerator& generator, const InferenceOptions& options = {});

struct StrategyScore {
    Strategy strategy = Strategy::All;
    double mean_entropy = 0.0;
    std::optional<double> accuracy;

    bool operator==(const StrategyScore&) const = default;
};

struct StrategyRanking {
    std::vector<StrategyScore> scores;  // strategy enum order
    Strategy chosen_lu = Strategy::All;
    std::optional<Strategy> chosen_ha;

    bool operator==(const StrategyRanking&) const = default;
};

// Sorts scores into strategy enum order and picks the lowest mean entropy (ties
// go to the earlier strategy). chosen_ha is set when every score has an
// accuracy.
StrategyRanking make_ranking(std::vector<StrategyScore> scores);

// Fills in accuracies by strategy and recomputes chosen_ha.
void attach_accuracies(StrategyRanking& ranking, std::span<const std::pair<Strategy, double>> accuracies);

// Mean Temp-Perb entropy over `unlabeled` with each strategy's prefix.
StrategyRanking rank_strategies(std::span<const Question> unlabeled,
                                std::span<const std::pair<Strategy, DemonstrationSet>> demo_sets,
                                const TempPerbConfig& config, const TaskKind& kind, TextGenerator& generator,
                                std::size_t max_concurrency = 0);

struct SensitivityPoint {
    std::string question_id;
    double confidence = 0.0;
    double correct = 0.0;  // 0 or 1

    bool operator==(const SensitivityPoint&) const = default;
};

struct SensitivityBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double accuracy = 0.0;

    bool operator==(const SensitivityBin&) const = default;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool degenerate = false;  // all x equal: slope 0, intercept mean y

    bool operator==(const LinearFit&) const = default;
};

struct SensitivityFit {
    std::vector<SensitivityPoint> points;
    LinearFit fit;
    std::vector<SensitivityBin> bins;  // non-empty bins only
    LinearFit binned_fit;

    bool operator==(const SensitivityFit&) const = default;
};

// Closed-form ordinary least squares of y on x.
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

// Modal answer vs gold for every estimate whose question carries a gold
// answer.
std::vector<SensitivityPoint> sensitivity_points(std::span<const UncertaintyEstimate> estimates,
                                                 std::span<const Question> questions, const TaskKind& kind);

// Per-point fit plus a fit over 10 equal-width confidence bins. Throws
// ValidationError for fewer than 2 points.
SensitivityFit sensitivity_fit(std::vector<SensitivityPoint> points, std::size_t bins = 10);

// Answer-only demonstrations from an Auto-CoT set: each answer comes from the
// source question's gold label, else the pool's modal answer, else the
// generated answer; answer_source records which were used.
DemonstrationSet make_fewshot_demos(const DemonstrationSet& autocot, std::span<const Question> questions,
                                    std::span<const UncertaintyEstimate> estimates);

}  // namespace zeus
