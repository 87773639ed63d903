#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "zeus/providers.hpp"
#include "zeus/types.hpp"

namespace zeus {

struct AnswerScore {
    std::string answer;
    std::size_t count = 0;
    double confidence = 0.0;

    bool operator==(const AnswerScore&) const = default;
};

struct UncertaintyEstimate {
    std::string question_id;
    std::vector<AnswerScore> unique_answers;
    double entropy = 0.0;  // nats
    std::string modal_answer;
    double modal_confidence = 0.0;
    std::size_t pool_size = 0;

    std::size_t n_unique() const noexcept { return unique_answers.size(); }
    bool operator==(const UncertaintyEstimate&) const = default;
};

struct Histogram {
    std::vector<double> bin_edges;  // bins + 1 edges
    std::vector<std::size_t> counts;

    bool operator==(const Histogram&) const = default;
};

struct DatasetStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
    std::size_t count = 0;
    Histogram histogram;

    bool operator==(const DatasetStats&) const = default;
};

// Groups answers into answers_equal classes. Each class is represented by
// its first occurrence and ordered by descending count, then first
// appearance. Throws ValidationError for an empty input.
std::vector<AnswerScore> confidence_scores(std::span<const std::string> answers, const TaskKind& kind);
std::vector<AnswerScore> confidence_scores(const AnswerPool& pool, const TaskKind& kind);

// -sum p ln p with 0 ln 0 = 0, clamped to >= 0. Throws ValidationError for a
// negative confidence or when the confidences do not sum to 1 within 1e-9.
double predictive_entropy(std::span<const AnswerScore> scores);

UncertaintyEstimate estimate(const AnswerPool& pool, const TaskKind& kind);

// Equal-width histogram of `values` over [0, upper]; values at or above
// `upper` land in the last bin.
Histogram make_histogram(std::span<const double> values, double upper, std::size_t bins = 30);

// Mean, population standard deviation and a 30-bin histogram over
// [0, ln max_pool_size] (upper edge 1 when that is 0).
DatasetStats dataset_stats(std::span<const UncertaintyEstimate> estimates);

struct EstimateBatch {
    std::vector<UncertaintyEstimate> estimates;
    DatasetStats stats;
};

// Per-pool errors are rethrown with the question id attached.
EstimateBatch estimate_all(std::span<const AnswerPool> pools, const TaskKind& kind);

struct TempPerbConfig {
    std::vector<double> temperatures{1.0};
    int samples_per_temperature = 15;
    std::string trigger = "Let's think step by step.";

    bool operator==(const TempPerbConfig&) const = default;
};

struct TempPerbResult {
    std::vector<AnswerScore> scores;
    double entropy = 0.0;
    std::size_t samples = 0;
};

// Samples demo_prefix + "Q: {q}\nA: {trigger}" at each configured
// temperature and returns the entropy of the pooled answers.
TempPerbResult temp_perb(const Question& q, const std::string& demo_prefix, const TempPerbConfig& config,
                         const TaskKind& kind, TextGenerator& generator);

double temp_perb_entropy(const Question& q, const std::string& demo_prefix, int samples, double temperature,
                         const TaskKind& kind, TextGenerator& generator);

// estimates.jsonl: {question_id, entropy, modal_answer, modal_confidence, n_unique, pool_size}
std::string estimates_to_jsonl(std::span<const UncertaintyEstimate> estimates);
void save_estimates(const std::filesystem::path& path, std::span<const UncertaintyEstimate> estimates);
// Loaded estimates carry no per-class scores.
std::vector<UncertaintyEstimate> load_estimates(const std::filesystem::path& path);

// stats.json: {mean, stddev, count, histogram: {bin_edges, counts}}
std::string stats_to_json(const DatasetStats& stats);
DatasetStats stats_from_json(const std::string& text);
void save_stats(const std::filesystem::path& path, const DatasetStats& stats);
DatasetStats load_stats(const std::filesystem::path& path);

}  // namespace zeus
