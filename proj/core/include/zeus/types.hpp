#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace zeus {

// Answer class for model output that yields no extractable answer. It is a
// regular answer value: it takes part in confidence scores and entropy.
inline constexpr std::string_view kUnparseable = "<unparseable>";

struct Question {
    std::string id;
    std::string text;
    std::optional<std::string> gold_answer;
    std::vector<std::string> choices;
    std::optional<std::string> stratum;
};

enum class AnswerKind { numeric, yes_no, multiple_choice, label_set };

// Which candidate wins when a text contains several extractable answers.
enum class MatchPolicy { last, first };

// Determines how raw model output is turned into a canonical answer.
class TaskKind {
public:
    static TaskKind numeric();
    static TaskKind yes_no();
    static TaskKind multiple_choice();
    // Labels are trimmed and lowercased; they must be non-empty and unique.
    static TaskKind label_set(std::vector<std::string> labels);

    // Accepts "numeric", "yes_no", "multiple_choice" or "label_set:a|b|c".
    static TaskKind parse(std::string_view spec);

    AnswerKind kind() const noexcept { return kind_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    MatchPolicy policy() const noexcept { return policy_; }
    TaskKind with_policy(MatchPolicy p) const;

    // Inverse of parse().
    std::string name() const;

    bool operator==(const TaskKind&) const = default;

private:
    TaskKind(AnswerKind k, std::vector<std::string> labels) : kind_(k), labels_(std::move(labels)) {}

    AnswerKind kind_ = AnswerKind::numeric;
    std::vector<std::string> labels_;
    MatchPolicy policy_ = MatchPolicy::last;
};

enum class VariantKind { original, rephrased };

struct PromptVariant {
    VariantKind kind = VariantKind::original;
    int rephrase_index = 0;  // meaningful for rephrased only
    std::string trigger;
    double temperature = 0.0;
    int samples = 1;

    // "original" or "rephrased[i]".
    std::string label() const;

    bool operator==(const PromptVariant&) const = default;
};

struct GenerationRecord {
    std::string question_id;
    PromptVariant variant;
    int sample_index = 0;
    std::string rationale;
    std::string raw_answer;
    std::string normalized_answer;

    bool operator==(const GenerationRecord&) const = default;
};

// Canonical record order: variant kind, rephrase index, trigger, temperature,
// sample index.
std::weak_ordering canonical_order(const GenerationRecord& a, const GenerationRecord& b);

struct Rephrasing {
    int index = 0;
    std::string text;
    bool empty = false;
    bool identical_to_original = false;

    bool operator==(const Rephrasing&) const = default;
};

struct AnswerPool {
    std::string question_id;
    std::vector<GenerationRecord> records;
    std::vector<Rephrasing> rephrasings;

    std::size_t pool_size() const noexcept { return records.size(); }

    bool operator==(const AnswerPool&) const = default;
};

struct Demonstration {
    std::string question_text;
    std::string rationale;  // empty for answer-only (few-shot) demos
    std::string answer;
    std::string source_question_id;
    int source_cluster = 0;

    bool operator==(const Demonstration&) const = default;
};

}  // namespace zeus
