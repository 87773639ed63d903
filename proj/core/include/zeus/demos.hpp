#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "zeus/kmeans.hpp"
#include "zeus/providers.hpp"
#include "zeus/types.hpp"

namespace zeus {

inline constexpr std::string_view kStepByStep = "Let's think step by step.";

struct DemoFilters {
    bool enabled = true;
    std::size_t max_question_words = 60;
    std::size_t max_rationale_steps = 5;  // sentences
    bool require_parseable = true;

    bool operator==(const DemoFilters&) const = default;
};

struct DemonstrationSet {
    std::vector<Demonstration> demos;
    std::string strategy;
    std::string model_id;
    std::uint64_t seed = 0;
    int k = 0;
    std::string rendered_prefix;
    std::string answer_source = "rationale";  // or "gold", "modal", "mixed", "manual"
    std::vector<std::string> warnings;

    bool operator==(const DemonstrationSet&) const = default;
};

struct Rationale {
    std::string text;
    std::string raw_answer;
    std::string answer;  // normalized, may be kUnparseable
};

// Two-stage Zero-Shot-CoT at temperature 0:
//   stage 1  "Q: {q}\nA: Let's think step by step."                    -> rationale
//   stage 2  stage 1 + " " + rationale + "\n" + extraction_cue(kind)  -> answer
Rationale generate_rationale(const Question& q, const TaskKind& kind, TextGenerator& generator);

// "Q: {q}\nA: {rationale} The answer is {answer}.\n\n" per demo, or
// "Q: {q}\nA: The answer is {answer}.\n\n" for a demo without rationale.
std::string render_prefix(std::span<const Demonstration> demos);

// render_prefix(demos) + "Q: {test}\nA:"
std::string render_prompt(const DemonstrationSet& demos, const Question& test_q);

struct DemoBuildContext {
    Embedder* embedder = nullptr;
    TextGenerator* generator = nullptr;
    std::size_t max_concurrency = 0;  // 0 = generator's own limit
};

// Clusters the selected questions into k groups and turns the question
// nearest each centroid into a demonstration. A representative failing a
// filter is replaced by the next-nearest member; a cluster whose members
// all fail is dropped with a warning. Fewer than k selected questions yield
// one demo per question, also with a warning.
// Throws ValidationError("strategy selected no questions") for an empty
// selection.
DemonstrationSet build_demonstrations(std::span<const std::string> selected_ids, std::span<const Question> questions,
                                      const TaskKind& kind, int k, std::uint64_t seed, const DemoFilters& filters,
                                      const DemoBuildContext& ctx, const std::string& strategy);

// Auto-CoT: the same construction over every question, with no uncertainty
// filtering.
DemonstrationSet build_autocot_demonstrations(std::span<const Question> questions, const TaskKind& kind, int k,
                                              std::uint64_t seed, const DemoFilters& filters,
                                              const DemoBuildContext& ctx);

// demos_<S>.json: {strategy, k, seed, model_id, answer_source, warnings,
// demos: [{question, rationale, answer, source_question_id, source_cluster}],
// rendered_prefix}
std::string demos_to_json(const DemonstrationSet& set);
DemonstrationSet demos_from_json(const std::string& text);
void save_demos(const std::filesystem::path& path, const DemonstrationSet& set);
DemonstrationSet load_demos(const std::filesystem::path& path);

}  // namespace zeus
