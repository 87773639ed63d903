#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "zeus/providers.hpp"
#include "zeus/types.hpp"

namespace zeus {

struct AnswerWeight {
    std::string answer;
    double p = 0.0;

    bool operator==(const AnswerWeight&) const = default;
};

// One categorical answer distribution and the prompts it applies to.
// "*" (or an absent temperature) matches anything.
struct MockRule {
    std::string variant = "*";  // "original", "rephrased" or "*"
    std::string trigger = "*";
    std::optional<double> temperature;
    std::vector<AnswerWeight> answers;
    std::optional<std::string> rationale_template;

    bool operator==(const MockRule&) const = default;
};

struct MockQuestion {
    std::vector<MockRule> rules;
    std::vector<std::string> rephrasings;
    std::optional<std::string> rationale_template;

    // Demo-conditioned behaviour (see DemoConditioning).
    std::optional<std::string> correct_answer;
    std::vector<std::string> distractors;
    double difficulty = 0.5;
    double demo_quality = 0.5;

    bool operator==(const MockQuestion&) const = default;
};

// When enabled, a prompt whose few-shot prefix contains recognised scenario
// questions answers the target question from a synthetic distribution:
//   q  = mean demo_quality of the recognised demo questions
//   s  = sigmoid(sharpness * (q - difficulty))
//   p  = 1/(m+1) + (1 - 1/(m+1)) * s      (m = number of distractors)
// The correct answer has probability p, each distractor (1-p)/m. Greedy
// decoding (temperature 0) answers correctly iff q >= difficulty, and
// otherwise gives the first distractor.
struct DemoConditioning {
    bool enabled = false;
    double sharpness = 10.0;

    bool operator==(const DemoConditioning&) const = default;
};

struct MockScenario {
    std::uint64_t seed = 0;
    std::string model_id = "mock-llm";
    std::string rephrase_template = "Rephrased: {question}";
    std::string rationale_template = "Reasoning about the question step by step. The answer is {answer}.";
    std::vector<MockRule> default_rules;
    DemoConditioning conditioning;
    std::map<std::string, MockQuestion> questions;

    static MockScenario from_json(std::string_view text);
    static MockScenario load(const std::filesystem::path& path);
    std::string to_json() const;
    void save(const std::filesystem::path& path) const;

    // Distribution sums, non-negative weights, and that every referenced
    // question id exists in `dataset` (skipped when `dataset` is empty).
    void validate(std::span<const Question> dataset = {}) const;

    bool operator==(const MockScenario&) const = default;
};

// The documented sampling primitive: a uniform draw in [0,1) keyed by
// (scenario seed, question id, variant label, trigger, temperature bucket,
// context, sample index[, request seed]). Components are joined with the
// 0x1f byte; the uniform is unit_interval(splitmix64_mix(fnv1a64(material))).
double mock_uniform(std::uint64_t scenario_seed, std::string_view question_id, std::string_view variant_label,
                    std::string_view trigger, double temperature, std::string_view context, int sample_index,
                    std::optional<std::uint64_t> request_seed = std::nullopt);

// Inverse-CDF pick over `answers` in listed order.
std::size_t inverse_cdf(std::span<const AnswerWeight> answers, double u);

// Offline backend answering from a MockScenario. A pure function of
// (scenario, request); thread-safe.
class MockGenerator final : public TextGenerator {
public:
    MockGenerator(MockScenario scenario, std::span<const Question> dataset);

    std::vector<std::string> generate(const GenerationRequest& request) override;
    std::string model_id() const override { return scenario_.model_id; }
    std::size_t max_concurrency() const override { return 4; }

    std::size_t calls() const noexcept { return calls_.load(); }
    const MockScenario& scenario() const noexcept { return scenario_; }

    // Deterministic rephrasing the mock emits for (question, index).
    std::string rephrasing_for(const std::string& question_id, int index) const;

private:
    struct TextRef {
        std::string question_id;
        VariantKind kind;
        int rephrase_index;
    };

    std::string sample_answer(const TextRef& target, const std::string& trigger, double temperature,
                              const std::vector<std::string>& demo_ids, int sample_index,
                              std::optional<std::uint64_t> request_seed, std::string* rationale_template) const;

    MockScenario scenario_;
    std::unordered_map<std::string, TextRef> texts_;
    std::unordered_map<std::string, std::string> question_text_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace zeus
