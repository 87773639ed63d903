#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "zeus/cache.hpp"
#include "zeus/providers.hpp"
#include "zeus/types.hpp"

namespace zeus {

struct PerturbationPlan {
    std::vector<std::string> trigger_phrases;
    int original_samples_per_trigger = 2;
    double high_temperature = 1.0;
    int rephrase_count = 1;
    int rephrased_samples_per_trigger = 1;
    double low_temperature = 0.0;
    std::string rephrase_instruction = "Rephrase the below passage";
    // Triggers paired with each rephrased text; all trigger_phrases when unset.
    std::optional<std::vector<std::string>> rephrase_triggers;

    const std::vector<std::string>& triggers_for_rephrased() const {
        return rephrase_triggers ? *rephrase_triggers : trigger_phrases;
    }

    // triggers * original_samples + rephrase_count * rephrase triggers * rephrased_samples
    std::size_t pool_size() const;

    // Throws ValidationError for negative counts, temperatures outside
    // [0, 2], no triggers, or an empty pool.
    void validate() const;

    // Stable digest of every field that affects the pool.
    std::string fingerprint() const;

    // Prompt variants in canonical order.
    std::vector<PromptVariant> variants() const;

    bool operator==(const PerturbationPlan&) const = default;
};

PerturbationPlan default_plan();

// "Q: {question}\nA: {trigger}", or "Q: {question}\nA:" when trigger is empty.
std::string sampling_prompt(const std::string& question_text, const std::string& trigger);

struct PoolContext {
    TextGenerator* generator = nullptr;
    TextGenerator* rephraser = nullptr;  // defaults to generator
    PoolStore* store = nullptr;          // optional persistence
    std::size_t max_concurrency = 0;     // 0 = generator's own limit
};

// One request of n = rephrase_count at temperature 0 with prompt
// "{instruction}\n{question}". Empty or unchanged rephrasings are kept and
// flagged.
std::vector<Rephrasing> rephrase_question(const Question& q, const PerturbationPlan& plan, TextGenerator& rephraser);

// Samples every slot of the plan, extracts and normalizes answers, and
// returns the records in canonical order. A stored pool under the same
// (model, question, plan) key is returned without provider calls.
// Throws PoolIncompleteError naming every slot that could not be filled.
AnswerPool collect_pool(const Question& q, const PerturbationPlan& plan, const TaskKind& kind, const PoolContext& ctx);

// collect_pool over several questions; output order matches input order.
std::vector<AnswerPool> collect_pools(const std::vector<Question>& questions, const PerturbationPlan& plan,
                                      const TaskKind& kind, const PoolContext& ctx);

}  // namespace zeus
