#include "zeus/perturb.hpp"

#include <algorithm>
#include <exception>
#include <optional>

#include "io_util.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"

namespace zeus {

std::size_t PerturbationPlan::pool_size() const {
    const auto t = trigger_phrases.size();
    const auto rt = triggers_for_rephrased().size();
    return t * static_cast<std::size_t>(std::max(0, original_samples_per_trigger)) +
           static_cast<std::size_t>(std::max(0, rephrase_count)) * rt *
               static_cast<std::size_t>(std::max(0, rephrased_samples_per_trigger));
}

void PerturbationPlan::validate() const {
    if (trigger_phrases.empty()) throw ValidationError("plan.trigger_phrases must not be empty");
    if (original_samples_per_trigger < 0) throw ValidationError("plan.original_samples_per_trigger must be >= 0");
    if (rephrase_count < 0) throw ValidationError("plan.rephrase_count must be >= 0");
    if (rephrase_count > 16) throw ValidationError("plan.rephrase_count must be <= 16");
    if (rephrased_samples_per_trigger < 0) throw ValidationError("plan.rephrased_samples_per_trigger must be >= 0");
    if (!(high_temperature >= 0.0 && high_temperature <= 2.0)) {
        throw ValidationError("plan.high_temperature must lie in [0, 2]");
    }
    if (!(low_temperature >= 0.0 && low_temperature <= 2.0)) {
        throw ValidationError("plan.low_temperature must lie in [0, 2]");
    }
    if (rephrase_count > 0 && rephrased_samples_per_trigger > 0 && triggers_for_rephrased().empty()) {
        throw ValidationError("plan.rephrase_triggers must not be empty when rephrased samples are requested");
    }
    if (pool_size() == 0) throw ValidationError("plan yields an empty pool");
}

std::string PerturbationPlan::fingerprint() const {
    std::string m;
    auto add = [&m](const std::string& s) {
        m += std::to_string(s.size());
        m += ':';
        m += s;
        m += '\x1f';
    };
    add("triggers");
    for (const auto& t : trigger_phrases) add(t);
    add(std::to_string(original_samples_per_trigger));
    add(detail::format_double(high_temperature));
    add(std::to_string(rephrase_count));
    add(std::to_string(rephrased_samples_per_trigger));
    add(detail::format_double(low_temperature));
    add(rephrase_instruction);
    add("rephrase_triggers");
    for (const auto& t : triggers_for_rephrased()) add(t);
    return sha256_hex(m).substr(0, 32);
}

std::vector<PromptVariant> PerturbationPlan::variants() const {
    std::vector<PromptVariant> out;
    if (original_samples_per_trigger > 0) {
        for (const auto& t : trigger_phrases) {
            out.push_back({VariantKind::original, 0, t, high_temperature, original_samples_per_trigger});
        }
    }
    if (rephrased_samples_per_trigger > 0) {
        for (int i = 0; i < rephrase_count; ++i) {
            for (const auto& t : triggers_for_rephrased()) {
                out.push_back({VariantKind::rephrased, i, t, low_temperature, rephrased_samples_per_trigger});
            }
        }
    }
    return out;
}

PerturbationPlan default_plan() {
    PerturbationPlan p;
    p.trigger_phrases = {
        "",
        "Let's think step by step.",
        "Let's think about this logically step by step.",
        "Before we dive into the answer,",
        "Before answering the question, let's understand the input.",
    };
    return p;
}

std::string sampling_prompt(const std::string& question_text, const std::string& trigger) {
    std::string p = "Q: " + question_text + "\nA:";
    if (!trigger.empty()) p += " " + trigger;
    return p;
}

std::vector<Rephrasing> rephrase_question(const Question& q, const PerturbationPlan& plan, TextGenerator& rephraser) {
    std::vector<Rephrasing> out;
    if (plan.rephrase_count <= 0) return out;
    GenerationRequest req;
    req.prompt = plan.rephrase_instruction + "\n" + q.text;
    req.temperature = 0.0;
    req.n_samples = plan.rephrase_count;
    const auto texts = rephraser.generate(req);
    if (texts.size() != static_cast<std::size_t>(plan.rephrase_count)) {
        throw ProtocolError("rephrase request for '" + q.id + "' returned " + std::to_string(texts.size()) +
                            " texts, expected " + std::to_string(plan.rephrase_count));
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const std::string text(trim(texts[i]));
        out.push_back({static_cast<int>(i), text, text.empty(), text == trim(q.text)});
    }
    return out;
}

namespace {

std::string slot_name(const PromptVariant& v, int sample) {
    return v.label() + " trigger=\"" + v.trigger + "\" T=" + detail::format_double(v.temperature) +
           " sample=" + std::to_string(sample);
}

}  // namespace

AnswerPool collect_pool(const Question& q, const PerturbationPlan& plan, const TaskKind& kind, const PoolContext& ctx) {
    if (ctx.generator == nullptr) throw ValidationError("collect_pool needs a generator");
    plan.validate();
    TextGenerator& gen = *ctx.generator;
    const std::string model = gen.model_id();
    const std::string plan_fp = plan.fingerprint() + "/" + kind.name();
    const std::string key = PoolStore::key_for(model, q.id, plan_fp);
    if (ctx.store != nullptr) {
        if (auto stored = ctx.store->load(key); stored && stored->pool_size() == plan.pool_size()) {
            return *stored;
        }
    }

    const auto variants = plan.variants();
    AnswerPool pool;
    pool.question_id = q.id;
    const bool needs_rephrasing = std::any_of(variants.begin(), variants.end(),
                                              [](const PromptVariant& v) { return v.kind == VariantKind::rephrased; });
    if (needs_rephrasing) {
        pool.rephrasings = rephrase_question(q, plan, ctx.rephraser != nullptr ? *ctx.rephraser : gen);
    }

    std::vector<std::vector<std::string>> results(variants.size());
    std::vector<std::string> failures(variants.size());
    const std::size_t workers = ctx.max_concurrency != 0 ? ctx.max_concurrency : gen.max_concurrency();
    parallel_for(variants.size(), workers, [&](std::size_t i) {
        const auto& v = variants[i];
        const std::string& text =
            v.kind == VariantKind::original ? q.text : pool.rephrasings[static_cast<std::size_t>(v.rephrase_index)].text;
        GenerationRequest req;
        req.prompt = sampling_prompt(text, v.trigger);
        req.temperature = v.temperature;
        req.n_samples = v.samples;
        try {
            auto texts = gen.generate(req);
            if (texts.size() != static_cast<std::size_t>(v.samples)) {
                failures[i] = "backend returned " + std::to_string(texts.size()) + " of " +
                              std::to_string(v.samples) + " completions";
                texts.clear();
            }
            results[i] = std::move(texts);
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    std::vector<std::string> missing;
    std::string first_cause;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        const auto& v = variants[i];
        if (!failures[i].empty()) {
            if (first_cause.empty()) first_cause = failures[i];
            for (int s = 0; s < v.samples; ++s) missing.push_back(slot_name(v, s));
            continue;
        }
        for (int s = 0; s < v.samples; ++s) {
            const std::string& completion = results[i][static_cast<std::size_t>(s)];
            auto extracted = extract_answer(completion, kind, q.choices);
            pool.records.push_back({q.id, v, s, completion, std::move(extracted.raw), std::move(extracted.normalized)});
        }
    }
    if (!missing.empty()) {
        throw PoolIncompleteError(q.id, std::move(missing), first_cause);
    }
    std::stable_sort(pool.records.begin(), pool.records.end(),
                     [](const GenerationRecord& a, const GenerationRecord& b) { return canonical_order(a, b) < 0; });
    if (ctx.store != nullptr) ctx.store->save(key, pool, model, plan_fp);
    return pool;
}

std::vector<AnswerPool> collect_pools(const std::vector<Question>& questions, const PerturbationPlan& plan,
                                      const TaskKind& kind, const PoolContext& ctx) {
    std::vector<AnswerPool> out;
    out.reserve(questions.size());
    for (const auto& q : questions) out.push_back(collect_pool(q, plan, kind, ctx));
    return out;
}

}  // namespace zeus
