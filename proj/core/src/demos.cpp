#include "zeus/demos.hpp"

#include <map>
#include <optional>

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/perturb.hpp"

namespace zeus {

using nlohmann::ordered_json;

Rationale generate_rationale(const Question& q, const TaskKind& kind, TextGenerator& generator) {
    GenerationRequest first;
    first.prompt = sampling_prompt(q.text, std::string(kStepByStep));
    first.temperature = 0.0;
    first.n_samples = 1;
    const auto stage1 = generator.generate(first);
    if (stage1.size() != 1) throw ProtocolError("rationale request for '" + q.id + "' returned no completion");

    Rationale r;
    r.text = std::string(trim(stage1.front()));

    GenerationRequest second;
    second.prompt = first.prompt + " " + r.text + "\n" + extraction_cue(kind);
    second.temperature = 0.0;
    second.n_samples = 1;
    const auto stage2 = generator.generate(second);
    if (stage2.size() != 1) throw ProtocolError("answer request for '" + q.id + "' returned no completion");
    auto extracted = extract_answer(stage2.front(), kind, q.choices);
    r.raw_answer = std::move(extracted.raw);
    r.answer = std::move(extracted.normalized);
    return r;
}

std::string render_prefix(std::span<const Demonstration> demos) {
    std::string out;
    for (const auto& d : demos) {
        out += "Q: " + d.question_text + "\nA: ";
        if (!d.rationale.empty()) out += d.rationale + " ";
        out += "The answer is " + d.answer + ".\n\n";
    }
    return out;
}

std::string render_prompt(const DemonstrationSet& demos, const Question& test_q) {
    return render_prefix(demos.demos) + "Q: " + test_q.text + "\nA:";
}

namespace {

struct Candidate {
    std::optional<Demonstration> demo;
    std::vector<std::string> notes;
};

DemonstrationSet build_from(std::vector<const Question*> selected, const TaskKind& kind, int k, std::uint64_t seed,
                            const DemoFilters& filters, const DemoBuildContext& ctx, const std::string& strategy) {
    if (selected.empty()) throw ValidationError("strategy selected no questions");
    if (k < 1) throw ValidationError("k must be at least 1");
    if (ctx.embedder == nullptr || ctx.generator == nullptr) {
        throw ValidationError("demonstration building needs an embedder and a generator");
    }

    DemonstrationSet set;
    set.strategy = strategy;
    set.model_id = ctx.generator->model_id();
    set.seed = seed;
    set.k = k;
    if (selected.size() < static_cast<std::size_t>(k)) {
        set.warnings.push_back("only " + std::to_string(selected.size()) + " question(s) selected for k=" +
                               std::to_string(k) + "; using one demonstration per question");
    }

    std::vector<std::string> texts;
    std::vector<std::string> ids;
    for (const auto* q : selected) {
        texts.push_back(q->text);
        ids.push_back(q->id);
    }
    const auto vectors = ctx.embedder->embed(texts);
    if (vectors.size() != texts.size()) throw ProtocolError("embedder returned the wrong number of vectors");
    const auto clustering = kmeans_pp(vectors, k, seed);

    std::vector<Candidate> picks(static_cast<std::size_t>(clustering.k()));
    const std::size_t workers = ctx.max_concurrency != 0 ? ctx.max_concurrency : ctx.generator->max_concurrency();
    parallel_for(picks.size(), workers, [&](std::size_t c) {
        for (std::size_t idx : rank_cluster_members(clustering, vectors, ids, static_cast<int>(c))) {
            const Question& q = *selected[idx];
            if (filters.enabled && word_count(q.text) > filters.max_question_words) {
                picks[c].notes.push_back(q.id + ": question longer than " +
                                         std::to_string(filters.max_question_words) + " words");
                continue;
            }
            auto r = generate_rationale(q, kind, *ctx.generator);
            const bool unparseable = r.answer == kUnparseable;
            if (filters.enabled && sentence_count(r.text) > filters.max_rationale_steps) {
                picks[c].notes.push_back(q.id + ": rationale longer than " +
                                         std::to_string(filters.max_rationale_steps) + " steps");
                continue;
            }
            if (unparseable && filters.enabled && filters.require_parseable) {
                picks[c].notes.push_back(q.id + ": answer not parseable");
                continue;
            }
            if (r.text.empty()) {
                picks[c].notes.push_back(q.id + ": empty rationale");
                continue;
            }
            if (unparseable) picks[c].notes.push_back(q.id + ": kept with unparseable answer");
            picks[c].demo = Demonstration{q.text, r.text, r.answer, q.id, static_cast<int>(c)};
            return;
        }
    });

    for (std::size_t c = 0; c < picks.size(); ++c) {
        if (picks[c].demo) {
            set.demos.push_back(*picks[c].demo);
        } else {
            set.warnings.push_back("cluster " + std::to_string(c) + " dropped: no member passed the filters");
        }
        for (const auto& note : picks[c].notes) set.warnings.push_back("cluster " + std::to_string(c) + ": " + note);
    }
    if (set.demos.empty()) throw ValidationError("no demonstration passed the filters");
    set.rendered_prefix = render_prefix(set.demos);
    return set;
}

}  // namespace

DemonstrationSet build_demonstrations(std::span<const std::string> selected_ids, std::span<const Question> questions,
                                      const TaskKind& kind, int k, std::uint64_t seed, const DemoFilters& filters,
                                      const DemoBuildContext& ctx, const std::string& strategy) {
    if (selected_ids.empty()) throw ValidationError("strategy selected no questions");
    std::map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id.emplace(q.id, &q);
    std::vector<const Question*> selected;
    for (const auto& id : selected_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ValidationError("selected question '" + id + "' is not in the dataset");
        selected.push_back(it->second);
    }
    return build_from(std::move(selected), kind, k, seed, filters, ctx, strategy);
}

DemonstrationSet build_autocot_demonstrations(std::span<const Question> questions, const TaskKind& kind, int k,
                                              std::uint64_t seed, const DemoFilters& filters,
                                              const DemoBuildContext& ctx) {
    std::vector<const Question*> all;
    for (const auto& q : questions) all.push_back(&q);
    if (all.empty()) throw ValidationError("Auto-CoT needs at least one question");
    return build_from(std::move(all), kind, k, seed, filters, ctx, "AutoCoT");
}

std::string demos_to_json(const DemonstrationSet& set) {
    ordered_json demos = ordered_json::array();
    for (const auto& d : set.demos) {
        demos.push_back({{"question", d.question_text},
                         {"rationale", d.rationale},
                         {"answer", d.answer},
                         {"source_question_id", d.source_question_id},
                         {"source_cluster", d.source_cluster}});
    }
    ordered_json j{{"strategy", set.strategy},
                   {"k", set.k},
                   {"seed", set.seed},
                   {"model_id", set.model_id},
                   {"answer_source", set.answer_source},
                   {"warnings", set.warnings},
                   {"demos", demos},
                   {"rendered_prefix", set.rendered_prefix}};
    return j.dump(2) + "\n";
}

DemonstrationSet demos_from_json(const std::string& text) {
    DemonstrationSet set;
    try {
        const auto j = ordered_json::parse(text);
        set.strategy = j.value("strategy", std::string("Manual"));
        set.seed = j.value("seed", std::uint64_t{0});
        set.model_id = j.value("model_id", std::string());
        set.answer_source = j.value("answer_source", std::string("manual"));
        set.warnings = j.value("warnings", std::vector<std::string>{});
        int index = 0;
        for (const auto& d : j.at("demos")) {
            Demonstration demo;
            demo.question_text = d.at("question").get<std::string>();
            demo.rationale = d.value("rationale", std::string());
            demo.answer = d.at("answer").get<std::string>();
            demo.source_question_id = d.value("source_question_id", "demo-" + std::to_string(index));
            demo.source_cluster = d.value("source_cluster", index);
            if (trim(demo.question_text).empty() || trim(demo.answer).empty()) {
                throw ValidationError("demo " + std::to_string(index) + " needs a question and an answer");
            }
            set.demos.push_back(std::move(demo));
            ++index;
        }
        set.k = j.value("k", static_cast<int>(set.demos.size()));
        set.rendered_prefix = render_prefix(set.demos);
        if (j.contains("rendered_prefix") && j["rendered_prefix"].get<std::string>() != set.rendered_prefix) {
            throw ValidationError("rendered_prefix does not match the listed demos");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed demos document: ") + e.what());
    }
    return set;
}

void save_demos(const std::filesystem::path& path, const DemonstrationSet& set) {
    detail::write_file_atomic(path, demos_to_json(set));
}

DemonstrationSet load_demos(const std::filesystem::path& path) {
    try {
        return demos_from_json(detail::read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace zeus
