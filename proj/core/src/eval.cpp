#include "zeus/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/perturb.hpp"

namespace zeus {

bool MethodSpec::needs_demos() const noexcept {
    return kind != MethodKind::ZeroShot && kind != MethodKind::ZeroShotCoT;
}

std::string MethodSpec::name() const {
    switch (kind) {
        case MethodKind::ZeroShot: return "ZeroShot";
        case MethodKind::FewShot: return "FewShot";
        case MethodKind::ZeroShotCoT: return "ZeroShotCoT";
        case MethodKind::ManualCoT: return "ManualCoT";
        case MethodKind::AutoCoT: return "AutoCoT";
        case MethodKind::Zeus: return "ZEUS(" + strategy_name(strategy) + ")";
    }
    return "ZeroShot";
}

MethodSpec MethodSpec::parse(std::string_view text) {
    std::string key;
    for (char c : trim(text)) {
        if (c == ' ' || c == '_' || c == '-') continue;
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (key == "zeroshot") return {MethodKind::ZeroShot};
    if (key == "fewshot") return {MethodKind::FewShot};
    if (key == "zeroshotcot") return {MethodKind::ZeroShotCoT};
    if (key == "manualcot") return {MethodKind::ManualCoT};
    if (key == "autocot") return {MethodKind::AutoCoT};
    if (key.starts_with("zeus(") && key.ends_with(")")) {
        return {MethodKind::Zeus, parse_strategy(key.substr(5, key.size() - 6))};
    }
    throw ValidationError("unknown method '" + std::string(text) + "'");
}

std::vector<MethodSpec> MethodSpec::parse_list(std::string_view comma_separated) {
    std::vector<MethodSpec> out;
    std::size_t start = 0;
    while (start <= comma_separated.size()) {
        auto end = comma_separated.find(',', start);
        if (end == std::string_view::npos) end = comma_separated.size();
        const auto item = trim(comma_separated.substr(start, end - start));
        if (!item.empty()) out.push_back(parse(item));
        start = end + 1;
    }
    if (out.empty()) throw ValidationError("no methods given");
    return out;
}

std::string method_prompt(const MethodSpec& method, const DemonstrationSet* demos, const Question& q,
                          const TaskKind& kind) {
    switch (method.kind) {
        case MethodKind::ZeroShot: return sampling_prompt(q.text, answer_cue(kind));
        case MethodKind::ZeroShotCoT: return sampling_prompt(q.text, std::string(kStepByStep));
        default: break;
    }
    if (demos == nullptr) {
        throw ValidationError("method " + method.name() + " needs a demonstration set");
    }
    return render_prompt(*demos, q);
}

EvalResult run_inference(std::span<const Question> test_qs, const MethodSpec& method, const DemonstrationSet* demos,
                         const TaskKind& kind, TextGenerator& generator, const InferenceOptions& options) {
    if (options.runs < 1) throw ValidationError("runs must be at least 1");
    if (method.needs_demos() && demos == nullptr) {
        throw ValidationError(method.kind == MethodKind::ManualCoT
                                  ? "ManualCoT needs a manual demo file"
                                  : "method " + method.name() + " needs a demonstration set");
    }
    for (const auto& q : test_qs) {
        if (!q.gold_answer) throw ValidationError("test question '" + q.id + "' has no gold answer");
    }
    const auto runs = static_cast<std::size_t>(options.runs);
    std::vector<std::vector<EvalRecord>> per_question(test_qs.size());
    const std::size_t workers = options.max_concurrency != 0 ? options.max_concurrency : generator.max_concurrency();
    parallel_for(test_qs.size(), workers, [&](std::size_t i) {
        const Question& q = test_qs[i];
        GenerationRequest req;
        req.prompt = method_prompt(method, demos, q, kind);
        req.temperature = 0.0;
        req.n_samples = options.runs;
        const auto outputs = generator.generate(req);
        if (outputs.size() != runs) throw ProtocolError("backend returned the wrong number of completions");
        for (std::size_t r = 0; r < runs; ++r) {
            std::string answer_text = outputs[r];
            if (method.kind == MethodKind::ZeroShotCoT) {
                GenerationRequest second;
                second.prompt = req.prompt + " " + std::string(trim(outputs[r])) + "\n" + extraction_cue(kind);
                second.temperature = 0.0;
                second.n_samples = 1;
                answer_text = generator.generate(second).at(0);
            }
            const auto prediction = extract_answer(answer_text, kind, q.choices).normalized;
            per_question[i].push_back({q.id, static_cast<int>(r), prediction, *q.gold_answer,
                                       answers_equal(prediction, *q.gold_answer, kind)});
        }
    });

    EvalResult result;
    result.method = method.name();
    std::vector<double> correct(runs, 0.0);
    for (auto& records : per_question) {
        for (auto& rec : records) {
            if (rec.correct) correct[static_cast<std::size_t>(rec.run)] += 1.0;
            result.records.push_back(std::move(rec));
        }
    }
    const double n = static_cast<double>(test_qs.size());
    for (double c : correct) result.run_accuracies.push_back(n > 0 ? c / n : 0.0);
    double sum = 0.0;
    for (double a : result.run_accuracies) sum += a;
    result.mean_accuracy = sum / static_cast<double>(runs);
    return result;
}

StrategyRanking make_ranking(std::vector<StrategyScore> scores) {
    if (scores.empty()) throw ValidationError("no strategies to rank");
    std::stable_sort(scores.begin(), scores.end(),
                     [](const StrategyScore& a, const StrategyScore& b) { return a.strategy < b.strategy; });
    StrategyRanking r;
    r.scores = std::move(scores);
    const StrategyScore* best = &r.scores.front();
    for (const auto& s : r.scores) {
        if (s.mean_entropy < best->mean_entropy) best = &s;
    }
    r.chosen_lu = best->strategy;
    const bool all_acc = std::all_of(r.scores.begin(), r.scores.end(), [](const StrategyScore& s) { return s.accuracy; });
    if (all_acc) {
        const StrategyScore* top = &r.scores.front();
        for (const auto& s : r.scores) {
            if (*s.accuracy > *top->accuracy) top = &s;
        }
        r.chosen_ha = top->strategy;
    }
    return r;
}

void attach_accuracies(StrategyRanking& ranking, std::span<const std::pair<Strategy, double>> accuracies) {
    for (auto& s : ranking.scores) {
        for (const auto& [strategy, acc] : accuracies) {
            if (strategy == s.strategy) s.accuracy = acc;
        }
    }
    ranking = make_ranking(std::move(ranking.scores));
}

StrategyRanking rank_strategies(std::span<const Question> unlabeled,
                                std::span<const std::pair<Strategy, DemonstrationSet>> demo_sets,
                                const TempPerbConfig& config, const TaskKind& kind, TextGenerator& generator,
                                std::size_t max_concurrency) {
    if (unlabeled.empty()) throw ValidationError("strategy ranking needs unlabeled questions");
    std::vector<StrategyScore> scores;
    const std::size_t workers = max_concurrency != 0 ? max_concurrency : generator.max_concurrency();
    for (const auto& [strategy, demos] : demo_sets) {
        std::vector<double> entropies(unlabeled.size());
        try {
            parallel_for(unlabeled.size(), workers, [&](std::size_t i) {
                entropies[i] = temp_perb(unlabeled[i], demos.rendered_prefix, config, kind, generator).entropy;
            });
        } catch (const TransportError& e) {
            throw TransportError("strategy " + strategy_name(strategy) + ": " + e.what(), e.fingerprint());
        } catch (const ProtocolError& e) {
            throw ProtocolError("strategy " + strategy_name(strategy) + ": " + e.what());
        }
        double sum = 0.0;
        for (double u : entropies) sum += u;
        scores.push_back({strategy, sum / static_cast<double>(unlabeled.size()), std::nullopt});
    }
    return make_ranking(std::move(scores));
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ValidationError("x and y differ in length");
    if (xs.size() < 2) throw ValidationError("a linear fit needs at least 2 points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return {0.0, my, true};
    const double slope = sxy / sxx;
    return {slope, my - slope * mx, false};
}

std::vector<SensitivityPoint> sensitivity_points(std::span<const UncertaintyEstimate> estimates,
                                                 std::span<const Question> questions, const TaskKind& kind) {
    std::map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id.emplace(q.id, &q);
    std::vector<SensitivityPoint> out;
    for (const auto& e : estimates) {
        auto it = by_id.find(e.question_id);
        if (it == by_id.end() || !it->second->gold_answer) continue;
        const bool ok = answers_equal(e.modal_answer, *it->second->gold_answer, kind);
        out.push_back({e.question_id, e.modal_confidence, ok ? 1.0 : 0.0});
    }
    return out;
}

SensitivityFit sensitivity_fit(std::vector<SensitivityPoint> points, std::size_t bins) {
    if (points.size() < 2) throw ValidationError("sensitivity fit needs at least 2 points");
    if (bins == 0) throw ValidationError("sensitivity fit needs at least one bin");
    SensitivityFit out;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : points) {
        xs.push_back(p.confidence);
        ys.push_back(p.correct);
    }
    out.fit = least_squares(xs, ys);

    std::vector<SensitivityBin> all(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        all[b].lo = static_cast<double>(b) / static_cast<double>(bins);
        all[b].hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    }
    for (const auto& p : points) {
        auto b = static_cast<std::size_t>(std::clamp(p.confidence, 0.0, 1.0) * static_cast<double>(bins));
        b = std::min(b, bins - 1);
        ++all[b].count;
        all[b].mean_confidence += p.confidence;
        all[b].accuracy += p.correct;
    }
    std::vector<double> bx;
    std::vector<double> by;
    for (auto& b : all) {
        if (b.count == 0) continue;
        b.mean_confidence /= static_cast<double>(b.count);
        b.accuracy /= static_cast<double>(b.count);
        bx.push_back(b.mean_confidence);
        by.push_back(b.accuracy);
        out.bins.push_back(b);
    }
    if (bx.size() >= 2) {
        out.binned_fit = least_squares(bx, by);
    } else {
        out.binned_fit = {0.0, by.front(), true};
    }
    out.points = std::move(points);
    return out;
}

DemonstrationSet make_fewshot_demos(const DemonstrationSet& autocot, std::span<const Question> questions,
                                    std::span<const UncertaintyEstimate> estimates) {
    std::map<std::string, const Question*> by_id;
    for (const auto& q : questions) by_id.emplace(q.id, &q);
    std::map<std::string, const UncertaintyEstimate*> est;
    for (const auto& e : estimates) est.emplace(e.question_id, &e);

    DemonstrationSet out = autocot;
    out.strategy = "FewShot";
    out.warnings.clear();
    std::vector<std::string> sources;
    for (auto& d : out.demos) {
        d.rationale.clear();
        auto q = by_id.find(d.source_question_id);
        auto e = est.find(d.source_question_id);
        if (q != by_id.end() && q->second->gold_answer) {
            d.answer = *q->second->gold_answer;
            sources.emplace_back("gold");
        } else if (e != est.end() && e->second->modal_answer != kUnparseable) {
            d.answer = e->second->modal_answer;
            sources.emplace_back("modal");
        } else {
            sources.emplace_back("rationale");
        }
    }
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    out.answer_source = sources.size() == 1 ? sources.front() : sources.empty() ? "none" : "mixed";
    out.rendered_prefix = render_prefix(out.demos);
    return out;
}

}  // namespace zeus
