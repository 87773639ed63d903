#include "zeus/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"
#include "io_util.hpp"

namespace zeus {

using ojson = nlohmann::ordered_json;

namespace {

constexpr char kSep = '\x1f';

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    std::size_t at = 0;
    while ((at = s.find(from, at)) != std::string::npos) {
        s.replace(at, from.size(), to);
        at += to.size();
    }
    return s;
}

std::string temperature_bucket(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", t);
    return buf;
}

std::vector<AnswerWeight> parse_answers(const ojson& j, const std::string& where) {
    std::vector<AnswerWeight> out;
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            out.push_back({it.key(), it.value().get<double>()});
        }
    } else if (j.is_array()) {
        for (const auto& e : j) {
            if (e.is_array() && e.size() == 2) {
                out.push_back({e[0].get<std::string>(), e[1].get<double>()});
            } else if (e.is_object()) {
                out.push_back({e.at("answer").get<std::string>(), e.at("p").get<double>()});
            } else {
                throw ValidationError(where + ": answer entries must be [answer, p] or {answer, p}");
            }
        }
    } else {
        throw ValidationError(where + ": 'answers' must be an object or array");
    }
    return out;
}

MockRule parse_rule(const ojson& j, const std::string& where) {
    MockRule r;
    r.variant = j.value("variant", std::string("*"));
    r.trigger = j.value("trigger", std::string("*"));
    if (j.contains("temperature") && j["temperature"].is_number()) {
        r.temperature = j["temperature"].get<double>();
    }
    if (!j.contains("answers")) {
        throw ValidationError(where + ": rule without 'answers'");
    }
    r.answers = parse_answers(j["answers"], where);
    if (j.contains("rationale_template")) {
        r.rationale_template = j["rationale_template"].get<std::string>();
    }
    if (r.variant != "*" && r.variant != "original" && r.variant != "rephrased") {
        throw ValidationError(where + ": variant must be original, rephrased or *");
    }
    return r;
}

ojson rule_to_json(const MockRule& r) {
    ojson j;
    j["variant"] = r.variant;
    j["trigger"] = r.trigger;
    if (r.temperature) {
        j["temperature"] = *r.temperature;
    } else {
        j["temperature"] = "*";
    }
    ojson answers = ojson::object();
    for (const auto& a : r.answers) answers[a.answer] = a.p;
    j["answers"] = answers;
    if (r.rationale_template) j["rationale_template"] = *r.rationale_template;
    return j;
}

bool rule_matches(const MockRule& r, VariantKind kind, const std::string& trigger, double temperature) {
    const bool variant_ok = r.variant == "*" || (r.variant == "original" && kind == VariantKind::original) ||
                            (r.variant == "rephrased" && kind == VariantKind::rephrased);
    const bool trigger_ok = r.trigger == "*" || r.trigger == trigger;
    const bool temp_ok = !r.temperature || std::abs(*r.temperature - temperature) < 1e-9;
    return variant_ok && trigger_ok && temp_ok;
}

void check_distribution(const std::vector<AnswerWeight>& answers, const std::string& where) {
    if (answers.empty()) {
        throw ValidationError(where + ": empty answer distribution");
    }
    double total = 0.0;
    for (const auto& a : answers) {
        if (!(a.p >= 0.0) || !std::isfinite(a.p)) {
            throw ValidationError(where + ": probability for '" + a.answer + "' must be finite and >= 0");
        }
        total += a.p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError(where + ": probabilities sum to " + detail::format_double(total) + ", expected 1");
    }
}

std::string variant_label(VariantKind kind, int index) {
    return kind == VariantKind::original ? "original" : "rephrased[" + std::to_string(index) + "]";
}

std::string strip_answer_span(std::string_view body) {
    const std::string lowered = to_lower(body);
    const auto at = lowered.rfind("answer is");
    if (at == std::string::npos) return {};
    std::string_view span = body.substr(at + 9);
    span = span.substr(0, span.find('\n'));
    span = trim(span);
    while (!span.empty() && span.back() == '.') span.remove_suffix(1);
    return std::string(trim(span));
}

}  // namespace

MockScenario MockScenario::from_json(std::string_view text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ValidationError(std::string("mock scenario: invalid JSON: ") + e.what());
    }
    MockScenario s;
    try {
        s.seed = j.value("seed", std::uint64_t{0});
        s.model_id = j.value("model_id", s.model_id);
        s.rephrase_template = j.value("rephrase_template", s.rephrase_template);
        s.rationale_template = j.value("rationale_template", s.rationale_template);
        if (j.contains("default_rules")) {
            for (const auto& r : j["default_rules"]) s.default_rules.push_back(parse_rule(r, "default_rules"));
        }
        if (j.contains("demo_conditioning")) {
            const auto& c = j["demo_conditioning"];
            s.conditioning.enabled = c.value("enabled", false);
            s.conditioning.sharpness = c.value("sharpness", s.conditioning.sharpness);
        }
        if (j.contains("questions")) {
            for (auto it = j["questions"].begin(); it != j["questions"].end(); ++it) {
                const std::string where = "questions." + it.key();
                const auto& qj = it.value();
                MockQuestion q;
                if (qj.contains("rules")) {
                    for (const auto& r : qj["rules"]) q.rules.push_back(parse_rule(r, where));
                }
                if (qj.contains("rephrasings")) q.rephrasings = qj["rephrasings"].get<std::vector<std::string>>();
                if (qj.contains("rationale_template")) q.rationale_template = qj["rationale_template"].get<std::string>();
                if (qj.contains("correct_answer")) q.correct_answer = qj["correct_answer"].get<std::string>();
                if (qj.contains("distractors")) q.distractors = qj["distractors"].get<std::vector<std::string>>();
                q.difficulty = qj.value("difficulty", q.difficulty);
                q.demo_quality = qj.value("demo_quality", q.demo_quality);
                s.questions.emplace(it.key(), std::move(q));
            }
        }
    } catch (const ojson::exception& e) {
        throw ValidationError(std::string("mock scenario: ") + e.what());
    }
    s.validate();
    return s;
}

MockScenario MockScenario::load(const std::filesystem::path& path) {
    return from_json(detail::read_file(path));
}

std::string MockScenario::to_json() const {
    ojson j;
    j["seed"] = seed;
    j["model_id"] = model_id;
    j["rephrase_template"] = rephrase_template;
    j["rationale_template"] = rationale_template;
    j["default_rules"] = ojson::array();
    for (const auto& r : default_rules) j["default_rules"].push_back(rule_to_json(r));
    j["demo_conditioning"] = {{"enabled", conditioning.enabled}, {"sharpness", conditioning.sharpness}};
    ojson qs = ojson::object();
    for (const auto& [id, q] : questions) {
        ojson qj;
        qj["rules"] = ojson::array();
        for (const auto& r : q.rules) qj["rules"].push_back(rule_to_json(r));
        if (!q.rephrasings.empty()) qj["rephrasings"] = q.rephrasings;
        if (q.rationale_template) qj["rationale_template"] = *q.rationale_template;
        if (q.correct_answer) qj["correct_answer"] = *q.correct_answer;
        if (!q.distractors.empty()) qj["distractors"] = q.distractors;
        qj["difficulty"] = q.difficulty;
        qj["demo_quality"] = q.demo_quality;
        qs[id] = qj;
    }
    j["questions"] = qs;
    return j.dump(2) + "\n";
}

void MockScenario::save(const std::filesystem::path& path) const { detail::write_file_atomic(path, to_json()); }

void MockScenario::validate(std::span<const Question> dataset) const {
    for (std::size_t i = 0; i < default_rules.size(); ++i) {
        check_distribution(default_rules[i].answers, "default_rules[" + std::to_string(i) + "]");
    }
    std::set<std::string> known;
    for (const auto& q : dataset) known.insert(q.id);
    for (const auto& [id, q] : questions) {
        for (std::size_t i = 0; i < q.rules.size(); ++i) {
            check_distribution(q.rules[i].answers, "questions." + id + ".rules[" + std::to_string(i) + "]");
        }
        if (!dataset.empty() && !known.contains(id)) {
            throw ValidationError("mock scenario references unknown question id '" + id + "'");
        }
        if (q.correct_answer && conditioning.enabled && q.distractors.empty()) {
            throw ValidationError("questions." + id + ": demo conditioning needs at least one distractor");
        }
    }
}

double mock_uniform(std::uint64_t scenario_seed, std::string_view question_id, std::string_view variant_label,
                    std::string_view trigger, double temperature, std::string_view context, int sample_index,
                    std::optional<std::uint64_t> request_seed) {
    std::string material = std::to_string(scenario_seed);
    material += kSep;
    material += question_id;
    material += kSep;
    material += variant_label;
    material += kSep;
    material += trigger;
    material += kSep;
    material += temperature_bucket(temperature);
    material += kSep;
    material += context;
    material += kSep;
    material += std::to_string(sample_index);
    if (request_seed) {
        material += kSep;
        material += "s" + std::to_string(*request_seed);
    }
    return unit_interval(splitmix64_mix(fnv1a64(material)));
}

std::size_t inverse_cdf(std::span<const AnswerWeight> answers, double u) {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
        cumulative += answers[i].p;
        if (u < cumulative) return i;
    }
    return answers.empty() ? 0 : answers.size() - 1;
}

MockGenerator::MockGenerator(MockScenario scenario, std::span<const Question> dataset)
    : scenario_(std::move(scenario)) {
    scenario_.validate(dataset);
    for (const auto& q : dataset) {
        question_text_[q.id] = q.text;
    }
    // Rephrasings first so that an original text always wins a collision.
    constexpr int kIndexedRephrasings = 16;
    for (const auto& q : dataset) {
        for (int i = kIndexedRephrasings - 1; i >= 0; --i) {
            texts_[rephrasing_for(q.id, i)] = {q.id, VariantKind::rephrased, i};
        }
    }
    for (const auto& q : dataset) {
        texts_[q.text] = {q.id, VariantKind::original, 0};
    }
}

std::string MockGenerator::rephrasing_for(const std::string& question_id, int index) const {
    auto q = scenario_.questions.find(question_id);
    if (q != scenario_.questions.end() && index >= 0 && static_cast<std::size_t>(index) < q->second.rephrasings.size()) {
        return q->second.rephrasings[static_cast<std::size_t>(index)];
    }
    auto text = question_text_.find(question_id);
    std::string out = replace_all(scenario_.rephrase_template, "{question}",
                                  text == question_text_.end() ? "" : text->second);
    return replace_all(std::move(out), "{index}", std::to_string(index));
}

std::string MockGenerator::sample_answer(const TextRef& target, const std::string& trigger, double temperature,
                                         const std::vector<std::string>& demo_ids, int sample_index,
                                         std::optional<std::uint64_t> request_seed,
                                         std::string* rationale_template) const {
    const MockQuestion* mq = nullptr;
    if (auto it = scenario_.questions.find(target.question_id); it != scenario_.questions.end()) {
        mq = &it->second;
    }
    *rationale_template = mq && mq->rationale_template ? *mq->rationale_template : scenario_.rationale_template;
    const std::string label = variant_label(target.kind, target.rephrase_index);

    if (scenario_.conditioning.enabled && !demo_ids.empty() && mq && mq->correct_answer) {
        double quality = 0.0;
        std::string context = "demos:";
        for (std::size_t i = 0; i < demo_ids.size(); ++i) {
            auto d = scenario_.questions.find(demo_ids[i]);
            quality += d == scenario_.questions.end() ? MockQuestion{}.demo_quality : d->second.demo_quality;
            context += (i ? "," : "") + demo_ids[i];
        }
        quality /= static_cast<double>(demo_ids.size());
        if (temperature == 0.0) {
            return quality >= mq->difficulty ? *mq->correct_answer : mq->distractors.front();
        }
        const double m = static_cast<double>(mq->distractors.size());
        const double s = 1.0 / (1.0 + std::exp(-scenario_.conditioning.sharpness * (quality - mq->difficulty)));
        const double p = 1.0 / (m + 1.0) + (1.0 - 1.0 / (m + 1.0)) * s;
        std::vector<AnswerWeight> dist{{*mq->correct_answer, p}};
        for (const auto& d : mq->distractors) dist.push_back({d, (1.0 - p) / m});
        const double u = mock_uniform(scenario_.seed, target.question_id, label, trigger, temperature, context,
                                      sample_index, request_seed);
        return dist[inverse_cdf(dist, u)].answer;
    }

    const MockRule* rule = nullptr;
    auto find_in = [&](const std::vector<MockRule>& rules) {
        for (const auto& r : rules) {
            if (rule_matches(r, target.kind, trigger, temperature)) return &r;
        }
        return static_cast<const MockRule*>(nullptr);
    };
    if (mq) rule = find_in(mq->rules);
    if (!rule) rule = find_in(scenario_.default_rules);
    if (!rule) {
        throw ProtocolError("mock scenario has no rule for question '" + target.question_id + "' (" + label +
                            ", trigger '" + trigger + "', temperature " + temperature_bucket(temperature) + ")");
    }
    if (rule->rationale_template) *rationale_template = *rule->rationale_template;
    const double u = mock_uniform(scenario_.seed, target.question_id, label, trigger, temperature, "", sample_index,
                                  request_seed);
    return rule->answers[inverse_cdf(rule->answers, u)].answer;
}

std::vector<std::string> MockGenerator::generate(const GenerationRequest& request) {
    request.validate();
    calls_.fetch_add(1);
    const std::string& prompt = request.prompt;
    const auto n = static_cast<std::size_t>(request.n_samples);
    std::vector<std::string> out;
    out.reserve(n);

    // Block starts: "Q: " at the beginning or after a blank line.
    std::vector<std::size_t> starts;
    if (prompt.starts_with("Q: ")) starts.push_back(0);
    for (std::size_t at = prompt.find("\n\nQ: "); at != std::string::npos; at = prompt.find("\n\nQ: ", at + 1)) {
        starts.push_back(at + 2);
    }

    if (starts.empty()) {
        // Rephrase request: instruction line(s), then the question text.
        const auto nl = prompt.find('\n');
        const std::string text(trim(nl == std::string::npos ? std::string_view{} : std::string_view(prompt).substr(nl + 1)));
        auto it = texts_.find(text);
        if (it == texts_.end() || it->second.kind != VariantKind::original) {
            throw ProtocolError("mock: rephrase request for an unknown question");
        }
        for (std::size_t i = 0; i < n; ++i) out.push_back(rephrasing_for(it->second.question_id, static_cast<int>(i)));
        return out;
    }

    auto block_question = [&](std::size_t start, std::size_t* answer_at) {
        const auto a = prompt.find("\nA:", start);
        if (a == std::string::npos) {
            throw ProtocolError("mock: prompt block without an 'A:' line");
        }
        *answer_at = a + 3;
        return std::string(trim(std::string_view(prompt).substr(start + 3, a - start - 3)));
    };

    std::vector<std::string> demo_ids;
    for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
        std::size_t ignored = 0;
        auto it = texts_.find(block_question(starts[b], &ignored));
        if (it != texts_.end()) demo_ids.push_back(it->second.question_id);
    }
    std::sort(demo_ids.begin(), demo_ids.end());
    demo_ids.erase(std::unique(demo_ids.begin(), demo_ids.end()), demo_ids.end());

    std::size_t rest_at = 0;
    const std::string target_text = block_question(starts.back(), &rest_at);
    auto target_it = texts_.find(target_text);
    if (target_it == texts_.end()) {
        throw ProtocolError("mock: prompt asks about an unknown question");
    }
    const TextRef& target = target_it->second;
    std::string_view rest(prompt);
    rest.remove_prefix(rest_at);
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);

    const auto question_text = question_text_.at(target.question_id);
    auto render = [&](const std::string& tmpl, const std::string& answer, const std::string& trigger) {
        std::string s = replace_all(tmpl, "{answer}", answer);
        s = replace_all(std::move(s), "{question}", question_text);
        return replace_all(std::move(s), "{trigger}", trigger);
    };

    std::string tmpl;
    if (const auto nl = rest.rfind('\n'); nl != std::string_view::npos) {
        // Answer-extraction stage: repeat the answer stated in the rationale.
        std::string answer = strip_answer_span(rest.substr(0, nl));
        const std::string trigger(trim(rest.substr(0, rest.find('\n'))));
        for (std::size_t i = 0; i < n; ++i) {
            std::string a = answer.empty() ? sample_answer(target, trigger, request.temperature, demo_ids,
                                                           static_cast<int>(i), request.seed, &tmpl)
                                           : answer;
            out.push_back(" " + a + ".");
        }
        return out;
    }

    const std::string trigger(trim(rest));
    const std::string lowered = to_lower(trigger);
    const bool answer_only = lowered.find("answer") != std::string::npos && lowered.ends_with(" is");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string answer =
            sample_answer(target, trigger, request.temperature, demo_ids, static_cast<int>(i), request.seed, &tmpl);
        out.push_back(answer_only ? " " + answer + "." : render(tmpl, answer, trigger));
    }
    return out;
}

}  // namespace zeus
