#include "zeus/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/perturb.hpp"

namespace zeus {

using nlohmann::ordered_json;

std::vector<AnswerScore> confidence_scores(std::span<const std::string> answers, const TaskKind& kind) {
    if (answers.empty()) throw ValidationError("cannot score an empty answer pool");
    std::vector<AnswerScore> classes;
    for (const auto& a : answers) {
        auto it = std::find_if(classes.begin(), classes.end(),
                               [&](const AnswerScore& c) { return answers_equal(c.answer, a, kind); });
        if (it == classes.end()) {
            classes.push_back({a, 1, 0.0});
        } else {
            ++it->count;
        }
    }
    // stable_sort keeps first-appearance order among equal counts
    std::stable_sort(classes.begin(), classes.end(),
                     [](const AnswerScore& x, const AnswerScore& y) { return x.count > y.count; });
    const auto n = static_cast<double>(answers.size());
    for (auto& c : classes) c.confidence = static_cast<double>(c.count) / n;
    return classes;
}

std::vector<AnswerScore> confidence_scores(const AnswerPool& pool, const TaskKind& kind) {
    std::vector<std::string> answers;
    answers.reserve(pool.records.size());
    for (const auto& r : pool.records) answers.push_back(r.normalized_answer);
    return confidence_scores(answers, kind);
}

double predictive_entropy(std::span<const AnswerScore> scores) {
    double total = 0.0;
    for (const auto& s : scores) {
        if (s.confidence < 0.0 || !std::isfinite(s.confidence)) {
            throw ValidationError("confidence for '" + s.answer + "' is negative");
        }
        total += s.confidence;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError("confidences sum to " + detail::format_double(total) + ", expected 1");
    }
    double u = 0.0;
    for (const auto& s : scores) {
        if (s.confidence > 0.0) u -= s.confidence * std::log(s.confidence);
    }
    return std::max(0.0, u);
}

UncertaintyEstimate estimate(const AnswerPool& pool, const TaskKind& kind) {
    UncertaintyEstimate e;
    e.question_id = pool.question_id;
    e.unique_answers = confidence_scores(pool, kind);
    e.entropy = predictive_entropy(e.unique_answers);
    e.modal_answer = e.unique_answers.front().answer;
    e.modal_confidence = e.unique_answers.front().confidence;
    e.pool_size = pool.pool_size();
    return e;
}

Histogram make_histogram(std::span<const double> values, double upper, std::size_t bins) {
    if (bins == 0) throw ValidationError("histogram needs at least one bin");
    if (!(upper > 0.0)) upper = 1.0;
    Histogram h;
    h.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.bin_edges[i] = upper * static_cast<double>(i) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::max(0.0, v) / upper * static_cast<double>(bins));
        ++h.counts[std::min(b, bins - 1)];
    }
    return h;
}

DatasetStats dataset_stats(std::span<const UncertaintyEstimate> estimates) {
    DatasetStats s;
    s.count = estimates.size();
    std::vector<double> values;
    std::size_t max_pool = 0;
    for (const auto& e : estimates) {
        values.push_back(e.entropy);
        max_pool = std::max(max_pool, e.pool_size);
    }
    if (!values.empty()) {
        double sum = 0.0;
        for (double v : values) sum += v;
        s.mean = sum / static_cast<double>(values.size());
        double sq = 0.0;
        for (double v : values) sq += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(values.size()));
    }
    const double upper = max_pool > 1 ? std::log(static_cast<double>(max_pool)) : 1.0;
    s.histogram = make_histogram(values, upper);
    return s;
}

EstimateBatch estimate_all(std::span<const AnswerPool> pools, const TaskKind& kind) {
    EstimateBatch batch;
    batch.estimates.reserve(pools.size());
    for (const auto& p : pools) {
        try {
            batch.estimates.push_back(estimate(p, kind));
        } catch (const ValidationError& e) {
            throw ValidationError("question '" + p.question_id + "': " + e.what());
        }
    }
    batch.stats = dataset_stats(batch.estimates);
    return batch;
}

TempPerbResult temp_perb(const Question& q, const std::string& demo_prefix, const TempPerbConfig& config,
                         const TaskKind& kind, TextGenerator& generator) {
    if (config.temperatures.empty()) throw ValidationError("temp_perb needs at least one temperature");
    if (config.samples_per_temperature < 1) throw ValidationError("temp_perb samples must be >= 1");
    const std::string prompt = demo_prefix + sampling_prompt(q.text, config.trigger);
    std::vector<std::string> answers;
    for (double t : config.temperatures) {
        GenerationRequest req;
        req.prompt = prompt;
        req.temperature = t;
        req.n_samples = config.samples_per_temperature;
        for (const auto& text : generator.generate(req)) {
            answers.push_back(extract_answer(text, kind, q.choices).normalized);
        }
    }
    TempPerbResult r;
    r.samples = answers.size();
    r.scores = confidence_scores(answers, kind);
    r.entropy = predictive_entropy(r.scores);
    return r;
}

double temp_perb_entropy(const Question& q, const std::string& demo_prefix, int samples, double temperature,
                         const TaskKind& kind, TextGenerator& generator) {
    if (samples < 2) throw ValidationError("temp_perb_entropy needs at least 2 samples");
    TempPerbConfig c;
    c.temperatures = {temperature};
    c.samples_per_temperature = samples;
    return temp_perb(q, demo_prefix, c, kind, generator).entropy;
}

std::string estimates_to_jsonl(std::span<const UncertaintyEstimate> estimates) {
    std::string out;
    for (const auto& e : estimates) {
        out += ordered_json{{"question_id", e.question_id},
                            {"entropy", e.entropy},
                            {"modal_answer", e.modal_answer},
                            {"modal_confidence", e.modal_confidence},
                            {"n_unique", e.n_unique()},
                            {"pool_size", e.pool_size}}
                   .dump();
        out += '\n';
    }
    return out;
}

void save_estimates(const std::filesystem::path& path, std::span<const UncertaintyEstimate> estimates) {
    detail::write_file_atomic(path, estimates_to_jsonl(estimates));
}

std::vector<UncertaintyEstimate> load_estimates(const std::filesystem::path& path) {
    std::istringstream in(detail::read_file(path));
    std::vector<UncertaintyEstimate> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const auto j = ordered_json::parse(line);
            UncertaintyEstimate e;
            e.question_id = j.at("question_id").get<std::string>();
            e.entropy = j.at("entropy").get<double>();
            e.modal_answer = j.at("modal_answer").get<std::string>();
            e.modal_confidence = j.at("modal_confidence").get<double>();
            e.pool_size = j.at("pool_size").get<std::size_t>();
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return out;
}

std::string stats_to_json(const DatasetStats& stats) {
    ordered_json j{{"mean", stats.mean},
                   {"stddev", stats.stddev},
                   {"count", stats.count},
                   {"histogram", {{"bin_edges", stats.histogram.bin_edges}, {"counts", stats.histogram.counts}}}};
    return j.dump(2) + "\n";
}

DatasetStats stats_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        DatasetStats s;
        s.mean = j.at("mean").get<double>();
        s.stddev = j.at("stddev").get<double>();
        s.count = j.at("count").get<std::size_t>();
        s.histogram.bin_edges = j.at("histogram").at("bin_edges").get<std::vector<double>>();
        s.histogram.counts = j.at("histogram").at("counts").get<std::vector<std::size_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed stats document: ") + e.what());
    }
}

void save_stats(const std::filesystem::path& path, const DatasetStats& stats) {
    detail::write_file_atomic(path, stats_to_json(stats));
}

DatasetStats load_stats(const std::filesystem::path& path) {
    try {
        return stats_from_json(detail::read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace zeus
