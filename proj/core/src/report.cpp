#include "zeus/report.hpp"

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/error.hpp"

namespace zeus {

using nlohmann::ordered_json;

void Report::upsert(EvalResult result) {
    for (auto& m : methods) {
        if (m.method == result.method) {
            m = std::move(result);
            return;
        }
    }
    methods.push_back(std::move(result));
}

void Report::set_ranking(const StrategyRanking& ranking) {
    strategies = ranking.scores;
    chosen_lu = ranking.chosen_lu;
    chosen_ha = ranking.chosen_ha;
}

namespace {

template <typename T>
ordered_json optional_json(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json optional_strategy(const std::optional<Strategy>& s) {
    return s ? ordered_json(strategy_name(*s)) : ordered_json(nullptr);
}

ordered_json fit_json(const LinearFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"degenerate", f.degenerate}};
}

LinearFit fit_from(const ordered_json& j) {
    return {j.at("slope").get<double>(), j.at("intercept").get<double>(), j.at("degenerate").get<bool>()};
}

}  // namespace

std::string report_to_json(const Report& report) {
    ordered_json j;
    j["model_id"] = report.model_id;
    j["dataset"] = report.dataset;
    if (report.stats) {
        const auto& s = *report.stats;
        j["stats"] = {{"mean", s.mean},
                      {"stddev", s.stddev},
                      {"count", s.count},
                      {"histogram", {{"bin_edges", s.histogram.bin_edges}, {"counts", s.histogram.counts}}}};
    } else {
        j["stats"] = nullptr;
    }
    ordered_json methods = ordered_json::array();
    for (const auto& m : report.methods) {
        ordered_json records = ordered_json::array();
        for (const auto& r : m.records) {
            records.push_back({{"question_id", r.question_id},
                               {"run", r.run},
                               {"prediction", r.prediction},
                               {"gold", r.gold},
                               {"correct", r.correct}});
        }
        methods.push_back({{"method", m.method},
                           {"run_accuracies", m.run_accuracies},
                           {"mean_accuracy", m.mean_accuracy},
                           {"records", records}});
    }
    j["methods"] = methods;
    ordered_json strategies = ordered_json::array();
    for (const auto& s : report.strategies) {
        strategies.push_back({{"strategy", strategy_name(s.strategy)},
                              {"mean_entropy", s.mean_entropy},
                              {"accuracy", optional_json(s.accuracy)}});
    }
    j["strategies"] = strategies;
    j["chosen_lu"] = optional_strategy(report.chosen_lu);
    j["chosen_ha"] = optional_strategy(report.chosen_ha);
    if (report.sensitivity) {
        const auto& f = *report.sensitivity;
        ordered_json points = ordered_json::array();
        for (const auto& p : f.points) {
            points.push_back({{"question_id", p.question_id}, {"confidence", p.confidence}, {"correct", p.correct}});
        }
        ordered_json bins = ordered_json::array();
        for (const auto& b : f.bins) {
            bins.push_back({{"lo", b.lo},
                            {"hi", b.hi},
                            {"count", b.count},
                            {"mean_confidence", b.mean_confidence},
                            {"accuracy", b.accuracy}});
        }
        j["sensitivity"] = {{"per_question", fit_json(f.fit)},
                            {"binned", fit_json(f.binned_fit)},
                            {"points", points},
                            {"bins", bins}};
    } else {
        j["sensitivity"] = nullptr;
    }
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        Report r;
        r.model_id = j.at("model_id").get<std::string>();
        r.dataset = j.at("dataset").get<std::string>();
        if (!j.at("stats").is_null()) {
            const auto& s = j["stats"];
            r.stats = DatasetStats{s.at("mean").get<double>(), s.at("stddev").get<double>(),
                                   s.at("count").get<std::size_t>(),
                                   Histogram{s.at("histogram").at("bin_edges").get<std::vector<double>>(),
                                             s.at("histogram").at("counts").get<std::vector<std::size_t>>()}};
        }
        for (const auto& m : j.at("methods")) {
            EvalResult e;
            e.method = m.at("method").get<std::string>();
            e.run_accuracies = m.at("run_accuracies").get<std::vector<double>>();
            e.mean_accuracy = m.at("mean_accuracy").get<double>();
            for (const auto& rec : m.at("records")) {
                e.records.push_back({rec.at("question_id").get<std::string>(), rec.at("run").get<int>(),
                                     rec.at("prediction").get<std::string>(), rec.at("gold").get<std::string>(),
                                     rec.at("correct").get<bool>()});
            }
            r.methods.push_back(std::move(e));
        }
        for (const auto& s : j.at("strategies")) {
            StrategyScore score;
            score.strategy = parse_strategy(s.at("strategy").get<std::string>());
            score.mean_entropy = s.at("mean_entropy").get<double>();
            if (!s.at("accuracy").is_null()) score.accuracy = s["accuracy"].get<double>();
            r.strategies.push_back(score);
        }
        if (!j.at("chosen_lu").is_null()) r.chosen_lu = parse_strategy(j["chosen_lu"].get<std::string>());
        if (!j.at("chosen_ha").is_null()) r.chosen_ha = parse_strategy(j["chosen_ha"].get<std::string>());
        if (!j.at("sensitivity").is_null()) {
            const auto& s = j["sensitivity"];
            SensitivityFit f;
            f.fit = fit_from(s.at("per_question"));
            f.binned_fit = fit_from(s.at("binned"));
            for (const auto& p : s.at("points")) {
                f.points.push_back({p.at("question_id").get<std::string>(), p.at("confidence").get<double>(),
                                    p.at("correct").get<double>()});
            }
            for (const auto& b : s.at("bins")) {
                f.bins.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(), b.at("count").get<std::size_t>(),
                                  b.at("mean_confidence").get<double>(), b.at("accuracy").get<double>()});
            }
            r.sensitivity = std::move(f);
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report document: ") + e.what());
    }
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void row(std::string& out, const std::string& section, const std::string& name, const std::string& metric,
         const std::string& value) {
    out += csv_field(section) + "," + csv_field(name) + "," + csv_field(metric) + "," + csv_field(value) + "\n";
}

}  // namespace

std::string report_to_csv(const Report& report) {
    using detail::format_double;
    std::string out = "section,name,metric,value\n";
    if (report.stats) {
        const auto& s = *report.stats;
        row(out, "stats", report.dataset, "mean", format_double(s.mean));
        row(out, "stats", report.dataset, "stddev", format_double(s.stddev));
        row(out, "stats", report.dataset, "count", std::to_string(s.count));
        for (std::size_t b = 0; b < s.histogram.counts.size(); ++b) {
            const std::string bin = format_double(s.histogram.bin_edges[b]) + ":" +
                                    format_double(s.histogram.bin_edges[b + 1]);
            row(out, "histogram", bin, "count", std::to_string(s.histogram.counts[b]));
        }
    }
    for (const auto& m : report.methods) {
        for (std::size_t r = 0; r < m.run_accuracies.size(); ++r) {
            row(out, "accuracy", m.method, "run_" + std::to_string(r + 1), format_double(m.run_accuracies[r]));
        }
        row(out, "accuracy", m.method, "mean", format_double(m.mean_accuracy));
    }
    for (const auto& s : report.strategies) {
        row(out, "strategy", strategy_name(s.strategy), "mean_entropy", format_double(s.mean_entropy));
        if (s.accuracy) row(out, "strategy", strategy_name(s.strategy), "accuracy", format_double(*s.accuracy));
    }
    if (report.chosen_lu) row(out, "choice", "ZEUS(LU)", "strategy", strategy_name(*report.chosen_lu));
    if (report.chosen_ha) row(out, "choice", "ZEUS(HA)", "strategy", strategy_name(*report.chosen_ha));
    if (report.sensitivity) {
        const auto& f = *report.sensitivity;
        row(out, "sensitivity", "per_question", "slope", format_double(f.fit.slope));
        row(out, "sensitivity", "per_question", "intercept", format_double(f.fit.intercept));
        row(out, "sensitivity", "binned", "slope", format_double(f.binned_fit.slope));
        row(out, "sensitivity", "binned", "intercept", format_double(f.binned_fit.intercept));
        for (const auto& b : f.bins) {
            const std::string bin = format_double(b.lo) + ":" + format_double(b.hi);
            row(out, "sensitivity_bin", bin, "count", std::to_string(b.count));
            row(out, "sensitivity_bin", bin, "mean_confidence", format_double(b.mean_confidence));
            row(out, "sensitivity_bin", bin, "accuracy", format_double(b.accuracy));
        }
    }
    return out;
}

void emit_report(const Report& report, const std::filesystem::path& out_dir) {
    if (report.empty()) throw ValidationError("report has no results to emit");
    detail::write_file_atomic(out_dir / "report.json", report_to_json(report));
    detail::write_file_atomic(out_dir / "report.csv", report_to_csv(report));
}

Report load_report(const std::filesystem::path& path) {
    try {
        return report_from_json(detail::read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace zeus
