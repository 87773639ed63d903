#include "zeus/select.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/error.hpp"

namespace zeus {

using nlohmann::ordered_json;

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Trivial: return "Trivial";
        case Strategy::VeryEasy: return "VeryEasy";
        case Strategy::Easy: return "Easy";
        case Strategy::Moderate: return "Moderate";
        case Strategy::Challenging: return "Challenging";
        case Strategy::Hard: return "Hard";
        case Strategy::VeryHard: return "VeryHard";
        case Strategy::All: return "All";
    }
    return "All";
}

Strategy parse_strategy(std::string_view name) {
    std::string key;
    for (char c : name) {
        if (c == ' ' || c == '_' || c == '-') continue;
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    for (Strategy s : kAllStrategies) {
        std::string candidate = strategy_name(s);
        std::transform(candidate.begin(), candidate.end(), candidate.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (candidate == key) return s;
    }
    throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

StrategySpec resolve_strategy(Strategy s, double mean, double stddev) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double lo = mean - stddev;
    const double hi = mean + stddev;
    StrategySpec spec{s, 0.0, inf};
    switch (s) {
        case Strategy::Trivial: spec.u_max = lo; break;
        case Strategy::VeryEasy: spec.u_max = mean; break;
        case Strategy::Easy: spec.u_max = hi; break;
        case Strategy::Moderate: spec.u_min = lo; spec.u_max = mean; break;
        case Strategy::Challenging: spec.u_min = lo; spec.u_max = hi; break;
        case Strategy::Hard: spec.u_min = lo; break;
        case Strategy::VeryHard: spec.u_min = mean; break;
        case Strategy::All: break;
    }
    spec.u_min = std::max(0.0, spec.u_min);
    spec.u_max = std::max(spec.u_min, spec.u_max);
    return spec;
}

StrategySpec resolve_strategy(Strategy s, const DatasetStats& stats) {
    if (stats.count < 1) throw ValidationError("strategy bounds need statistics over at least one question");
    return resolve_strategy(s, stats.mean, stats.stddev);
}

std::vector<std::string> filter_questions(std::span<const UncertaintyEstimate> estimates, const StrategySpec& spec) {
    std::vector<std::string> out;
    for (const auto& e : estimates) {
        if (spec.contains(e.entropy)) out.push_back(e.question_id);
    }
    return out;
}

namespace {

ordered_json bound_to_json(double v) { return std::isinf(v) ? ordered_json(nullptr) : ordered_json(v); }

double bound_from_json(const ordered_json& j) {
    return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string selection_to_json(const Selection& sel) {
    ordered_json j{{"strategy", strategy_name(sel.spec.strategy)},
                   {"u_min", bound_to_json(sel.spec.u_min)},
                   {"u_max", bound_to_json(sel.spec.u_max)},
                   {"selected_ids", sel.selected_ids},
                   {"selected_count", sel.selected_ids.size()},
                   {"total_count", sel.total_count}};
    return j.dump(2) + "\n";
}

Selection selection_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        Selection sel;
        sel.spec.strategy = parse_strategy(j.at("strategy").get<std::string>());
        sel.spec.u_min = bound_from_json(j.at("u_min"));
        sel.spec.u_max = bound_from_json(j.at("u_max"));
        sel.selected_ids = j.at("selected_ids").get<std::vector<std::string>>();
        sel.total_count = j.at("total_count").get<std::size_t>();
        return sel;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed selection document: ") + e.what());
    }
}

void save_selection(const std::filesystem::path& path, const Selection& sel) {
    detail::write_file_atomic(path, selection_to_json(sel));
}

Selection load_selection(const std::filesystem::path& path) {
    try {
        return selection_from_json(detail::read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace zeus
