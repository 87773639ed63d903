#include "zeus/config.hpp"

#include <cstdlib>
#include <functional>

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/error.hpp"

namespace zeus {

using nlohmann::json;

std::string interpolate_env(const std::string& text, std::vector<std::string>* errors) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.compare(i, 2, "${") == 0) {
            const auto close = text.find('}', i + 2);
            if (close != std::string::npos) {
                const std::string name = text.substr(i + 2, close - i - 2);
                const char* value = std::getenv(name.c_str());
                if (value == nullptr) {
                    if (errors) errors->push_back("environment variable '" + name + "' is not set");
                } else {
                    out += value;
                }
                i = close + 1;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

namespace {

class Reader {
public:
    Reader(std::vector<std::string>& errors, std::filesystem::path base) : errors_(errors), base_(std::move(base)) {}

    const json* child(const json& obj, const std::string& key, const std::string& where) {
        if (!obj.contains(key)) return nullptr;
        const json& v = obj[key];
        if (!v.is_object()) {
            errors_.push_back(where + key + ": expected an object");
            return nullptr;
        }
        return &v;
    }

    void str(const json& obj, const std::string& key, const std::string& where, std::string& out) {
        if (!obj.contains(key)) return;
        const json& v = obj[key];
        if (!v.is_string()) {
            errors_.push_back(where + key + ": expected a string");
            return;
        }
        std::vector<std::string> env_errors;
        out = interpolate_env(v.get<std::string>(), &env_errors);
        for (const auto& e : env_errors) errors_.push_back(where + key + ": " + e);
    }

    void path(const json& obj, const std::string& key, const std::string& where, std::filesystem::path& out) {
        std::string s;
        if (!obj.contains(key)) return;
        str(obj, key, where, s);
        if (s.empty()) return;
        std::filesystem::path p(s);
        out = p.is_absolute() ? p : base_ / p;
    }

    template <typename T>
    void number(const json& obj, const std::string& key, const std::string& where, T& out,
                std::function<bool(T)> ok = nullptr, const std::string& requirement = {}) {
        if (!obj.contains(key)) return;
        const json& v = obj[key];
        bool good = std::is_integral_v<T> ? v.is_number_integer() : v.is_number();
        if constexpr (std::is_unsigned_v<T>) good = good && (v.is_number_unsigned() || v.get<long long>() >= 0);
        if (!good) {
            errors_.push_back(where + key + (std::is_integral_v<T> ? ": expected an integer" : ": expected a number"));
            return;
        }
        const T value = v.get<T>();
        if (ok && !ok(value)) {
            errors_.push_back(where + key + ": " + requirement);
            return;
        }
        out = value;
    }

    void boolean(const json& obj, const std::string& key, const std::string& where, bool& out) {
        if (!obj.contains(key)) return;
        if (!obj[key].is_boolean()) {
            errors_.push_back(where + key + ": expected true or false");
            return;
        }
        out = obj[key].get<bool>();
    }

    bool strings(const json& obj, const std::string& key, const std::string& where, std::vector<std::string>& out) {
        if (!obj.contains(key)) return false;
        const json& v = obj[key];
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_string(); })) {
            errors_.push_back(where + key + ": expected a list of strings");
            return false;
        }
        out = v.get<std::vector<std::string>>();
        return true;
    }

    void error(std::string message) { errors_.push_back(std::move(message)); }

private:
    std::vector<std::string>& errors_;
    std::filesystem::path base_;
};

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config must be a JSON object");

    RunConfig c;
    std::vector<std::string> errors;
    Reader r(errors, base_dir);

    if (const json* d = r.child(root, "dataset", "")) {
        r.path(*d, "path", "dataset.", c.dataset.path);
        r.path(*d, "test_path", "dataset.", c.dataset.test_path);
        r.boolean(*d, "presplit", "dataset.", c.dataset.presplit);
        r.number<double>(*d, "unlabeled_fraction", "dataset.", c.dataset.unlabeled_fraction,
                         [](double f) { return f > 0.0 && f < 1.0; }, "must lie strictly between 0 and 1");
        if (d->contains("split_seed")) {
            std::uint64_t s = 0;
            r.number<std::uint64_t>(*d, "split_seed", "dataset.", s);
            c.dataset.split_seed = s;
        }
        std::string task = "numeric";
        r.str(*d, "task", "dataset.", task);
        std::vector<std::string> labels;
        const bool has_labels = r.strings(*d, "labels", "dataset.", labels);
        try {
            if (task == "label_set") {
                if (!has_labels) throw ValidationError("label_set needs dataset.labels");
                c.dataset.task = TaskKind::label_set(labels);
            } else {
                c.dataset.task = TaskKind::parse(task);
            }
        } catch (const ValidationError& e) {
            r.error(std::string("dataset.task: ") + e.what());
        }
        std::string policy;
        r.str(*d, "match_policy", "dataset.", policy);
        if (policy == "first") {
            c.dataset.task = c.dataset.task.with_policy(MatchPolicy::first);
        } else if (!policy.empty() && policy != "last") {
            r.error("dataset.match_policy: must be 'first' or 'last'");
        }
    } else {
        r.error("dataset: missing section");
    }

    r.str(root, "model_id", "", c.model_id);

    if (const json* p = r.child(root, "provider", "")) {
        const std::string w = "provider.";
        r.str(*p, "backend", w, c.provider.backend);
        if (c.provider.backend != "mock" && c.provider.backend != "remote") {
            r.error("provider.backend: must be 'mock' or 'remote'");
        }
        r.path(*p, "mock_scenario", w, c.provider.mock_scenario);
        r.str(*p, "endpoint", w, c.provider.remote.endpoint);
        r.str(*p, "auth_token_env", w, c.provider.remote.auth_token_env);
        r.str(*p, "auth_header", w, c.provider.remote.auth_header);
        r.number<std::size_t>(*p, "max_concurrent", w, c.provider.remote.max_concurrent,
                              [](std::size_t n) { return n >= 1; }, "must be at least 1");
        r.number<int>(*p, "retries", w, c.provider.remote.retries, [](int n) { return n >= 0; },
                      "must be non-negative");
        r.number<double>(*p, "timeout_seconds", w, c.provider.remote.timeout_seconds,
                         [](double t) { return t > 0.0; }, "must be positive");
        r.str(*p, "embedding_backend", w, c.provider.embedding_backend);
        if (c.provider.embedding_backend != "fallback" && c.provider.embedding_backend != "remote") {
            r.error("provider.embedding_backend: must be 'fallback' or 'remote'");
        }
        r.str(*p, "embedding_endpoint", w, c.provider.embedding_endpoint);
        r.str(*p, "embedding_model", w, c.provider.embedding_model);
        r.number<std::size_t>(*p, "embedding_dim", w, c.provider.embedding_dim,
                              [](std::size_t n) { return n >= 1; }, "must be at least 1");
        r.str(*p, "rephrase_model", w, c.provider.rephrase_model);
    }

    if (const json* p = r.child(root, "plan", "")) {
        const std::string w = "plan.";
        r.strings(*p, "trigger_phrases", w, c.plan.trigger_phrases);
        r.number<int>(*p, "original_samples_per_trigger", w, c.plan.original_samples_per_trigger);
        r.number<double>(*p, "high_temperature", w, c.plan.high_temperature);
        r.number<int>(*p, "rephrase_count", w, c.plan.rephrase_count);
        r.number<int>(*p, "rephrased_samples_per_trigger", w, c.plan.rephrased_samples_per_trigger);
        r.number<double>(*p, "low_temperature", w, c.plan.low_temperature);
        r.str(*p, "rephrase_instruction", w, c.plan.rephrase_instruction);
        std::vector<std::string> rt;
        if (r.strings(*p, "rephrase_triggers", w, rt)) c.plan.rephrase_triggers = rt;
        try {
            c.plan.validate();
        } catch (const ValidationError& e) {
            r.error(e.what());
        }
    }

    r.number<int>(root, "k", "", c.k, [](int k) { return k >= 1; }, "must be at least 1");
    r.number<std::uint64_t>(root, "seed", "", c.seed);
    r.number<int>(root, "runs", "", c.runs, [](int n) { return n >= 1; }, "must be at least 1");

    std::vector<std::string> names;
    if (r.strings(root, "strategies", "", names)) {
        c.strategies.clear();
        for (const auto& n : names) {
            try {
                c.strategies.push_back(parse_strategy(n));
            } catch (const ValidationError& e) {
                r.error(std::string("strategies: ") + e.what());
            }
        }
    }
    names.clear();
    if (r.strings(root, "methods", "", names)) {
        for (const auto& n : names) {
            try {
                c.methods.push_back(MethodSpec::parse(n));
            } catch (const ValidationError& e) {
                r.error(std::string("methods: ") + e.what());
            }
        }
    }

    r.path(root, "cache_dir", "", c.cache_dir);
    r.path(root, "out_dir", "", c.out_dir);
    r.path(root, "manual_demos", "", c.manual_demos);

    if (const json* f = r.child(root, "filters", "")) {
        r.boolean(*f, "enabled", "filters.", c.filters.enabled);
        r.number<std::size_t>(*f, "max_question_words", "filters.", c.filters.max_question_words);
        r.number<std::size_t>(*f, "max_rationale_steps", "filters.", c.filters.max_rationale_steps);
        r.boolean(*f, "require_parseable", "filters.", c.filters.require_parseable);
    }

    if (const json* t = r.child(root, "temp_perb", "")) {
        if (t->contains("temperatures")) {
            const json& temps = (*t)["temperatures"];
            if (!temps.is_array() || temps.empty() ||
                !std::all_of(temps.begin(), temps.end(), [](const json& x) { return x.is_number(); })) {
                r.error("temp_perb.temperatures: expected a non-empty list of numbers");
            } else {
                c.temp_perb.temperatures = temps.get<std::vector<double>>();
            }
        }
        r.number<int>(*t, "samples", "temp_perb.", c.temp_perb.samples_per_temperature,
                      [](int n) { return n >= 2; }, "must be at least 2");
        r.str(*t, "trigger", "temp_perb.", c.temp_perb.trigger);
    }

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw ValidationError("config file '" + path.string() + "' does not exist");
    }
    const auto base = std::filesystem::absolute(path).parent_path();
    try {
        return parse_config(detail::read_file(path), base);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void validate_config(const RunConfig& c) {
    std::vector<std::string> errors;
    auto must_exist = [&](const std::filesystem::path& p, const std::string& key) {
        std::error_code ec;
        if (p.empty()) {
            errors.push_back(key + ": missing");
        } else if (!std::filesystem::is_regular_file(p, ec)) {
            errors.push_back(key + ": file '" + p.string() + "' does not exist");
        }
    };
    must_exist(c.dataset.path, "dataset.path");
    if (c.dataset.presplit) must_exist(c.dataset.test_path, "dataset.test_path");
    if (c.provider.backend == "mock") {
        must_exist(c.provider.mock_scenario, "provider.mock_scenario");
    } else if (c.provider.backend == "remote") {
        if (c.provider.remote.endpoint.empty()) errors.push_back("provider.endpoint: missing");
        if (c.model_id.empty()) errors.push_back("model_id: missing");
    } else {
        errors.push_back("provider.backend: must be 'mock' or 'remote'");
    }
    if (c.provider.embedding_backend == "remote" && c.provider.embedding_endpoint.empty()) {
        errors.push_back("provider.embedding_endpoint: missing");
    }
    if (!c.manual_demos.empty()) must_exist(c.manual_demos, "manual_demos");
    if (c.k < 1) errors.push_back("k: must be at least 1");
    if (c.runs < 1) errors.push_back("runs: must be at least 1");
    if (c.strategies.empty()) errors.push_back("strategies: must not be empty");
    try {
        c.plan.validate();
    } catch (const ValidationError& e) {
        errors.push_back(e.what());
    }
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
}

}  // namespace zeus
