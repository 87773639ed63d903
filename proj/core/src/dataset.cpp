#include "zeus/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "json.hpp"
#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"
#include "io_util.hpp"

namespace zeus {

using nlohmann::json;

DatasetSplit split_dataset(const std::vector<Question>& questions, double unlabeled_fraction, std::uint64_t seed) {
    if (questions.size() < 2) {
        throw ValidationError("dataset too small to split");
    }
    if (!(unlabeled_fraction > 0.0 && unlabeled_fraction < 1.0)) {
        throw ValidationError("unlabeled_fraction must lie strictly between 0 and 1");
    }

    const bool any_stratum = std::any_of(questions.begin(), questions.end(),
                                         [](const Question& q) { return q.stratum.has_value(); });
    const bool all_gold = std::all_of(questions.begin(), questions.end(),
                                      [](const Question& q) { return q.gold_answer.has_value(); });
    if (any_stratum) {
        for (const auto& q : questions) {
            if (!q.stratum) {
                throw ValidationError("question '" + q.id + "' has no stratum while others do");
            }
        }
    }

    // Strata in order of first appearance.
    std::vector<std::string> stratum_names;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        std::string key;
        if (any_stratum) {
            key = *questions[i].stratum;
        } else if (all_gold) {
            key = *questions[i].gold_answer;
        }
        auto [it, inserted] = members.try_emplace(key);
        if (inserted) {
            stratum_names.push_back(key);
        }
        it->second.push_back(i);
    }

    const std::size_t n = questions.size();
    const auto target = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(unlabeled_fraction * static_cast<double>(n))), 1, n - 1);

    // Largest-remainder apportionment of `target` across strata.
    struct Share {
        std::size_t stratum;
        std::size_t take;
        double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < stratum_names.size(); ++s) {
        const double exact = unlabeled_fraction * static_cast<double>(members[stratum_names[s]].size());
        const auto take = static_cast<std::size_t>(std::floor(exact));
        shares.push_back({s, take, exact - static_cast<double>(take)});
        assigned += take;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    // Equal remainders (common with many singleton strata) are resolved by a seeded shuffle.
    SplitMix64 tie_rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[tie_rng.below(i)]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t pass = 0; assigned < target && pass < 2; ++pass) {
        for (std::size_t idx : order) {
            if (assigned >= target) break;
            auto& share = shares[idx];
            const std::size_t size = members[stratum_names[share.stratum]].size();
            const double exact = unlabeled_fraction * static_cast<double>(size);
            if (share.take < size && static_cast<double>(share.take) < std::ceil(exact)) {
                ++share.take;
                ++assigned;
            }
        }
    }

    std::vector<bool> unlabeled(n, false);
    for (const auto& share : shares) {
        const auto& name = stratum_names[share.stratum];
        std::vector<std::size_t> idx = members[name];
        SplitMix64 rng(seed ^ fnv1a64(name));
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        for (std::size_t i = 0; i < share.take; ++i) {
            unlabeled[idx[i]] = true;
        }
    }

    DatasetSplit out;
    for (std::size_t i = 0; i < n; ++i) {
        (unlabeled[i] ? out.unlabeled : out.test).push_back(questions[i]);
    }
    return out;
}

namespace {

std::string scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    return v.dump();
}

}  // namespace

std::vector<Question> load_questions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open questions file '" + path.string() + "'");
    }
    std::vector<Question> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + ": invalid JSON: " + e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("question")) {
            throw ValidationError(where + ": record needs 'id' and 'question'");
        }
        Question q;
        q.id = scalar_to_string(j["id"]);
        q.text = j["question"].is_string() ? j["question"].get<std::string>() : "";
        if (trim(q.text).empty()) {
            throw ValidationError(where + ": question text must be a non-empty string");
        }
        if (j.contains("gold_answer") && !j["gold_answer"].is_null()) {
            q.gold_answer = scalar_to_string(j["gold_answer"]);
        }
        if (j.contains("choices") && !j["choices"].is_null()) {
            if (!j["choices"].is_array()) {
                throw ValidationError(where + ": 'choices' must be an array");
            }
            for (const auto& c : j["choices"]) q.choices.push_back(scalar_to_string(c));
        }
        if (j.contains("stratum") && !j["stratum"].is_null()) {
            q.stratum = scalar_to_string(j["stratum"]);
        }
        if (!ids.insert(q.id).second) {
            throw ValidationError(where + ": duplicate question id '" + q.id + "'");
        }
        out.push_back(std::move(q));
    }
    return out;
}

void save_questions(const std::filesystem::path& path, const std::vector<Question>& questions) {
    std::string body;
    for (const auto& q : questions) {
        json j = {{"id", q.id}, {"question", q.text}};
        if (q.gold_answer) j["gold_answer"] = *q.gold_answer;
        if (!q.choices.empty()) j["choices"] = q.choices;
        if (q.stratum) j["stratum"] = *q.stratum;
        body += j.dump() + "\n";
    }
    detail::write_file_atomic(path, body);
}

void prepare_questions(std::vector<Question>& questions, const TaskKind& kind) {
    std::set<std::string> ids;
    for (auto& q : questions) {
        if (!ids.insert(q.id).second) {
            throw ValidationError("duplicate question id '" + q.id + "'");
        }
        if (trim(q.text).empty()) {
            throw ValidationError("question '" + q.id + "' has empty text");
        }
        if (!q.gold_answer) continue;
        const std::string norm = normalize_answer(*q.gold_answer, kind, q.choices);
        if (norm == kUnparseable) {
            throw ValidationError("question '" + q.id + "': gold answer '" + *q.gold_answer +
                                  "' does not parse as " + kind.name());
        }
        if (!q.choices.empty() && kind.kind() == AnswerKind::multiple_choice) {
            const auto idx = static_cast<std::size_t>(norm[0] - 'a');
            if (norm.size() != 1 || idx >= q.choices.size()) {
                throw ValidationError("question '" + q.id + "': gold answer is not one of its choices");
            }
        }
        q.gold_answer = norm;
    }
}

}  // namespace zeus
