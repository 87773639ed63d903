#include "zeus/cache.hpp"

#include <sstream>

#include "io_util.hpp"
#include "json.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"

namespace zeus {

using nlohmann::ordered_json;

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ResponseCache::key(const std::string& model_id, const std::string& prompt, double temperature,
                               int sample_index, const std::string& tag, std::optional<std::uint64_t> seed) {
    std::string material = model_id;
    material += '\x1f';
    material += prompt;
    material += '\x1f';
    material += detail::format_double(temperature);
    material += '\x1f';
    material += std::to_string(sample_index);
    material += '\x1f';
    material += tag;
    if (seed) {
        material += '\x1f';
        material += std::to_string(*seed);
    }
    return sha256_hex(material);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
    return dir_ / "responses" / key.substr(0, 2) / (key + ".txt");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    const auto p = path_for(key);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) return std::nullopt;
    return detail::read_file(p);
}

void ResponseCache::put(const std::string& key, const std::string& text) const {
    detail::write_file_atomic(path_for(key), text);
}

CachingGenerator::CachingGenerator(std::shared_ptr<TextGenerator> inner, std::shared_ptr<ResponseCache> cache,
                                   std::string tag)
    : inner_(std::move(inner)), cache_(std::move(cache)), tag_(std::move(tag)) {}

std::vector<std::string> CachingGenerator::generate(const GenerationRequest& request) {
    request.validate();
    const std::string model = inner_->model_id();
    std::vector<std::string> keys;
    std::vector<std::string> out;
    bool complete = true;
    for (int i = 0; i < request.n_samples; ++i) {
        keys.push_back(ResponseCache::key(model, request.prompt, request.temperature, i, tag_, request.seed));
        if (complete) {
            auto hit = cache_->get(keys.back());
            if (hit) {
                out.push_back(std::move(*hit));
            } else {
                complete = false;
            }
        }
    }
    if (complete) {
        hits_.fetch_add(1);
        return out;
    }
    misses_.fetch_add(1);
    auto fresh = inner_->generate(request);
    if (fresh.size() != static_cast<std::size_t>(request.n_samples)) {
        throw ProtocolError("backend returned " + std::to_string(fresh.size()) + " completions for request " +
                            request.fingerprint() + ", expected " + std::to_string(request.n_samples));
    }
    for (std::size_t i = 0; i < fresh.size(); ++i) cache_->put(keys[i], fresh[i]);
    return fresh;
}

namespace {

const char* variant_kind_name(VariantKind k) { return k == VariantKind::original ? "original" : "rephrased"; }

ordered_json record_to_json(const GenerationRecord& r) {
    return ordered_json{
        {"question_id", r.question_id},
        {"variant",
         {{"kind", variant_kind_name(r.variant.kind)},
          {"rephrase_index", r.variant.rephrase_index},
          {"trigger", r.variant.trigger},
          {"temperature", r.variant.temperature},
          {"samples", r.variant.samples}}},
        {"sample_index", r.sample_index},
        {"rationale", r.rationale},
        {"raw_answer", r.raw_answer},
        {"normalized_answer", r.normalized_answer},
    };
}

GenerationRecord record_from_json(const ordered_json& j) {
    GenerationRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    const auto& v = j.at("variant");
    const auto kind = v.at("kind").get<std::string>();
    if (kind == "original") {
        r.variant.kind = VariantKind::original;
    } else if (kind == "rephrased") {
        r.variant.kind = VariantKind::rephrased;
    } else {
        throw ValidationError("unknown variant kind '" + kind + "'");
    }
    r.variant.rephrase_index = v.at("rephrase_index").get<int>();
    r.variant.trigger = v.at("trigger").get<std::string>();
    r.variant.temperature = v.at("temperature").get<double>();
    r.variant.samples = v.at("samples").get<int>();
    r.sample_index = j.at("sample_index").get<int>();
    r.rationale = j.at("rationale").get<std::string>();
    r.raw_answer = j.at("raw_answer").get<std::string>();
    r.normalized_answer = j.at("normalized_answer").get<std::string>();
    return r;
}

ordered_json rephrasings_to_json(const std::vector<Rephrasing>& rs) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rs) {
        arr.push_back({{"index", r.index},
                       {"text", r.text},
                       {"empty", r.empty},
                       {"identical_to_original", r.identical_to_original}});
    }
    return arr;
}

std::vector<Rephrasing> rephrasings_from_json(const ordered_json& arr) {
    std::vector<Rephrasing> out;
    for (const auto& j : arr) {
        out.push_back({j.at("index").get<int>(), j.at("text").get<std::string>(), j.at("empty").get<bool>(),
                       j.at("identical_to_original").get<bool>()});
    }
    return out;
}

}  // namespace

// The first line carries the pool header (question id, rephrasings); every
// following line is one GenerationRecord.
std::string pool_to_jsonl(const AnswerPool& pool) {
    std::string out = ordered_json{{"question_id", pool.question_id},
                                   {"pool_size", pool.pool_size()},
                                   {"rephrasings", rephrasings_to_json(pool.rephrasings)}}
                          .dump();
    out += '\n';
    for (const auto& r : pool.records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

AnswerPool pool_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    AnswerPool pool;
    std::size_t expected = 0;
    bool header = true;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = ordered_json::parse(line);
            if (header) {
                pool.question_id = j.at("question_id").get<std::string>();
                expected = j.at("pool_size").get<std::size_t>();
                pool.rephrasings = rephrasings_from_json(j.at("rephrasings"));
                header = false;
            } else {
                pool.records.push_back(record_from_json(j));
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("pool file line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (header || pool.records.size() != expected) {
        throw ValidationError("pool file is truncated");
    }
    return pool;
}

PoolStore::PoolStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string PoolStore::key_for(const std::string& model_id, const std::string& question_id,
                               const std::string& plan_fingerprint) {
    return sha256_hex(model_id + '\x1f' + question_id + '\x1f' + plan_fingerprint);
}

std::optional<AnswerPool> PoolStore::load(const std::string& key) const {
    const auto p = dir_ / "pools" / (key + ".jsonl");
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) return std::nullopt;
    return pool_from_jsonl(detail::read_file(p));
}

void PoolStore::save(const std::string& key, const AnswerPool& pool, const std::string& model_id,
                     const std::string& plan_fingerprint) {
    detail::write_file_atomic(dir_ / "pools" / (key + ".jsonl"), pool_to_jsonl(pool));

    std::lock_guard lock(mu_);
    const auto manifest_path = dir_ / "pools" / "manifest.json";
    // Sorted keys keep the manifest independent of save order.
    nlohmann::json manifest = nlohmann::json::object();
    std::error_code ec;
    if (std::filesystem::is_regular_file(manifest_path, ec)) {
        try {
            manifest = nlohmann::json::parse(detail::read_file(manifest_path));
        } catch (const nlohmann::json::exception&) {
            manifest = nlohmann::json::object();
        }
    }
    manifest[key] = {{"question_id", pool.question_id},
                     {"model_id", model_id},
                     {"plan_fingerprint", plan_fingerprint},
                     {"pool_size", pool.pool_size()}};
    detail::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

std::map<std::string, std::string> PoolStore::manifest() const {
    std::lock_guard lock(mu_);
    std::map<std::string, std::string> out;
    const auto manifest_path = dir_ / "pools" / "manifest.json";
    std::error_code ec;
    if (!std::filesystem::is_regular_file(manifest_path, ec)) return out;
    const auto j = nlohmann::json::parse(detail::read_file(manifest_path));
    for (const auto& [k, v] : j.items()) out.emplace(k, v.at("question_id").get<std::string>());
    return out;
}

}  // namespace zeus
