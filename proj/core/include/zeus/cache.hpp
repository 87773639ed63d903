#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "zeus/providers.hpp"
#include "zeus/types.hpp"

namespace zeus {

// On-disk store of single completions, one file per (model, prompt,
// temperature, sample index, tag, seed). Writes are atomic.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    static std::string key(const std::string& model_id, const std::string& prompt, double temperature,
                           int sample_index, const std::string& tag, std::optional<std::uint64_t> seed);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& text) const;

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
};

// Serves a request from the cache when every sample slot is present;
// otherwise forwards the whole request and stores each completion.
class CachingGenerator final : public TextGenerator {
public:
    CachingGenerator(std::shared_ptr<TextGenerator> inner, std::shared_ptr<ResponseCache> cache, std::string tag = {});

    std::vector<std::string> generate(const GenerationRequest& request) override;
    std::string model_id() const override { return inner_->model_id(); }
    std::size_t max_concurrency() const override { return inner_->max_concurrency(); }

    std::size_t hits() const noexcept { return hits_.load(); }
    std::size_t misses() const noexcept { return misses_.load(); }

private:
    std::shared_ptr<TextGenerator> inner_;
    std::shared_ptr<ResponseCache> cache_;
    std::string tag_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

// Persisted answer pools: pools/<key>.jsonl (one GenerationRecord per line)
// plus pools/manifest.json mapping each key to its question id, model and plan.
class PoolStore {
public:
    explicit PoolStore(std::filesystem::path dir);

    static std::string key_for(const std::string& model_id, const std::string& question_id,
                               const std::string& plan_fingerprint);

    std::optional<AnswerPool> load(const std::string& key) const;
    void save(const std::string& key, const AnswerPool& pool, const std::string& model_id,
              const std::string& plan_fingerprint);

    // Keys recorded in the manifest, mapped to their question ids.
    std::map<std::string, std::string> manifest() const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

std::string pool_to_jsonl(const AnswerPool& pool);
AnswerPool pool_from_jsonl(const std::string& text);

}  // namespace zeus
