#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zeus {

struct GenerationRequest {
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 512;
    int n_samples = 1;
    std::optional<std::uint64_t> seed;  // honored by the mock backend only

    // Throws ValidationError when n_samples or max_tokens is below 1.
    void validate() const;
    // Short stable digest used in error messages and logs.
    std::string fingerprint() const;
};

// A text-generation backend. Implementations must be safe to call from
// several threads at once and return exactly n_samples completions, in
// issuance order.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual std::vector<std::string> generate(const GenerationRequest& request) = 0;
    virtual std::string model_id() const = 0;
    // Upper bound on useful concurrent calls.
    virtual std::size_t max_concurrency() const { return 1; }
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    // One vector per input text, all of the same dimension.
    virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
    virtual std::string id() const = 0;
};

// Offline embedder: byte trigrams of " " + lowercase(text) + " " are hashed
// with FNV-1a (64-bit) into `dim` buckets (bucket = hash % dim), counted, and
// the count vector is L2-normalized. Deterministic across platforms.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256);

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    EmbeddingVector embed_one(std::string_view text) const;
    std::string id() const override;

private:
    std::size_t dim_;
};

// Pass-through that counts calls reaching the wrapped backend.
class CountingGenerator final : public TextGenerator {
public:
    explicit CountingGenerator(std::shared_ptr<TextGenerator> inner) : inner_(std::move(inner)) {}

    std::vector<std::string> generate(const GenerationRequest& request) override;
    std::string model_id() const override { return inner_->model_id(); }
    std::size_t max_concurrency() const override { return inner_->max_concurrency(); }

    std::size_t calls() const noexcept { return calls_.load(); }
    std::size_t samples() const noexcept { return samples_.load(); }

private:
    std::shared_ptr<TextGenerator> inner_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> samples_{0};
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Runs fn(0..n-1) on at most `max_workers` threads. All indices run even if
// some throw; the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t max_workers, const std::function<void(std::size_t)>& fn);

}  // namespace zeus
