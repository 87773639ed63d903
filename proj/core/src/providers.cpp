#include "zeus/providers.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "zeus/answer.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"
#include "io_util.hpp"

namespace zeus {

void GenerationRequest::validate() const {
    if (n_samples < 1) {
        throw ValidationError("generation request needs n_samples >= 1");
    }
    if (max_tokens < 1) {
        throw ValidationError("generation request needs max_tokens >= 1");
    }
}

std::string GenerationRequest::fingerprint() const {
    std::string material = prompt;
    material += '\x1f' + detail::format_double(temperature);
    material += '\x1f' + std::to_string(n_samples);
    material += '\x1f' + std::to_string(max_tokens);
    if (seed) material += '\x1f' + std::to_string(*seed);
    return sha256_hex(material).substr(0, 16);
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim_ == 0) {
        throw ValidationError("embedding dimension must be positive");
    }
}

EmbeddingVector HashingEmbedder::embed_one(std::string_view text) const {
    if (text.empty()) {
        throw ValidationError("cannot embed empty text");
    }
    const std::string padded = " " + to_lower(text) + " ";
    std::vector<double> v(dim_, 0.0);
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        const std::uint64_t h = fnv1a64(std::string_view(padded).substr(i, 3));
        v[h % dim_] += 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return {std::move(v)};
}

std::vector<EmbeddingVector> HashingEmbedder::embed(std::span<const std::string> texts) {
    if (texts.empty()) {
        throw ValidationError("embed() needs at least one text");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

std::string HashingEmbedder::id() const { return "hashing-trigram-" + std::to_string(dim_); }

std::vector<std::string> CountingGenerator::generate(const GenerationRequest& request) {
    calls_.fetch_add(1);
    samples_.fetch_add(static_cast<std::size_t>(request.n_samples));
    return inner_->generate(request);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("cosine_similarity: dimension mismatch");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void parallel_for(std::size_t n, std::size_t max_workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::vector<std::exception_ptr> errors(n);
    const std::size_t workers = std::max<std::size_t>(1, std::min(n, max_workers));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace zeus
