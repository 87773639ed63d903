#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "zeus/providers.hpp"

namespace zeus {

struct RemoteConfig {
    std::string endpoint;  // full URL, e.g. http://localhost:8000/v1/chat/completions
    std::string model;
    std::string auth_token_env;  // name of the env var holding the token; empty = no auth
    std::string auth_header = "Authorization";
    std::size_t max_concurrent = 4;
    int retries = 3;
    double timeout_seconds = 60.0;
    double backoff_initial_seconds = 0.5;
    double backoff_max_seconds = 8.0;
};

// Delay before retry number `attempt` (0-based): initial * 2^attempt, capped.
std::chrono::milliseconds backoff_delay(const RemoteConfig& config, int attempt);

// Chat-completion client. Sends
//   {"model", "messages": [{"role": "user", "content": prompt}], "temperature", "n", "max_tokens"}
// and reads choices[i].message.content (or choices[i].text).
// Transport failures, HTTP 429 and 5xx are retried with capped exponential
// backoff; other statuses and malformed bodies raise ProtocolError.
class RemoteGenerator final : public TextGenerator {
public:
    explicit RemoteGenerator(RemoteConfig config);
    ~RemoteGenerator() override;

    std::vector<std::string> generate(const GenerationRequest& request) override;
    std::string model_id() const override { return config_.model; }
    std::size_t max_concurrency() const override { return config_.max_concurrent; }

private:
    struct Impl;
    RemoteConfig config_;
    std::unique_ptr<Impl> impl_;
};

// Embedding client: sends {"model", "input": [texts]} and reads
// data[i].embedding ordered by data[i].index.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteConfig config);
    ~RemoteEmbedder() override;

    std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
    std::string id() const override { return "remote:" + config_.model; }

private:
    struct Impl;
    RemoteConfig config_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace zeus
