#include "zeus/remote_backend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <semaphore>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "zeus/error.hpp"
#include "zeus/hashing.hpp"

namespace zeus {

using nlohmann::json;

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("endpoint '" + endpoint + "' must start with http:// or https://");
    }
    const auto path_at = endpoint.find('/', scheme_end + 3);
    if (path_at == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_at), endpoint.substr(path_at)};
}

// Shared HTTP plumbing for both clients.
class HttpChannel {
public:
    explicit HttpChannel(const RemoteConfig& config)
        : config_(config), url_(split_url(config.endpoint)), slots_(static_cast<std::ptrdiff_t>(
                                                                  std::clamp<std::size_t>(config.max_concurrent, 1, 1024))) {
        if (!config.auth_token_env.empty()) {
            const char* token = std::getenv(config.auth_token_env.c_str());
            if (token == nullptr) {
                throw ValidationError("environment variable '" + config.auth_token_env + "' (auth token) is not set");
            }
            token_ = token;
        }
    }

    json post(const json& body, const std::string& fingerprint) {
        slots_.acquire();
        struct Release {
            std::counting_semaphore<1024>& s;
            ~Release() { s.release(); }
        } release{slots_};

        httplib::Client client(url_.origin);
        const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
        const auto secs = static_cast<time_t>(timeout.count());
        const auto usecs = static_cast<time_t>((timeout.count() - static_cast<double>(secs)) * 1e6);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        httplib::Headers headers;
        if (!token_.empty()) {
            const bool bearer = config_.auth_header == "Authorization";
            headers.emplace(config_.auth_header, bearer ? "Bearer " + token_ : token_);
        }
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= config_.retries; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(backoff_delay(config_, attempt - 1));
            }
            auto res = client.Post(url_.path, headers, payload, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                throw ProtocolError("backend returned HTTP " + std::to_string(res->status) + " for request " +
                                    fingerprint + ": " + res->body.substr(0, 200));
            }
            try {
                return json::parse(res->body);
            } catch (const json::parse_error&) {
                throw ProtocolError("backend reply for request " + fingerprint + " is not valid JSON");
            }
        }
        throw TransportError("giving up after " + std::to_string(config_.retries + 1) + " attempt(s): " + last_error,
                             fingerprint);
    }

private:
    RemoteConfig config_;
    Url url_;
    std::string token_;
    std::counting_semaphore<1024> slots_;
};

}  // namespace

std::chrono::milliseconds backoff_delay(const RemoteConfig& config, int attempt) {
    const double secs = std::min(config.backoff_max_seconds, config.backoff_initial_seconds * std::pow(2.0, attempt));
    return std::chrono::milliseconds(static_cast<long long>(std::max(0.0, secs) * 1000.0));
}

struct RemoteGenerator::Impl {
    explicit Impl(const RemoteConfig& c) : channel(c) {}
    HttpChannel channel;
};

RemoteGenerator::RemoteGenerator(RemoteConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {}

RemoteGenerator::~RemoteGenerator() = default;

std::vector<std::string> RemoteGenerator::generate(const GenerationRequest& request) {
    request.validate();
    json body = {
        {"model", config_.model},
        {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
        {"temperature", request.temperature},
        {"n", request.n_samples},
        {"max_tokens", request.max_tokens},
    };
    const std::string fp = request.fingerprint();
    const json reply = impl_->channel.post(body, fp);
    if (!reply.is_object() || !reply.contains("choices") || !reply["choices"].is_array()) {
        throw ProtocolError("backend reply for request " + fp + " has no 'choices' array");
    }
    const auto& choices = reply["choices"];
    if (choices.size() != static_cast<std::size_t>(request.n_samples)) {
        throw ProtocolError("backend returned " + std::to_string(choices.size()) + " choices for request " + fp +
                            ", expected " + std::to_string(request.n_samples));
    }
    std::vector<std::pair<std::size_t, std::string>> indexed;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        const auto& c = choices[i];
        const std::size_t idx = c.contains("index") && c["index"].is_number_unsigned() ? c["index"].get<std::size_t>() : i;
        if (c.contains("message") && c["message"].contains("content") && c["message"]["content"].is_string()) {
            indexed.emplace_back(idx, c["message"]["content"].get<std::string>());
        } else if (c.contains("text") && c["text"].is_string()) {
            indexed.emplace_back(idx, c["text"].get<std::string>());
        } else {
            throw ProtocolError("choice " + std::to_string(i) + " of request " + fp + " carries no text");
        }
    }
    std::stable_sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> out;
    out.reserve(indexed.size());
    for (auto& [_, text] : indexed) out.push_back(std::move(text));
    return out;
}

struct RemoteEmbedder::Impl {
    explicit Impl(const RemoteConfig& c) : channel(c) {}
    HttpChannel channel;
    std::mutex mu;
    std::size_t dim = 0;
};

RemoteEmbedder::RemoteEmbedder(RemoteConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>(config_)) {}

RemoteEmbedder::~RemoteEmbedder() = default;

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) {
    if (texts.empty()) {
        throw ValidationError("embed() needs at least one text");
    }
    json body = {{"model", config_.model}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
    std::string material;
    for (const auto& t : texts) material += t + '\x1f';
    const std::string fp = sha256_hex(material).substr(0, 16);
    const json reply = impl_->channel.post(body, fp);
    if (!reply.is_object() || !reply.contains("data") || !reply["data"].is_array() ||
        reply["data"].size() != texts.size()) {
        throw ProtocolError("embedding reply for request " + fp + " does not carry one vector per input");
    }
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<bool> seen(texts.size(), false);
    for (std::size_t i = 0; i < reply["data"].size(); ++i) {
        const auto& d = reply["data"][i];
        const std::size_t idx = d.contains("index") ? d["index"].get<std::size_t>() : i;
        if (idx >= texts.size() || seen[idx] || !d.contains("embedding") || !d["embedding"].is_array()) {
            throw ProtocolError("malformed embedding entry " + std::to_string(i) + " in request " + fp);
        }
        seen[idx] = true;
        for (const auto& x : d["embedding"]) {
            const double v = x.get<double>();
            if (!std::isfinite(v)) throw ProtocolError("non-finite embedding value in request " + fp);
            out[idx].values.push_back(v);
        }
    }
    std::lock_guard lock(impl_->mu);
    for (const auto& v : out) {
        if (impl_->dim == 0) impl_->dim = v.dim();
        if (v.dim() != impl_->dim || v.dim() == 0) {
            throw ProtocolError("embedding dimension changed within one provider (request " + fp + ")");
        }
    }
    return out;
}

}  // namespace zeus
