#include "llmens/embedding.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "llmens/error.hpp"
#include "llmens/rng.hpp"
#include "llmens/simd/kernels.hpp"

namespace llmens {

namespace {

using nlohmann::json;

// One limiter per configured limit; concurrent embed_batch callers with the
// same spec share an in-flight budget.
detail::RequestLimiter& embed_limiter(int limit) {
    if (limit <= 0) limit = 4;
    static std::mutex mu;
    static std::map<int, std::unique_ptr<detail::RequestLimiter>> limiters;
    std::lock_guard lock(mu);
    auto& slot = limiters[limit];
    if (!slot) slot = std::make_unique<detail::RequestLimiter>(limit);
    return *slot;
}

EmbeddingVector deterministic_vector(const std::string& text, int dim) {
    SplitMix64 stream(fnv1a64(text));
    EmbeddingVector v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = static_cast<float>(2.0 * stream.u01() - 1.0);
    return v;
}


std::vector<EmbeddingVector> embed_remote_batch(const std::vector<std::string>& texts,
                                                const EmbedderSpec& spec) {
    const auto url = detail::parse_url(spec.endpoint, "/v1/embeddings");

    json body;
    if (!spec.model_name.empty()) body["model"] = spec.model_name;
    body["input"] = texts;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < spec.retries; ++attempt) {
        if (attempt > 0) detail::backoff_sleep(attempt - 1, spec.backoff_base_ms);

        httplib::Client client(url.base);
        client.set_read_timeout(120, 0);
        client.set_connection_timeout(10, 0);
        httplib::Headers headers;
        if (const char* key = std::getenv(spec.api_key_env.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
            continue;
        }

        json reply = json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array()) {
            last_error = "unparseable embedding response: " + res->body.substr(0, 200);
            continue;
        }
        std::vector<EmbeddingVector> out(texts.size());
        std::vector<bool> filled(texts.size(), false);
        for (const auto& item : reply["data"]) {
            if (!item.contains("index") || !item.contains("embedding")) {
                throw transport_error("embedding response item missing index/embedding");
            }
            const std::size_t idx = item["index"].get<std::size_t>();
            if (idx >= out.size()) throw transport_error("embedding response index out of range");
            out[idx] = item["embedding"].get<EmbeddingVector>();
            filled[idx] = true;
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!filled[i]) throw transport_error("embedding response missing index " + std::to_string(i));
            if (static_cast<int>(out[i].size()) != spec.dim) {
                throw transport_error("embedding dim mismatch: expected " +
                                      std::to_string(spec.dim) + ", got " +
                                      std::to_string(out[i].size()));
            }
        }
        return out;
    }
    throw transport_error("embedding endpoint failed after " + std::to_string(spec.retries) +
                          " attempts: " + last_error);
}

}  // namespace

EmbeddingVector normalized(EmbeddingVector v) {
    const double norm = std::sqrt(static_cast<double>(simd::dot(v, v)));
    if (norm > 0.0) simd::scale_inplace(v, static_cast<float>(1.0 / norm));
    return v;
}

void validate(const EmbedderSpec& spec) {
    if (spec.dim <= 0) throw validation_error("embedder dim must be positive");
    if (spec.kind == EmbedderKind::remote && spec.endpoint.empty()) {
        throw validation_error("remote embedder requires an endpoint");
    }
    if (spec.batch_size <= 0) throw validation_error("embedder batch_size must be positive");
}

EmbeddingVector mean_pool(const std::vector<EmbeddingVector>& token_vectors) {
    if (token_vectors.empty()) throw validation_error("mean_pool: empty input");
    const std::size_t dim = token_vectors.front().size();
    for (const auto& v : token_vectors) {
        if (v.size() != dim) throw validation_error("mean_pool: ragged dimensions");
    }
    EmbeddingVector acc(dim, 0.0f);
    for (const auto& v : token_vectors) simd::add_inplace(acc, v);
    simd::scale_inplace(acc, 1.0f / static_cast<float>(token_vectors.size()));
    return acc;
}

std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderSpec& spec) {
    validate(spec);
    if (texts.empty()) throw validation_error("embed_batch: empty text list");

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());

    if (spec.kind == EmbedderKind::deterministic_test) {
        for (const auto& t : texts) out.push_back(deterministic_vector(t, spec.dim));
    } else {
        const std::size_t bs = static_cast<std::size_t>(spec.batch_size);
        for (std::size_t start = 0; start < texts.size(); start += bs) {
            const std::size_t end = std::min(start + bs, texts.size());
            std::vector<std::string> chunk(texts.begin() + start, texts.begin() + end);
            detail::RequestGuard guard(embed_limiter(spec.max_in_flight));
            auto vecs = embed_remote_batch(chunk, spec);
            for (auto& v : vecs) out.push_back(std::move(v));
        }
    }

    if (spec.normalize) {
        for (auto& v : out) v = normalized(std::move(v));
    }
    return out;
}

}  // namespace llmens
