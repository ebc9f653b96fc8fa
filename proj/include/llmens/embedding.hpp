#pragma once

#include <string>
#include <vector>

namespace llmens {

// Fixed-length sentence embedding. Length is the dimension.
using EmbeddingVector = std::vector<float>;

enum class EmbedderKind { remote, deterministic_test };

struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::deterministic_test;
    std::string endpoint;    // required for remote; path defaults to /v1/embeddings
    std::string model_name;  // sent as "model" on the wire
    int dim = 384;
    bool normalize = false;  // unit Euclidean norm (zero vectors left unscaled)
    int batch_size = 64;
    int max_in_flight = 4;
    int retries = 3;
    int backoff_base_ms = 250;
    std::string api_key_env = "LLMENS_API_KEY";
};

// Component-wise arithmetic mean of token vectors. All vectors must share
// the same dimension; singleton input is the identity.
EmbeddingVector mean_pool(const std::vector<EmbeddingVector>& token_vectors);

// One embedding per text, order preserved.
//
// remote: POST {model, input: [texts...]} to the endpoint, OpenAI-style
// {data: [{index, embedding}...]} response, batched sequentially with
// per-batch retry (exponential backoff); API key read from spec.api_key_env.
//
// deterministic_test: each vector is generated from a splitmix64-v1 stream
// keyed by fnv1a64(text), values uniform in [-1, 1). Identical text gives
// an identical vector on every platform; no network involved.
std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts,
                                         const EmbedderSpec& spec);

// Unit Euclidean norm; zero vectors come back unchanged.
EmbeddingVector normalized(EmbeddingVector v);

void validate(const EmbedderSpec& spec);

}  // namespace llmens
