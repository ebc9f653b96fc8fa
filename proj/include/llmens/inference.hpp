#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "llmens/dataset.hpp"

namespace llmens {

struct GenerationParams {
    double temperature = 1.5;
    double top_p = 0.9;
    int max_new_tokens = 1;
    std::uint64_t seed = 1;
};

void validate(const GenerationParams& params);

enum class PredictionStatus { ok, parse_failure };

// One base model's parsed rating for one sample.
struct Prediction {
    std::string model_id;
    std::string sample_id;
    std::string raw_token;  // last raw output (trimmed only for parsing)
    std::optional<int> rating;
    PredictionStatus status = PredictionStatus::parse_failure;
    int attempts = 0;
};

// Offline test double. Emits the sample's true label with probability 1-p
// and a uniformly chosen different label with probability p, where
//   p = clamp(noise_floor + temperature_gain * temperature, 0, 0.95).
// Draws come from a splitmix64-v1 stream keyed by
//   mix64(mix64(seed, fnv1a64(sample_id)), attempt)
// so the full prediction matrix is a pure function of its inputs.
struct MockModelSpec {
    double noise_floor = 0.0;
    double temperature_gain = 0.0;

    double error_rate(double temperature) const;
};

// What a backend sees for one generation attempt. `params.seed` already
// includes the retry offset (base seed + 1000 * attempt).
struct GenRequest {
    std::string prompt;
    GenerationParams params;
    int attempt = 0;
    std::string model_id;
    std::string sample_id;
    int sample_label = 0;  // ground truth for the mock backend; 0 when unknown
};

class Backend {
  public:
    virtual ~Backend() = default;
    // Raw text of the generated completion. Throws Error(Transport) on
    // unrecoverable transport/HTTP failure. Must be safe to call
    // concurrently.
    virtual std::string complete(const GenRequest& req) = 0;
    virtual std::string name() const = 0;
};

class MockBackend final : public Backend {
  public:
    explicit MockBackend(MockModelSpec spec) : spec_(spec) {}
    std::string complete(const GenRequest& req) override;
    std::string name() const override { return "mock"; }
    const MockModelSpec& spec() const { return spec_; }

  private:
    MockModelSpec spec_;
};

enum class WireMode { completion, chat };

struct RemoteSpec {
    std::string endpoint;  // path defaults to /v1/completions or /v1/chat/completions
    std::string model_name;
    WireMode mode = WireMode::completion;
    int retries = 3;
    int backoff_base_ms = 250;
    std::string api_key_env = "LLMENS_API_KEY";
};

// OpenAI-compatible completion client:
//   completion: POST {model, prompt, temperature, top_p, max_tokens, seed}
//               -> choices[0].text
//   chat:       POST {model, messages: [{role: "user", content: prompt}], ...}
//               -> choices[0].message.content
class HttpBackend final : public Backend {
  public:
    explicit HttpBackend(RemoteSpec spec);
    std::string complete(const GenRequest& req) override;
    std::string name() const override { return "remote"; }

  private:
    RemoteSpec spec_;
};

// Requests max_new_tokens token(s) and parses the trimmed output: a single
// character in '1'..'5' is the rating; anything else retries with seed
// offset 1000 * attempt, up to 3 attempts, then reports parse_failure with
// the last raw output preserved. Transport failures propagate as errors.
Prediction generate_rating(const std::string& prompt, const GenerationParams& params,
                           Backend& backend, const std::string& model_id,
                           const std::string& sample_id, int sample_label = 0);

struct BatchError {
    std::string sample_id;
    std::string message;
};

struct BatchResult {
    std::vector<Prediction> predictions;  // input order; transport failures absent
    std::vector<BatchError> errors;       // input order
};

struct RunBatchOptions {
    std::string model_id = "M1";
    std::string checkpoint_path;  // empty disables checkpointing
    int max_in_flight = 4;
    int consecutive_failure_limit = 10;
};

using PromptFn = std::function<std::string(const Sample&)>;

// One prediction per sample, output order = input order regardless of
// completion order. Progress is checkpointed (JSONL of Prediction records,
// write-temp-then-rename) after every completion, and samples already in
// the checkpoint are not re-queried. Aborts with a transport error once
// consecutive_failure_limit transport failures occur in a row.
BatchResult run_batch(const std::vector<Sample>& samples, const PromptFn& prompt_fn,
                      const GenerationParams& params, Backend& backend,
                      const RunBatchOptions& options);

}  // namespace llmens
