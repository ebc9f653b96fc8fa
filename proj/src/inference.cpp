#include "llmens/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "http_util.hpp"
#include "llmens/error.hpp"
#include "llmens/io.hpp"
#include "llmens/rng.hpp"
#include "llmens/serialization.hpp"

namespace llmens {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(begin, end - begin + 1);
}

std::optional<int> parse_rating(const std::string& raw) {
    const std::string t = trimmed(raw);
    if (t.size() == 1 && t[0] >= '1' && t[0] <= '5') return t[0] - '0';
    return std::nullopt;
}

constexpr int kMaxAttempts = 3;
constexpr std::uint64_t kRetrySeedOffset = 1000;

}  // namespace

void validate(const GenerationParams& params) {
    if (params.temperature < 0.0) throw validation_error("temperature must be non-negative");
    if (params.top_p <= 0.0 || params.top_p > 1.0) {
        throw validation_error("top_p must be in (0, 1]");
    }
    if (params.max_new_tokens <= 0) throw validation_error("max_new_tokens must be positive");
}

double MockModelSpec::error_rate(double temperature) const {
    return std::clamp(noise_floor + temperature_gain * temperature, 0.0, 0.95);
}

std::string MockBackend::complete(const GenRequest& req) {
    if (req.sample_label < 1 || req.sample_label > 5) {
        throw validation_error("mock backend needs a labeled sample (got label " +
                               std::to_string(req.sample_label) + ")");
    }
    SplitMix64 stream(mix64(mix64(req.params.seed, fnv1a64(req.sample_id)),
                            static_cast<std::uint64_t>(req.attempt)));
    const double p = spec_.error_rate(req.params.temperature);
    int rating = req.sample_label;
    if (stream.u01() < p) {
        int others[4];
        int idx = 0;
        for (int label = 1; label <= 5; ++label) {
            if (label != req.sample_label) others[idx++] = label;
        }
        rating = others[stream.bounded(4)];
    }
    return std::to_string(rating);
}

HttpBackend::HttpBackend(RemoteSpec spec) : spec_(std::move(spec)) {
    if (spec_.endpoint.empty()) throw validation_error("remote backend requires an endpoint");
}

namespace {

// One persistent client per (thread, base URL): connection reuse without
// sharing a non-thread-safe client across workers.
httplib::Client& client_for(const std::string& base) {
    thread_local std::map<std::string, std::unique_ptr<httplib::Client>> clients;
    auto& slot = clients[base];
    if (!slot) {
        slot = std::make_unique<httplib::Client>(base);
        slot->set_keep_alive(true);
        slot->set_read_timeout(300, 0);
        slot->set_connection_timeout(10, 0);
    }
    return *slot;
}

}  // namespace

std::string HttpBackend::complete(const GenRequest& req) {
    const char* default_path =
        spec_.mode == WireMode::chat ? "/v1/chat/completions" : "/v1/completions";
    const auto url = detail::parse_url(spec_.endpoint, default_path);

    json body;
    if (!spec_.model_name.empty()) body["model"] = spec_.model_name;
    if (spec_.mode == WireMode::chat) {
        body["messages"] = json::array({json{{"role", "user"}, {"content", req.prompt}}});
    } else {
        body["prompt"] = req.prompt;
    }
    body["temperature"] = req.params.temperature;
    body["top_p"] = req.params.top_p;
    body["max_tokens"] = req.params.max_new_tokens;
    body["seed"] = req.params.seed;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < spec_.retries; ++attempt) {
        if (attempt > 0) detail::backoff_sleep(attempt - 1, spec_.backoff_base_ms);

        httplib::Client& client = client_for(url.base);
        httplib::Headers headers;
        if (const char* key = std::getenv(spec_.api_key_env.c_str()); key && *key) {
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
        if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty()) {
            last_error = "unparseable completion response: " + res->body.substr(0, 200);
            continue;
        }
        const json& choice = reply["choices"][0];
        if (spec_.mode == WireMode::chat) {
            if (choice.contains("message") && choice["message"].contains("content")) {
                return choice["message"]["content"].get<std::string>();
            }
        } else if (choice.contains("text")) {
            return choice["text"].get<std::string>();
        }
        last_error = "completion choice missing text: " + res->body.substr(0, 200);
    }
    throw transport_error("completion endpoint failed after " + std::to_string(spec_.retries) +
                          " attempts: " + last_error);
}

Prediction generate_rating(const std::string& prompt, const GenerationParams& params,
                           Backend& backend, const std::string& model_id,
                           const std::string& sample_id, int sample_label) {
    if (prompt.empty()) throw validation_error("generate_rating: empty prompt");
    validate(params);

    Prediction pred;
    pred.model_id = model_id;
    pred.sample_id = sample_id;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        GenRequest req;
        req.prompt = prompt;
        req.params = params;
        req.params.seed = params.seed + kRetrySeedOffset * static_cast<std::uint64_t>(attempt);
        req.attempt = attempt;
        req.model_id = model_id;
        req.sample_id = sample_id;
        req.sample_label = sample_label;

        pred.raw_token = backend.complete(req);
        pred.attempts = attempt + 1;
        if (const auto rating = parse_rating(pred.raw_token)) {
            pred.rating = rating;
            pred.status = PredictionStatus::ok;
            return pred;
        }
    }
    pred.status = PredictionStatus::parse_failure;
    pred.rating.reset();
    return pred;
}

BatchResult run_batch(const std::vector<Sample>& samples, const PromptFn& prompt_fn,
                      const GenerationParams& params, Backend& backend,
                      const RunBatchOptions& options) {
    validate(params);
    if (options.max_in_flight <= 0) throw validation_error("max_in_flight must be positive");

    const std::size_t n = samples.size();
    std::vector<std::optional<Prediction>> slots(n);
    std::vector<std::optional<BatchError>> error_slots(n);

    // Resume: anything already checkpointed for this model is not re-queried.
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < n; ++i) index_of[samples[i].id] = i;
    if (!options.checkpoint_path.empty() &&
        std::filesystem::exists(options.checkpoint_path)) {
        for (const std::string& line : read_lines(options.checkpoint_path)) {
            json row = json::parse(line, nullptr, false);
            if (row.is_discarded()) {
                throw data_error("corrupt checkpoint line in " + options.checkpoint_path);
            }
            Prediction p = row.get<Prediction>();
            if (p.model_id != options.model_id) continue;
            const auto it = index_of.find(p.sample_id);
            if (it != index_of.end()) slots[it->second] = std::move(p);
        }
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < n; ++i) {
        if (!slots[i]) pending.push_back(i);
    }

    std::mutex mu;
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> abort{false};
    int consecutive_failures = 0;
    std::string abort_reason;

    // Serialized once per prediction; each flush is a concatenation, so the
    // checkpoint file is always the completed predictions in input order.
    std::vector<std::string> serialized(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) serialized[i] = json(*slots[i]).dump() + "\n";
    }
    auto flush_checkpoint = [&]() {
        if (options.checkpoint_path.empty()) return;
        std::string content;
        std::size_t bytes = 0;
        for (const auto& line : serialized) bytes += line.size();
        content.reserve(bytes);
        for (const auto& line : serialized) content += line;
        atomic_write_file(options.checkpoint_path, content);
    };

    auto worker = [&]() {
        for (;;) {
            const std::size_t at = cursor.fetch_add(1);
            if (at >= pending.size() || abort.load()) return;
            const std::size_t idx = pending[at];
            const Sample& sample = samples[idx];

            std::optional<Prediction> pred;
            std::optional<BatchError> err;
            try {
                pred = generate_rating(prompt_fn(sample), params, backend, options.model_id,
                                       sample.id, sample.label);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Transport) throw;
                err = BatchError{sample.id, e.what()};
            }

            std::lock_guard lock(mu);
            if (pred) {
                slots[idx] = std::move(pred);
                if (!options.checkpoint_path.empty()) {
                    serialized[idx] = json(*slots[idx]).dump() + "\n";
                }
                consecutive_failures = 0;
                flush_checkpoint();
            } else {
                error_slots[idx] = std::move(err);
                if (++consecutive_failures >= options.consecutive_failure_limit) {
                    abort_reason = "aborting after " + std::to_string(consecutive_failures) +
                                   " consecutive transport failures (last: " +
                                   error_slots[idx]->message + ")";
                    abort.store(true);
                    return;
                }
            }
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(options.max_in_flight),
                              std::max<std::size_t>(pending.size(), 1));
    std::vector<std::thread> threads;
    std::exception_ptr worker_error;
    threads.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        threads.emplace_back([&]() {
            try {
                worker();
            } catch (...) {
                std::lock_guard lock(mu);
                if (!worker_error) worker_error = std::current_exception();
                abort.store(true);
            }
        });
    }
    for (auto& t : threads) t.join();
    if (worker_error) std::rethrow_exception(worker_error);
    if (abort.load() && !abort_reason.empty()) throw transport_error(abort_reason);

    BatchResult result;
    result.predictions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (slots[i]) result.predictions.push_back(std::move(*slots[i]));
        if (error_slots[i]) result.errors.push_back(std::move(*error_slots[i]));
    }
    return result;
}

}  // namespace llmens
