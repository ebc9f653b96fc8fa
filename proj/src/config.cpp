#include "llmens/config.hpp"

#include <filesystem>

#include "llmens/error.hpp"
#include "llmens/io.hpp"
#include "llmens/rng.hpp"

namespace llmens {

using nlohmann::json;

const char* shots_name(Shots s) {
    return s == Shots::one_shot_ensemble ? "one-shot-ensemble" : "k-shot-single";
}

Shots shots_from_name(const std::string& name) {
    if (name == "one-shot-ensemble" || name == "1") return Shots::one_shot_ensemble;
    if (name == "k-shot-single") return Shots::k_shot_single;
    throw validation_error("unknown shots mode '" + name + "'");
}

const char* backend_kind_name(BackendKind k) { return k == BackendKind::mock ? "mock" : "remote"; }

BackendKind backend_kind_from_name(const std::string& name) {
    if (name == "mock") return BackendKind::mock;
    if (name == "remote") return BackendKind::remote;
    throw validation_error("unknown backend '" + name + "' (expected mock or remote)");
}

const char* wire_mode_name(WireMode m) { return m == WireMode::completion ? "completion" : "chat"; }

WireMode wire_mode_from_name(const std::string& name) {
    if (name == "completion") return WireMode::completion;
    if (name == "chat") return WireMode::chat;
    throw validation_error("unknown wire mode '" + name + "' (expected completion or chat)");
}

namespace {

const char* embedder_kind_name(EmbedderKind k) {
    return k == EmbedderKind::remote ? "remote" : "deterministic-test";
}

EmbedderKind embedder_kind_from_name(const std::string& name) {
    if (name == "remote") return EmbedderKind::remote;
    if (name == "deterministic-test") return EmbedderKind::deterministic_test;
    throw validation_error("unknown embedder kind '" + name + "'");
}

}  // namespace

void to_json(json& j, const ExperimentConfig& cfg) {
    j = json{
        {"corpus", cfg.corpus_path},
        {"filter_category", cfg.filter_category ? json(*cfg.filter_category) : json(nullptr)},
        {"pool_size", cfg.split.pool_size},
        {"test_size", cfg.split.test_size},
        {"split_seed", cfg.split.seed},
        {"embedder",
         json{{"kind", embedder_kind_name(cfg.embedder.kind)},
              {"endpoint", cfg.embedder.endpoint},
              {"model", cfg.embedder.model_name},
              {"dim", cfg.embedder.dim},
              {"normalize", cfg.embedder.normalize},
              {"batch_size", cfg.embedder.batch_size}}},
        {"strategy", strategy_name(cfg.strategy)},
        {"k", cfg.k},
        {"selection_seed", cfg.selection_seed},
        {"selection_subsample",
         cfg.selection_subsample ? json(*cfg.selection_subsample) : json(nullptr)},
        {"seeds", cfg.seeds},
        {"temperature", cfg.gen.temperature},
        {"top_p", cfg.gen.top_p},
        {"max_new_tokens", cfg.gen.max_new_tokens},
        {"backend",
         json{{"kind", backend_kind_name(cfg.backend.kind)},
              {"endpoint", cfg.backend.endpoint},
              {"model", cfg.backend.model_name},
              {"wire", wire_mode_name(cfg.backend.mode)},
              {"mock_noise_floor", cfg.backend.mock_noise_floor},
              {"mock_temp_gain", cfg.backend.mock_temp_gain},
              {"max_in_flight", cfg.backend.max_in_flight},
              {"consecutive_failure_limit", cfg.backend.consecutive_failure_limit}}},
        {"shots", shots_name(cfg.shots)},
        {"template_file", cfg.template_file},
        {"out_dir", cfg.out_dir},
    };
}

void from_json(const json& j, ExperimentConfig& cfg) {
    cfg = ExperimentConfig{};
    if (j.contains("corpus")) cfg.corpus_path = j.at("corpus").get<std::string>();
    if (j.contains("filter_category") && !j.at("filter_category").is_null()) {
        cfg.filter_category = j.at("filter_category").get<std::string>();
    }
    if (j.contains("pool_size")) cfg.split.pool_size = j.at("pool_size").get<std::size_t>();
    if (j.contains("test_size")) cfg.split.test_size = j.at("test_size").get<std::size_t>();
    if (j.contains("split_seed")) cfg.split.seed = j.at("split_seed").get<std::uint64_t>();
    if (j.contains("embedder")) {
        const json& e = j.at("embedder");
        if (e.contains("kind")) cfg.embedder.kind = embedder_kind_from_name(e.at("kind").get<std::string>());
        if (e.contains("endpoint")) cfg.embedder.endpoint = e.at("endpoint").get<std::string>();
        if (e.contains("model")) cfg.embedder.model_name = e.at("model").get<std::string>();
        if (e.contains("dim")) cfg.embedder.dim = e.at("dim").get<int>();
        if (e.contains("normalize")) cfg.embedder.normalize = e.at("normalize").get<bool>();
        if (e.contains("batch_size")) cfg.embedder.batch_size = e.at("batch_size").get<int>();
    }
    if (j.contains("strategy")) cfg.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("selection_seed")) cfg.selection_seed = j.at("selection_seed").get<std::uint64_t>();
    if (j.contains("selection_subsample") && !j.at("selection_subsample").is_null()) {
        cfg.selection_subsample = j.at("selection_subsample").get<std::size_t>();
    }
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("temperature")) cfg.gen.temperature = j.at("temperature").get<double>();
    if (j.contains("top_p")) cfg.gen.top_p = j.at("top_p").get<double>();
    if (j.contains("max_new_tokens")) cfg.gen.max_new_tokens = j.at("max_new_tokens").get<int>();
    if (j.contains("backend")) {
        const json& b = j.at("backend");
        if (b.contains("kind")) cfg.backend.kind = backend_kind_from_name(b.at("kind").get<std::string>());
        if (b.contains("endpoint")) cfg.backend.endpoint = b.at("endpoint").get<std::string>();
        if (b.contains("model")) cfg.backend.model_name = b.at("model").get<std::string>();
        if (b.contains("wire")) cfg.backend.mode = wire_mode_from_name(b.at("wire").get<std::string>());
        if (b.contains("mock_noise_floor")) cfg.backend.mock_noise_floor = b.at("mock_noise_floor").get<double>();
        if (b.contains("mock_temp_gain")) cfg.backend.mock_temp_gain = b.at("mock_temp_gain").get<double>();
        if (b.contains("max_in_flight")) cfg.backend.max_in_flight = b.at("max_in_flight").get<int>();
        if (b.contains("consecutive_failure_limit")) {
            cfg.backend.consecutive_failure_limit = b.at("consecutive_failure_limit").get<int>();
        }
    }
    if (j.contains("shots")) cfg.shots = shots_from_name(j.at("shots").get<std::string>());
    if (j.contains("template_file") && !j.at("template_file").is_null()) {
        cfg.template_file = j.at("template_file").get<std::string>();
    }
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
}

ExperimentConfig load_config(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw validation_error("config is not a JSON object: " + path);
    return j.get<ExperimentConfig>();
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.corpus_path.empty()) throw validation_error("config: corpus path required");
    if (!std::filesystem::exists(cfg.corpus_path)) {
        throw validation_error("config: corpus file does not exist: " + cfg.corpus_path);
    }
    if (!cfg.template_file.empty() && !std::filesystem::exists(cfg.template_file)) {
        throw validation_error("config: template file does not exist: " + cfg.template_file);
    }
    if (cfg.split.pool_size == 0 || cfg.split.test_size == 0) {
        throw validation_error("config: pool_size and test_size must be positive");
    }
    if (cfg.k <= 0) throw validation_error("config: k must be positive");
    if (cfg.seeds.size() != static_cast<std::size_t>(cfg.k)) {
        throw validation_error("config: seeds count (" + std::to_string(cfg.seeds.size()) +
                               ") must equal k (" + std::to_string(cfg.k) + ")");
    }
    if (cfg.selection_subsample && *cfg.selection_subsample < static_cast<std::size_t>(cfg.k)) {
        throw validation_error("config: selection_subsample smaller than k");
    }
    validate(cfg.gen);
    validate(cfg.embedder);
    if (cfg.backend.kind == BackendKind::remote && cfg.backend.endpoint.empty()) {
        throw validation_error("config: remote backend requires an endpoint");
    }
    if (cfg.backend.max_in_flight <= 0) {
        throw validation_error("config: max_in_flight must be positive");
    }
    if (cfg.backend.mock_noise_floor < 0.0 || cfg.backend.mock_noise_floor > 1.0) {
        throw validation_error("config: mock_noise_floor must be in [0, 1]");
    }
    if (cfg.backend.mock_temp_gain < 0.0) {
        throw validation_error("config: mock_temp_gain must be non-negative");
    }
    if (cfg.out_dir.empty()) throw validation_error("config: out_dir required");
}

std::string config_hash(const ExperimentConfig& cfg) {
    json j = cfg;
    j.erase("out_dir");
    const std::uint64_t h = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace llmens
