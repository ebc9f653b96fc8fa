#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmens/dataset.hpp"
#include "llmens/embedding.hpp"
#include "llmens/inference.hpp"
#include "llmens/selection.hpp"

namespace llmens {

enum class Shots { one_shot_ensemble, k_shot_single };
enum class BackendKind { mock, remote };

struct BackendSpec {
    BackendKind kind = BackendKind::mock;
    std::string endpoint;
    std::string model_name;
    WireMode mode = WireMode::completion;
    std::string api_key_env = "LLMENS_API_KEY";
    double mock_noise_floor = 0.0;
    double mock_temp_gain = 0.0;
    int max_in_flight = 4;
    int consecutive_failure_limit = 10;
};

// One experiment, one JSON document. CLI flags override individual keys.
struct ExperimentConfig {
    std::string corpus_path;
    std::optional<std::string> filter_category;
    SplitSpec split{18000, 1000, 1};
    EmbedderSpec embedder;
    Strategy strategy = Strategy::CRE;
    int k = 5;
    std::uint64_t selection_seed = 1;
    std::optional<std::size_t> selection_subsample;  // CRE clustering subsample
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    GenerationParams gen;  // seed field unused; per-model seeds come from `seeds`
    BackendSpec backend;
    Shots shots = Shots::one_shot_ensemble;
    std::string template_file;  // empty = built-in template
    std::string out_dir;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);

// Validation errors surface before any stage runs.
void validate(const ExperimentConfig& cfg);

// FNV-1a 64 over the canonical JSON form, excluding the output location;
// 16 hex chars. Identical experiments hash identically wherever they run.
std::string config_hash(const ExperimentConfig& cfg);

const char* shots_name(Shots s);
Shots shots_from_name(const std::string& name);
const char* backend_kind_name(BackendKind k);
BackendKind backend_kind_from_name(const std::string& name);
const char* wire_mode_name(WireMode m);
WireMode wire_mode_from_name(const std::string& name);

}  // namespace llmens
