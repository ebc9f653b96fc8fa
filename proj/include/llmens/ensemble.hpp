#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llmens/dataset.hpp"
#include "llmens/inference.hpp"
#include "llmens/prompting.hpp"
#include "llmens/selection.hpp"

namespace llmens {

// N base models over one underlying backend: model M_i is the pairing of
// example i with seed i. Generation parameters are shared; only the seed
// varies per model.
struct EnsembleConfig {
    int n_models = 5;
    ExampleSet example_set;
    std::vector<std::uint64_t> seeds;  // aligned with example_set.examples
    GenerationParams params;           // params.seed is overridden per model
    PromptTemplate prompt_template;
};

void validate(const EnsembleConfig& config);

// Per-sample bundle of the N base predictions.
struct EnsembleRecord {
    std::string sample_id;
    std::map<std::string, Prediction> per_model;  // model id -> prediction
    std::optional<int> median_rating;             // present iff n_valid >= 1
    int n_unique = 0;                             // distinct ok ratings
    int n_valid = 0;                              // ok predictions
};

struct EnsembleRunOptions {
    std::string checkpoint_dir;  // empty disables; else <dir>/predictions_M<i>.jsonl
    int max_in_flight = 4;
    int consecutive_failure_limit = 10;
};

struct EnsembleRunResult {
    std::vector<EnsembleRecord> records;    // input order, one per test sample
    std::vector<BatchResult> model_batches; // M1..MN
};

EnsembleRunResult run_ensemble(const EnsembleConfig& config, const std::vector<Sample>& test,
                               Backend& backend, const EnsembleRunOptions& options = {});

// Median of ordinal ratings: sort ascending; odd count takes the middle,
// even count takes the mean of the two middles rounded half-up.
int median_aggregate(std::vector<int> ratings);

// Number of distinct ok ratings; errors when no valid prediction exists.
int consistency(const EnsembleRecord& record);

// Assembles a record (median, n_unique, n_valid) from per-model predictions.
EnsembleRecord make_record(const std::string& sample_id, const std::vector<Prediction>& preds);

std::string model_id_for(int index);  // 0 -> "M1"

}  // namespace llmens
