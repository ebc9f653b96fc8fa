#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmens/config.hpp"
#include "llmens/ensemble.hpp"
#include "llmens/metrics.hpp"

namespace llmens {

// Full experiment: ingest -> split -> embed -> select -> run -> evaluate ->
// consistency, all artifacts under cfg.out_dir. Stage failures carry the
// stage name; re-running with an identical config resumes from per-model
// prediction checkpoints. A run directory holds:
//   manifest.json        config + config_hash + test-set id hash
//   pool.jsonl test.jsonl stats.json
//   example_set.json
//   predictions_M<i>.jsonl   (checkpoints; final state = full model output)
//   records.jsonl eval.json consistency.json summary.txt
void run_pipeline(const ExperimentConfig& cfg);

// The strategy x temperature grid: {rse, cre} x {0.8, 1.5}, one run per
// cell under <out_root>/<strategy>_t<temp>, plus a combined comparison
// (grid_summary.json / grid_summary.txt).
void run_grid(ExperimentConfig base, const std::string& out_root);

std::unique_ptr<Backend> make_backend(const BackendSpec& spec);

struct InferenceStageResult {
    std::vector<EnsembleRecord> records;
    std::map<std::string, std::vector<BatchError>> errors;  // model id -> failures
};

// The inference stage alone: the N-model ensemble, or one model prompted
// with all k exemplars when cfg.shots is k-shot-single. Checkpoints land
// in out_dir; per-model transport failures come back attributed.
InferenceStageResult run_inference_stage(const ExperimentConfig& cfg,
                                         const ExampleSet& example_set,
                                         const std::vector<Sample>& test,
                                         const PromptTemplate& tpl, Backend& backend,
                                         const std::string& out_dir);

struct LoadedRun {
    std::string dir;
    nlohmann::json manifest;
    ExperimentConfig config;
    std::vector<EnsembleRecord> records;      // test order
    std::vector<std::string> test_order;      // sample ids
    std::map<std::string, int> truth;         // sample id -> label
    int n_models = 0;
    std::string test_id_hash;
};

LoadedRun load_run(const std::string& run_dir);

struct RunEval {
    std::map<std::string, EvalReport> per_model;
    EvalReport avg;       // arithmetic mean of the base-model metrics
    EvalReport ensemble;  // median predictions over samples with a median
};

RunEval evaluate_run(const LoadedRun& run);

struct Comparison {
    EvalReport ensemble_a;
    EvalReport ensemble_b;
    PairedTestResult mcnemar_correctness;  // paired correctness
    PairedTestResult wilcoxon_abs_error;   // paired absolute errors
    std::size_t n_paired = 0;
};

// Requires both runs to share the identical test set (sample-id hash).
Comparison compare_runs(const LoadedRun& a, const LoadedRun& b);

nlohmann::json eval_to_json(const RunEval& eval, const std::string& cfg_hash);
nlohmann::json comparison_to_json(const Comparison& cmp, const std::string& label_a,
                                  const std::string& label_b);

// Human-readable report: per-model/Avg/Ens metric table, per-class F1
// table, and consistency strata.
std::string render_summary(const LoadedRun& run, const RunEval& eval,
                           const ConsistencyReport& consistency);
std::string render_comparison(const Comparison& cmp, const std::string& label_a,
                              const std::string& label_b);

// FNV-1a 64 hex over newline-joined sample ids; identifies a test set.
std::string sample_id_hash(const std::vector<std::string>& ids);

}  // namespace llmens
