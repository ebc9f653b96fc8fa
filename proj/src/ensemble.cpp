#include "llmens/ensemble.hpp"

#include <algorithm>
#include <set>

#include "llmens/error.hpp"

namespace llmens {

std::string model_id_for(int index) { return "M" + std::to_string(index + 1); }

void validate(const EnsembleConfig& config) {
    if (config.n_models <= 0) throw validation_error("ensemble: n_models must be positive");
    if (static_cast<int>(config.seeds.size()) != config.n_models) {
        throw validation_error("ensemble: seeds count must equal n_models");
    }
    if (config.example_set.k != config.n_models ||
        static_cast<int>(config.example_set.examples.size()) != config.n_models) {
        throw validation_error("ensemble: example set size must equal n_models");
    }
    validate(config.params);
    validate(config.prompt_template);
}

int median_aggregate(std::vector<int> ratings) {
    if (ratings.empty()) throw validation_error("median_aggregate: empty rating list");
    for (int r : ratings) {
        if (r < 1 || r > 5) {
            throw validation_error("median_aggregate: rating out of range: " + std::to_string(r));
        }
    }
    std::sort(ratings.begin(), ratings.end());
    const std::size_t n = ratings.size();
    if (n % 2 == 1) return ratings[n / 2];
    const int lo = ratings[n / 2 - 1];
    const int hi = ratings[n / 2];
    return (lo + hi + 1) / 2;  // mean rounded half-up stays in {1..5}
}

int consistency(const EnsembleRecord& record) {
    std::set<int> unique;
    for (const auto& [id, pred] : record.per_model) {
        if (pred.status == PredictionStatus::ok) unique.insert(*pred.rating);
    }
    if (unique.empty()) {
        throw validation_error("consistency: no valid predictions for sample " + record.sample_id);
    }
    return static_cast<int>(unique.size());
}

EnsembleRecord make_record(const std::string& sample_id, const std::vector<Prediction>& preds) {
    EnsembleRecord rec;
    rec.sample_id = sample_id;
    std::vector<int> ok_ratings;
    for (const Prediction& p : preds) {
        if (p.status == PredictionStatus::ok) ok_ratings.push_back(*p.rating);
        rec.per_model[p.model_id] = p;
    }
    rec.n_valid = static_cast<int>(ok_ratings.size());
    if (!ok_ratings.empty()) {
        rec.median_rating = median_aggregate(ok_ratings);
        rec.n_unique = consistency(rec);
    }
    return rec;
}

EnsembleRunResult run_ensemble(const EnsembleConfig& config, const std::vector<Sample>& test,
                               Backend& backend, const EnsembleRunOptions& options) {
    validate(config);

    EnsembleRunResult result;
    result.model_batches.reserve(static_cast<std::size_t>(config.n_models));

    for (int m = 0; m < config.n_models; ++m) {
        const Sample& example = config.example_set.examples[static_cast<std::size_t>(m)];
        GenerationParams params = config.params;
        params.seed = config.seeds[static_cast<std::size_t>(m)];

        RunBatchOptions batch_opts;
        batch_opts.model_id = model_id_for(m);
        batch_opts.max_in_flight = options.max_in_flight;
        batch_opts.consecutive_failure_limit = options.consecutive_failure_limit;
        if (!options.checkpoint_dir.empty()) {
            batch_opts.checkpoint_path =
                options.checkpoint_dir + "/predictions_" + batch_opts.model_id + ".jsonl";
        }

        const PromptFn prompt_fn = [&](const Sample& s) {
            return render_prompt(config.prompt_template, {{example.text, example.label}}, s.text);
        };
        result.model_batches.push_back(
            run_batch(test, prompt_fn, params, backend, batch_opts));
    }

    // Assemble per-sample records from whatever each model produced.
    std::vector<std::map<std::string, const Prediction*>> by_model;
    by_model.reserve(result.model_batches.size());
    for (const BatchResult& batch : result.model_batches) {
        std::map<std::string, const Prediction*> index;
        for (const Prediction& p : batch.predictions) index[p.sample_id] = &p;
        by_model.push_back(std::move(index));
    }
    result.records.reserve(test.size());
    for (const Sample& s : test) {
        std::vector<Prediction> preds;
        for (const auto& index : by_model) {
            const auto it = index.find(s.id);
            if (it != index.end()) preds.push_back(*it->second);
        }
        result.records.push_back(make_record(s.id, preds));
    }
    return result;
}

}  // namespace llmens
