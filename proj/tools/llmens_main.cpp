#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "llmens/config.hpp"
#include "llmens/error.hpp"
#include "llmens/io.hpp"
#include "llmens/pipeline.hpp"
#include "llmens/rng.hpp"
#include "llmens/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace llmens;

namespace {

// Flag values land here; only flags the user actually passed override the
// config file (CLI11 counts make that distinction).
struct ConfigFlags {
    std::string config_path;
    ExperimentConfig staged;  // receives flag values during parse

    CLI::Option* corpus = nullptr;
    CLI::Option* filter_category = nullptr;
    CLI::Option* pool_size = nullptr;
    CLI::Option* test_size = nullptr;
    CLI::Option* split_seed = nullptr;
    CLI::Option* embed_endpoint = nullptr;
    CLI::Option* embed_model = nullptr;
    CLI::Option* embed_dim = nullptr;
    CLI::Option* normalize = nullptr;
    CLI::Option* embedder_kind = nullptr;
    CLI::Option* strategy = nullptr;
    CLI::Option* k = nullptr;
    CLI::Option* selection_seed = nullptr;
    CLI::Option* selection_subsample = nullptr;
    CLI::Option* seeds = nullptr;
    CLI::Option* temperature = nullptr;
    CLI::Option* top_p = nullptr;
    CLI::Option* max_new_tokens = nullptr;
    CLI::Option* backend = nullptr;
    CLI::Option* endpoint = nullptr;
    CLI::Option* model = nullptr;
    CLI::Option* wire = nullptr;
    CLI::Option* mock_noise_floor = nullptr;
    CLI::Option* mock_temp_gain = nullptr;
    CLI::Option* max_in_flight = nullptr;
    CLI::Option* template_file = nullptr;
    CLI::Option* shots = nullptr;
    CLI::Option* out_dir = nullptr;

    std::string strategy_value, shots_value, backend_value, wire_value, embedder_kind_value;
    std::string filter_value;
    std::size_t subsample_value = 0;
};

void add_config_flags(CLI::App* sub, ConfigFlags& f) {
    sub->add_option("--config", f.config_path, "experiment config JSON; flags override keys");
    f.corpus = sub->add_option("--corpus", f.staged.corpus_path, "corpus JSONL file");
    f.filter_category =
        sub->add_option("--filter-category", f.filter_value, "keep rows whose categories contain this");
    f.pool_size = sub->add_option("--pool-size", f.staged.split.pool_size, "example pool size");
    f.test_size = sub->add_option("--test-size", f.staged.split.test_size, "test set size");
    f.split_seed = sub->add_option("--seed", f.staged.split.seed, "split seed");
    f.embedder_kind = sub->add_option("--embedder", f.embedder_kind_value,
                                      "embedder kind: remote | deterministic-test");
    f.embed_endpoint =
        sub->add_option("--embed-endpoint", f.staged.embedder.endpoint, "embedding endpoint URL");
    f.embed_model = sub->add_option("--embed-model", f.staged.embedder.model_name, "embedding model name");
    f.embed_dim = sub->add_option("--embed-dim", f.staged.embedder.dim, "embedding dimension");
    f.normalize = sub->add_flag("--normalize-embeddings", f.staged.embedder.normalize,
                                "unit-normalize embeddings");
    f.strategy = sub->add_option("--strategy", f.strategy_value, "cre | rse");
    f.k = sub->add_option("--k,--n-models", f.staged.k, "exemplars = base models");
    f.selection_seed = sub->add_option("--selection-seed", f.staged.selection_seed, "selection seed");
    f.selection_subsample = sub->add_option("--selection-subsample", f.subsample_value,
                                            "cluster on a seeded pool subsample of this size");
    f.seeds = sub->add_option("--seeds", f.staged.seeds, "per-model generation seeds");
    f.temperature = sub->add_option("--temperature", f.staged.gen.temperature, "sampling temperature");
    f.top_p = sub->add_option("--top-p", f.staged.gen.top_p, "nucleus sampling p");
    f.max_new_tokens =
        sub->add_option("--max-new-tokens", f.staged.gen.max_new_tokens, "tokens per generation");
    f.backend = sub->add_option("--backend", f.backend_value, "mock | remote");
    f.endpoint = sub->add_option("--endpoint", f.staged.backend.endpoint, "completion endpoint URL");
    f.model = sub->add_option("--model", f.staged.backend.model_name, "completion model name");
    f.wire = sub->add_option("--wire", f.wire_value, "completion | chat");
    f.mock_noise_floor =
        sub->add_option("--mock-noise-floor", f.staged.backend.mock_noise_floor, "mock error rate floor");
    f.mock_temp_gain = sub->add_option("--mock-temp-gain", f.staged.backend.mock_temp_gain,
                                       "mock error rate per unit temperature");
    f.max_in_flight =
        sub->add_option("--max-in-flight", f.staged.backend.max_in_flight, "concurrent requests");
    f.template_file = sub->add_option("--template-file", f.staged.template_file, "prompt template file");
    f.shots = sub->add_option("--shots", f.shots_value, "one-shot-ensemble | k-shot-single");
    f.out_dir = sub->add_option("--out", f.staged.out_dir, "run output directory");
}

ExperimentConfig resolve_config(const ConfigFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = load_config(f.config_path);

    const auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
    if (given(f.corpus)) cfg.corpus_path = f.staged.corpus_path;
    if (given(f.filter_category)) cfg.filter_category = f.filter_value;
    if (given(f.pool_size)) cfg.split.pool_size = f.staged.split.pool_size;
    if (given(f.test_size)) cfg.split.test_size = f.staged.split.test_size;
    if (given(f.split_seed)) cfg.split.seed = f.staged.split.seed;
    if (given(f.embedder_kind)) {
        cfg.embedder.kind = f.embedder_kind_value == "remote" ? EmbedderKind::remote
                                                              : EmbedderKind::deterministic_test;
        if (f.embedder_kind_value != "remote" && f.embedder_kind_value != "deterministic-test") {
            throw validation_error("unknown embedder kind '" + f.embedder_kind_value + "'");
        }
    }
    if (given(f.embed_endpoint)) {
        cfg.embedder.endpoint = f.staged.embedder.endpoint;
        if (!given(f.embedder_kind)) cfg.embedder.kind = EmbedderKind::remote;
    }
    if (given(f.embed_model)) cfg.embedder.model_name = f.staged.embedder.model_name;
    if (given(f.embed_dim)) cfg.embedder.dim = f.staged.embedder.dim;
    if (given(f.normalize)) cfg.embedder.normalize = f.staged.embedder.normalize;
    if (given(f.strategy)) cfg.strategy = strategy_from_name(f.strategy_value);
    if (given(f.k)) cfg.k = f.staged.k;
    if (given(f.selection_seed)) cfg.selection_seed = f.staged.selection_seed;
    if (given(f.selection_subsample)) cfg.selection_subsample = f.subsample_value;
    if (given(f.seeds)) cfg.seeds = f.staged.seeds;
    if (given(f.temperature)) cfg.gen.temperature = f.staged.gen.temperature;
    if (given(f.top_p)) cfg.gen.top_p = f.staged.gen.top_p;
    if (given(f.max_new_tokens)) cfg.gen.max_new_tokens = f.staged.gen.max_new_tokens;
    if (given(f.backend)) cfg.backend.kind = backend_kind_from_name(f.backend_value);
    if (given(f.endpoint)) {
        cfg.backend.endpoint = f.staged.backend.endpoint;
        if (!given(f.backend)) cfg.backend.kind = BackendKind::remote;
    }
    if (given(f.model)) cfg.backend.model_name = f.staged.backend.model_name;
    if (given(f.wire)) cfg.backend.mode = wire_mode_from_name(f.wire_value);
    if (given(f.mock_noise_floor)) cfg.backend.mock_noise_floor = f.staged.backend.mock_noise_floor;
    if (given(f.mock_temp_gain)) cfg.backend.mock_temp_gain = f.staged.backend.mock_temp_gain;
    if (given(f.max_in_flight)) cfg.backend.max_in_flight = f.staged.backend.max_in_flight;
    if (given(f.template_file)) cfg.template_file = f.staged.template_file;
    if (given(f.shots)) cfg.shots = shots_from_name(f.shots_value);
    if (given(f.out_dir)) cfg.out_dir = f.staged.out_dir;

    // Seeds default to 1..k when left unspecified.
    if (cfg.seeds.size() != static_cast<std::size_t>(cfg.k) && !given(f.seeds) &&
        f.config_path.empty()) {
        cfg.seeds.clear();
        for (int i = 1; i <= cfg.k; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    return cfg;
}

std::vector<Sample> read_samples_file(const std::string& path) {
    std::vector<Sample> samples;
    for (const std::string& line : read_lines(path)) {
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) throw data_error("corrupt JSONL line in " + path);
        samples.push_back(row.get<Sample>());
    }
    return samples;
}

std::string samples_jsonl(const std::vector<Sample>& samples) {
    std::string out;
    for (const Sample& s : samples) {
        out += json(s).dump();
        out += '\n';
    }
    return out;
}

int cmd_ingest(const ConfigFlags& f) {
    ExperimentConfig cfg = resolve_config(f);
    if (cfg.corpus_path.empty()) throw validation_error("ingest: --corpus required");
    if (cfg.out_dir.empty()) throw validation_error("ingest: --out required");

    const LoadResult loaded = load_corpus(cfg.corpus_path, cfg.filter_category);
    auto [pool, test] = split_corpus(loaded.samples, cfg.split);

    fs::create_directories(cfg.out_dir);
    atomic_write_file((fs::path(cfg.out_dir) / "pool.jsonl").string(), samples_jsonl(pool));
    atomic_write_file((fs::path(cfg.out_dir) / "test.jsonl").string(), samples_jsonl(test));

    json stats{{"pool", summarize(pool)}, {"test", summarize(test)},
               {"rejected_rows", loaded.rejected}};
    atomic_write_file((fs::path(cfg.out_dir) / "stats.json").string(), stats.dump(2) + "\n");
    std::cout << stats.dump(2) << "\n";
    return 0;
}

int cmd_select(const ConfigFlags& f, const std::string& pool_path, const std::string& out_file) {
    ExperimentConfig cfg = resolve_config(f);
    if (pool_path.empty()) throw validation_error("select: --pool required");
    if (out_file.empty()) throw validation_error("select: --out-file required");
    // select has no split stage, so its --seed means the selection seed
    if (f.split_seed->count() > 0 && f.selection_seed->count() == 0) {
        cfg.selection_seed = f.staged.split.seed;
    }

    std::vector<Sample> pool = read_samples_file(pool_path);
    ExampleSet set;
    if (cfg.strategy == Strategy::RSE) {
        set = select_rse(pool, cfg.k, cfg.selection_seed);
    } else {
        if (cfg.selection_subsample && *cfg.selection_subsample < pool.size()) {
            SplitMix64 rng(mix64(cfg.selection_seed, fnv1a64("selection-subsample")));
            const auto idx = rng.sample_indices(pool.size(), *cfg.selection_subsample);
            std::vector<Sample> sub;
            for (std::size_t i : idx) sub.push_back(pool[i]);
            pool = std::move(sub);
        }
        std::vector<std::string> texts;
        for (const Sample& s : pool) texts.push_back(s.text);
        const auto vectors = embed_batch(texts, cfg.embedder);
        set = select_cre(pool, vectors, cfg.k, cfg.selection_seed);
    }
    atomic_write_file(out_file, json(set).dump(2) + "\n");
    std::cout << "strategy=" << strategy_name(set.strategy) << " k=" << set.k
              << " seed=" << set.seed << "\nlabels:";
    for (const auto& [label, count] : label_histogram(set)) {
        std::cout << " " << label << ":" << count;
    }
    std::cout << "\nwrote " << out_file << "\n";
    return 0;
}

int cmd_run(const ConfigFlags& f, const std::string& test_path, const std::string& examples_path) {
    ExperimentConfig cfg = resolve_config(f);
    if (test_path.empty()) throw validation_error("run: --test required");
    if (examples_path.empty()) throw validation_error("run: --examples required");
    if (cfg.out_dir.empty()) throw validation_error("run: --out required");
    validate(cfg.gen);

    const std::vector<Sample> test = read_samples_file(test_path);
    json ej = json::parse(read_file(examples_path), nullptr, false);
    if (ej.is_discarded()) throw data_error("corrupt example set: " + examples_path);
    const ExampleSet example_set = ej.get<ExampleSet>();

    cfg.k = example_set.k;
    cfg.strategy = example_set.strategy;
    cfg.selection_seed = example_set.seed;
    if (cfg.seeds.size() != static_cast<std::size_t>(cfg.k)) {
        cfg.seeds.clear();
        for (int i = 1; i <= cfg.k; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
    }
    if (cfg.corpus_path.empty()) cfg.corpus_path = test_path;

    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    const PromptTemplate tpl =
        cfg.template_file.empty() ? default_template() : load_template(cfg.template_file);

    auto backend = make_backend(cfg.backend);
    const InferenceStageResult inference =
        run_inference_stage(cfg, example_set, test, tpl, *backend, out.string());
    const std::vector<EnsembleRecord>& records = inference.records;
    for (const auto& [model, errors] : inference.errors) {
        std::cerr << "warning: " << model << ": " << errors.size()
                  << " sample(s) failed transport\n";
    }

    std::string content;
    for (const EnsembleRecord& r : records) {
        content += json(r).dump();
        content += '\n';
    }
    atomic_write_file((out / "records.jsonl").string(), content);
    atomic_write_file((out / "test.jsonl").string(), samples_jsonl(test));

    std::vector<std::string> ids;
    for (const Sample& s : test) ids.push_back(s.id);
    json manifest{{"config", cfg},
                  {"config_hash", config_hash(cfg)},
                  {"test_id_hash", sample_id_hash(ids)},
                  {"n_test", test.size()}};
    atomic_write_file((out / "manifest.json").string(), manifest.dump(2) + "\n");
    std::cout << "wrote " << records.size() << " records to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_evaluate(const std::string& run_dir, const std::string& against, bool as_json) {
    const LoadedRun run = load_run(run_dir);
    const RunEval eval = evaluate_run(run);
    const std::string hash = run.manifest.value("config_hash", "");
    atomic_write_file((fs::path(run_dir) / "eval.json").string(),
                      eval_to_json(eval, hash).dump(2) + "\n");

    std::vector<EnsembleRecord> valid;
    for (const EnsembleRecord& r : run.records) {
        if (r.median_rating) valid.push_back(r);
    }
    const ConsistencyReport consistency = stratify_by_consistency(valid, run.truth, run.n_models);

    if (as_json) {
        std::cout << eval_to_json(eval, hash).dump(2) << "\n";
    } else {
        std::cout << render_summary(run, eval, consistency);
    }
    if (!against.empty()) {
        const LoadedRun other = load_run(against);
        const Comparison cmp = compare_runs(run, other);
        if (as_json) {
            std::cout << comparison_to_json(cmp, run_dir, against).dump(2) << "\n";
        } else {
            std::cout << "\n== vs " << against << " ==\n"
                      << render_comparison(cmp, run_dir, against);
        }
    }
    return 0;
}

int cmd_compare(const std::string& run_a, const std::string& run_b, const std::string& out_file,
                bool as_json) {
    const LoadedRun a = load_run(run_a);
    const LoadedRun b = load_run(run_b);
    const Comparison cmp = compare_runs(a, b);
    const json j = comparison_to_json(cmp, run_a, run_b);
    if (!out_file.empty()) atomic_write_file(out_file, j.dump(2) + "\n");
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << render_comparison(cmp, run_a, run_b);
    }
    return 0;
}

int cmd_consistency(const std::string& run_dir, bool as_json) {
    const LoadedRun run = load_run(run_dir);
    std::vector<EnsembleRecord> valid;
    for (const EnsembleRecord& r : run.records) {
        if (r.median_rating) valid.push_back(r);
    }
    const ConsistencyReport report = stratify_by_consistency(valid, run.truth, run.n_models);
    json j = report;
    j["config_hash"] = run.manifest.value("config_hash", "");
    atomic_write_file((fs::path(run_dir) / "consistency.json").string(), j.dump(2) + "\n");
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "n_unique  count  accuracy  macro_f1\n";
        for (const auto& [u, s] : report.per_stratum) {
            std::cout << u << "  " << s.count << "  "
                      << (s.accuracy ? std::to_string(*s.accuracy) : std::string("-")) << "  "
                      << (s.macro_f1 ? std::to_string(*s.macro_f1) : std::string("-")) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-shot LLM ensemble: exemplar selection, seeded inference, median aggregation, evaluation"};
    app.require_subcommand(1);

    ConfigFlags ingest_flags;
    auto* ingest = app.add_subcommand("ingest", "load a corpus, split into pool/test, emit stats");
    add_config_flags(ingest, ingest_flags);

    ConfigFlags select_flags;
    std::string select_pool, select_out;
    auto* select = app.add_subcommand("select", "choose k one-shot exemplars (cre or rse)");
    add_config_flags(select, select_flags);
    select->add_option("--pool", select_pool, "pool JSONL (from ingest)");
    select->add_option("--out-file", select_out, "example set JSON output path");

    ConfigFlags run_flags;
    std::string run_test, run_examples;
    auto* run = app.add_subcommand("run", "run the seeded model ensemble over a test set");
    add_config_flags(run, run_flags);
    run->add_option("--test", run_test, "test JSONL (from ingest)");
    run->add_option("--examples", run_examples, "example set JSON (from select)");

    std::string eval_run, eval_against;
    bool eval_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "score a run (per-model + Avg. + Ens)");
    evaluate->add_option("--run", eval_run, "run directory")->required();
    evaluate->add_option("--against", eval_against, "second run directory for paired tests");
    evaluate->add_flag("--json", eval_json, "print JSON instead of text");

    std::string cmp_a, cmp_b, cmp_out;
    bool cmp_json = false;
    auto* compare = app.add_subcommand("compare", "paired significance tests between two runs");
    compare->add_option("--run-a", cmp_a, "first run directory")->required();
    compare->add_option("--run-b", cmp_b, "second run directory")->required();
    compare->add_option("--out-file", cmp_out, "write comparison JSON here");
    compare->add_flag("--json", cmp_json, "print JSON instead of text");

    std::string cons_run;
    bool cons_json = false;
    auto* consistency = app.add_subcommand("consistency", "stratify accuracy by self-consistency");
    consistency->add_option("--run", cons_run, "run directory")->required();
    consistency->add_flag("--json", cons_json, "print JSON instead of text");

    ConfigFlags pipeline_flags;
    auto* pipeline = app.add_subcommand("pipeline", "full experiment: ingest through consistency");
    add_config_flags(pipeline, pipeline_flags);

    ConfigFlags grid_flags;
    std::string grid_root;
    auto* grid = app.add_subcommand("grid", "strategy x temperature grid with combined comparison");
    add_config_flags(grid, grid_flags);
    grid->add_option("--out-root", grid_root, "directory receiving one run per cell");

    try {
        app.parse(argc, argv);

        if (ingest->parsed()) return cmd_ingest(ingest_flags);
        if (select->parsed()) return cmd_select(select_flags, select_pool, select_out);
        if (run->parsed()) return cmd_run(run_flags, run_test, run_examples);
        if (evaluate->parsed()) return cmd_evaluate(eval_run, eval_against, eval_json);
        if (compare->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_out, cmp_json);
        if (consistency->parsed()) return cmd_consistency(cons_run, cons_json);
        if (pipeline->parsed()) {
            run_pipeline(resolve_config(pipeline_flags));
            std::cout << "pipeline complete: " << resolve_config(pipeline_flags).out_dir << "\n";
            return 0;
        }
        if (grid->parsed()) {
            if (grid_root.empty()) throw validation_error("grid: --out-root required");
            run_grid(resolve_config(grid_flags), grid_root);
            std::cout << "grid complete: " << grid_root << "\n";
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
