#include "llmens/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "llmens/error.hpp"
#include "llmens/io.hpp"
#include "llmens/rng.hpp"
#include "llmens/serialization.hpp"

namespace llmens {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("stage ") + name + ": " + e.what());
    }
}

std::string jsonl(const std::vector<Sample>& samples) {
    std::string out;
    for (const Sample& s : samples) {
        out += json(s).dump();
        out += '\n';
    }
    return out;
}

std::vector<Sample> read_samples_jsonl(const std::string& path) {
    std::vector<Sample> samples;
    for (const std::string& line : read_lines(path)) {
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) throw data_error("corrupt JSONL line in " + path);
        samples.push_back(row.get<Sample>());
    }
    return samples;
}

std::vector<Sample> selection_pool(const std::vector<Sample>& pool, const ExperimentConfig& cfg) {
    if (!cfg.selection_subsample || *cfg.selection_subsample >= pool.size()) return pool;
    SplitMix64 rng(mix64(cfg.selection_seed, fnv1a64("selection-subsample")));
    const auto idx = rng.sample_indices(pool.size(), *cfg.selection_subsample);
    std::vector<Sample> sub;
    sub.reserve(idx.size());
    for (std::size_t i : idx) sub.push_back(pool[i]);
    return sub;
}

EvalReport eval_or_empty(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty()) return EvalReport{};
    return evaluate(pred, truth);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
    if (spec.kind == BackendKind::mock) {
        MockModelSpec mock;
        mock.noise_floor = spec.mock_noise_floor;
        mock.temperature_gain = spec.mock_temp_gain;
        return std::make_unique<MockBackend>(mock);
    }
    RemoteSpec remote;
    remote.endpoint = spec.endpoint;
    remote.model_name = spec.model_name;
    remote.mode = spec.mode;
    remote.api_key_env = spec.api_key_env;
    return std::make_unique<HttpBackend>(std::move(remote));
}

InferenceStageResult run_inference_stage(const ExperimentConfig& cfg,
                                         const ExampleSet& example_set,
                                         const std::vector<Sample>& test,
                                         const PromptTemplate& tpl, Backend& backend,
                                         const std::string& out_dir) {
    InferenceStageResult result;
    if (cfg.shots == Shots::k_shot_single) {
        std::vector<std::pair<std::string, int>> shots;
        for (const Sample& e : example_set.examples) shots.emplace_back(e.text, e.label);
        GenerationParams params = cfg.gen;
        params.seed = cfg.seeds.front();

        RunBatchOptions opts;
        opts.model_id = "M1";
        opts.checkpoint_path = (fs::path(out_dir) / "predictions_M1.jsonl").string();
        opts.max_in_flight = cfg.backend.max_in_flight;
        opts.consecutive_failure_limit = cfg.backend.consecutive_failure_limit;

        const BatchResult batch = run_batch(
            test, [&](const Sample& s) { return render_prompt(tpl, shots, s.text); }, params,
            backend, opts);
        std::map<std::string, const Prediction*> by_id;
        for (const Prediction& p : batch.predictions) by_id[p.sample_id] = &p;
        result.records.reserve(test.size());
        for (const Sample& s : test) {
            std::vector<Prediction> preds;
            if (const auto it = by_id.find(s.id); it != by_id.end()) preds.push_back(*it->second);
            result.records.push_back(make_record(s.id, preds));
        }
        if (!batch.errors.empty()) result.errors["M1"] = batch.errors;
        return result;
    }

    EnsembleConfig ens;
    ens.n_models = cfg.k;
    ens.example_set = example_set;
    ens.seeds = cfg.seeds;
    ens.params = cfg.gen;
    ens.prompt_template = tpl;
    EnsembleRunOptions opts;
    opts.checkpoint_dir = out_dir;
    opts.max_in_flight = cfg.backend.max_in_flight;
    opts.consecutive_failure_limit = cfg.backend.consecutive_failure_limit;
    EnsembleRunResult run = run_ensemble(ens, test, backend, opts);
    result.records = std::move(run.records);
    for (int m = 0; m < cfg.k; ++m) {
        if (!run.model_batches[std::size_t(m)].errors.empty()) {
            result.errors[model_id_for(m)] = run.model_batches[std::size_t(m)].errors;
        }
    }
    return result;
}

std::string sample_id_hash(const std::vector<std::string>& ids) {
    std::string joined;
    for (const auto& id : ids) {
        joined += id;
        joined += '\n';
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(joined)));
    return std::string(buf);
}

void run_pipeline(const ExperimentConfig& cfg) {
    validate(cfg);
    const std::string hash = config_hash(cfg);
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);

    // A run directory is bound to one experiment; resuming with a different
    // config would silently mix artifacts.
    const fs::path manifest_path = out / "manifest.json";
    if (fs::exists(manifest_path)) {
        json existing = json::parse(read_file(manifest_path.string()), nullptr, false);
        if (existing.is_discarded() || !existing.contains("config_hash") ||
            existing["config_hash"] != hash) {
            throw validation_error("out_dir already holds a different experiment: " +
                                   cfg.out_dir);
        }
    }

    // ingest + split
    auto [pool, test] = stage("ingest", [&]() {
        const LoadResult loaded = load_corpus(cfg.corpus_path, cfg.filter_category);
        return split_corpus(loaded.samples, cfg.split);
    });

    std::vector<std::string> test_ids;
    test_ids.reserve(test.size());
    for (const Sample& s : test) test_ids.push_back(s.id);
    const std::string test_hash = sample_id_hash(test_ids);

    json manifest{{"config", cfg},
                  {"config_hash", hash},
                  {"test_id_hash", test_hash},
                  {"n_pool", pool.size()},
                  {"n_test", test.size()}};
    atomic_write_file(manifest_path.string(), manifest.dump(2) + "\n");
    atomic_write_file((out / "pool.jsonl").string(), jsonl(pool));
    atomic_write_file((out / "test.jsonl").string(), jsonl(test));

    json stats{{"pool", summarize(pool)}, {"test", summarize(test)}, {"config_hash", hash}};
    atomic_write_file((out / "stats.json").string(), stats.dump(2) + "\n");

    // exemplar selection
    const ExampleSet example_set = stage("select", [&]() {
        if (cfg.strategy == Strategy::RSE) {
            return select_rse(pool, cfg.k, cfg.selection_seed);
        }
        const std::vector<Sample> sel_pool = selection_pool(pool, cfg);
        std::vector<std::string> texts;
        texts.reserve(sel_pool.size());
        for (const Sample& s : sel_pool) texts.push_back(s.text);
        const auto vectors = embed_batch(texts, cfg.embedder);
        return select_cre(sel_pool, vectors, cfg.k, cfg.selection_seed);
    });
    {
        json j = example_set;
        j["config_hash"] = hash;
        atomic_write_file((out / "example_set.json").string(), j.dump(2) + "\n");
    }

    // inference
    const PromptTemplate tpl =
        cfg.template_file.empty() ? default_template() : load_template(cfg.template_file);
    auto backend = make_backend(cfg.backend);

    const InferenceStageResult inference = stage("run", [&]() {
        return run_inference_stage(cfg, example_set, test, tpl, *backend, out.string());
    });
    const std::vector<EnsembleRecord>& records = inference.records;
    {
        std::string content;
        for (const EnsembleRecord& r : records) {
            content += json(r).dump();
            content += '\n';
        }
        atomic_write_file((out / "records.jsonl").string(), content);
    }
    if (!inference.errors.empty()) {
        json ej;
        std::size_t total = 0;
        for (const auto& [model, errors] : inference.errors) {
            for (const BatchError& e : errors) {
                ej[model].push_back({{"sample_id", e.sample_id}, {"message", e.message}});
            }
            total += errors.size();
        }
        ej["config_hash"] = hash;
        atomic_write_file((out / "errors.json").string(), ej.dump(2) + "\n");
        std::cerr << "warning: " << total << " sample(s) failed transport and are missing from "
                  << "their models' predictions (see errors.json)\n";
    }

    // evaluation + consistency
    stage("evaluate", [&]() {
        const LoadedRun run = load_run(cfg.out_dir);
        const RunEval eval = evaluate_run(run);
        atomic_write_file((out / "eval.json").string(), eval_to_json(eval, hash).dump(2) + "\n");

        std::vector<EnsembleRecord> valid;
        for (const EnsembleRecord& r : run.records) {
            if (r.median_rating) valid.push_back(r);
        }
        const ConsistencyReport consistency =
            stratify_by_consistency(valid, run.truth, run.n_models);
        json cj = consistency;
        cj["config_hash"] = hash;
        atomic_write_file((out / "consistency.json").string(), cj.dump(2) + "\n");
        atomic_write_file((out / "summary.txt").string(),
                          render_summary(run, eval, consistency));
        return 0;
    });
}

LoadedRun load_run(const std::string& run_dir) {
    const fs::path dir(run_dir);
    LoadedRun run;
    run.dir = run_dir;

    run.manifest = json::parse(read_file((dir / "manifest.json").string()), nullptr, false);
    if (run.manifest.is_discarded()) throw data_error("corrupt manifest in " + run_dir);
    run.config = run.manifest.at("config").get<ExperimentConfig>();

    const std::vector<Sample> test = read_samples_jsonl((dir / "test.jsonl").string());
    for (const Sample& s : test) {
        run.test_order.push_back(s.id);
        run.truth[s.id] = s.label;
    }
    run.test_id_hash = sample_id_hash(run.test_order);
    if (run.manifest.contains("test_id_hash") &&
        run.manifest["test_id_hash"].get<std::string>() != run.test_id_hash) {
        throw data_error("test.jsonl does not match manifest test_id_hash in " + run_dir);
    }

    for (const std::string& line : read_lines((dir / "records.jsonl").string())) {
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) throw data_error("corrupt records.jsonl in " + run_dir);
        run.records.push_back(row.get<EnsembleRecord>());
    }
    run.n_models = run.config.shots == Shots::k_shot_single ? 1 : run.config.k;
    return run;
}

RunEval evaluate_run(const LoadedRun& run) {
    RunEval eval;

    for (int m = 0; m < run.n_models; ++m) {
        const std::string id = model_id_for(m);
        std::vector<int> pred, truth;
        for (const EnsembleRecord& r : run.records) {
            const auto it = r.per_model.find(id);
            if (it == r.per_model.end() || it->second.status != PredictionStatus::ok) continue;
            const auto t = run.truth.find(r.sample_id);
            if (t == run.truth.end()) {
                throw data_error("record without truth: " + r.sample_id);
            }
            pred.push_back(*it->second.rating);
            truth.push_back(t->second);
        }
        eval.per_model[id] = eval_or_empty(pred, truth);
    }

    std::vector<int> ens_pred, ens_truth;
    for (const EnsembleRecord& r : run.records) {
        if (!r.median_rating) continue;
        ens_pred.push_back(*r.median_rating);
        ens_truth.push_back(run.truth.at(r.sample_id));
    }
    eval.ensemble = eval_or_empty(ens_pred, ens_truth);

    // Table-style "Avg.": arithmetic mean of the base-model metrics.
    int counted = 0;
    for (const auto& [id, report] : eval.per_model) {
        if (report.n == 0) continue;
        ++counted;
        eval.avg.accuracy += report.accuracy;
        eval.avg.macro_f1 += report.macro_f1;
        eval.avg.weighted_f1 += report.weighted_f1;
        eval.avg.rmse += report.rmse;
        eval.avg.n += report.n;
        for (const auto& [label, f1] : report.f1_per_class) eval.avg.f1_per_class[label] += f1;
    }
    if (counted > 0) {
        eval.avg.accuracy /= counted;
        eval.avg.macro_f1 /= counted;
        eval.avg.weighted_f1 /= counted;
        eval.avg.rmse /= counted;
        eval.avg.n /= static_cast<std::size_t>(counted);
        for (auto& [label, f1] : eval.avg.f1_per_class) f1 /= counted;
    }
    return eval;
}

Comparison compare_runs(const LoadedRun& a, const LoadedRun& b) {
    if (a.test_id_hash != b.test_id_hash) {
        throw validation_error("runs were evaluated on different test sets (" + a.test_id_hash +
                               " vs " + b.test_id_hash + ")");
    }

    std::map<std::string, int> med_a, med_b;
    for (const EnsembleRecord& r : a.records) {
        if (r.median_rating) med_a[r.sample_id] = *r.median_rating;
    }
    for (const EnsembleRecord& r : b.records) {
        if (r.median_rating) med_b[r.sample_id] = *r.median_rating;
    }

    std::vector<int> pa, pb, truth;
    for (const std::string& id : a.test_order) {
        const auto ia = med_a.find(id);
        const auto ib = med_b.find(id);
        if (ia == med_a.end() || ib == med_b.end()) continue;
        pa.push_back(ia->second);
        pb.push_back(ib->second);
        truth.push_back(a.truth.at(id));
    }
    if (pa.empty()) throw validation_error("no paired predictions to compare");

    Comparison cmp;
    cmp.n_paired = pa.size();
    cmp.ensemble_a = evaluate(pa, truth);
    cmp.ensemble_b = evaluate(pb, truth);

    std::vector<bool> ca(pa.size()), cb(pa.size());
    std::vector<double> ea(pa.size()), eb(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        ca[i] = pa[i] == truth[i];
        cb[i] = pb[i] == truth[i];
        ea[i] = std::abs(static_cast<double>(pa[i]) - static_cast<double>(truth[i]));
        eb[i] = std::abs(static_cast<double>(pb[i]) - static_cast<double>(truth[i]));
    }
    cmp.mcnemar_correctness = mcnemar(ca, cb);
    cmp.wilcoxon_abs_error = wilcoxon_signed_rank(ea, eb);
    return cmp;
}

json eval_to_json(const RunEval& eval, const std::string& cfg_hash) {
    return json{{"models", eval.per_model},
                {"avg", eval.avg},
                {"ensemble", eval.ensemble},
                {"config_hash", cfg_hash}};
}

json comparison_to_json(const Comparison& cmp, const std::string& label_a,
                        const std::string& label_b) {
    return json{{"run_a", label_a},
                {"run_b", label_b},
                {"n_paired", cmp.n_paired},
                {"ensemble_a", cmp.ensemble_a},
                {"ensemble_b", cmp.ensemble_b},
                {"mcnemar", cmp.mcnemar_correctness},
                {"wilcoxon", cmp.wilcoxon_abs_error}};
}

std::string render_summary(const LoadedRun& run, const RunEval& eval,
                           const ConsistencyReport& consistency) {
    std::ostringstream out;
    const ExperimentConfig& cfg = run.config;
    char temp[16];
    std::snprintf(temp, sizeof(temp), "%g", cfg.gen.temperature);

    out << "strategy=" << strategy_name(cfg.strategy) << "  T=" << temp
        << "  shots=" << shots_name(cfg.shots) << "  n_test=" << run.test_order.size()
        << "  config=" << run.manifest.value("config_hash", config_hash(cfg)) << "\n\n";

    // Per-model / Avg / Ens metric table
    const std::size_t w = 8;
    out << "metric  ";
    for (int m = 0; m < run.n_models; ++m) out << pad(model_id_for(m), w);
    out << pad("Avg.", w) << pad("Ens", w) << "\n";
    const auto row = [&](const char* name, auto metric) {
        out << pad(name, 6) << "  ";
        for (int m = 0; m < run.n_models; ++m) {
            out << pad(fmt(metric(eval.per_model.at(model_id_for(m)))), w);
        }
        out << pad(fmt(metric(eval.avg)), w) << pad(fmt(metric(eval.ensemble)), w) << "\n";
    };
    row("Acc.", [](const EvalReport& r) { return r.accuracy; });
    row("F1", [](const EvalReport& r) { return r.macro_f1; });
    row("RMSE", [](const EvalReport& r) { return r.rmse; });

    // Per-class F1
    out << "\nF1 by label\n";
    out << pad("model", 6) << "  ";
    for (int label = 1; label <= 5; ++label) out << pad(std::to_string(label), w);
    out << pad("All", w) << "\n";
    const auto f1row = [&](const std::string& name, const EvalReport& r) {
        out << pad(name, 6) << "  ";
        for (int label = 1; label <= 5; ++label) out << pad(fmt(r.f1_per_class.count(label) ? r.f1_per_class.at(label) : 0.0), w);
        out << pad(fmt(r.macro_f1), w) << "\n";
    };
    for (int m = 0; m < run.n_models; ++m) {
        f1row(model_id_for(m), eval.per_model.at(model_id_for(m)));
    }
    f1row("Ens", eval.ensemble);
    out << "(All = macro-F1 over labels 1..5; weighted F1: Ens "
        << fmt(eval.ensemble.weighted_f1) << ")\n";

    // Consistency strata
    out << "\nself-consistency\n" << pad("n_unique", 9);
    for (const auto& [u, s] : consistency.per_stratum) out << pad(std::to_string(u), w);
    out << "\n" << pad("samples", 9);
    for (const auto& [u, s] : consistency.per_stratum) out << pad(std::to_string(s.count), w);
    out << "\n" << pad("Acc.", 9);
    for (const auto& [u, s] : consistency.per_stratum) {
        out << pad(s.accuracy ? fmt(*s.accuracy) : "-", w);
    }
    out << "\n" << pad("F1", 9);
    for (const auto& [u, s] : consistency.per_stratum) {
        out << pad(s.macro_f1 ? fmt(*s.macro_f1) : "-", w);
    }
    out << "\n";
    return out.str();
}

std::string render_comparison(const Comparison& cmp, const std::string& label_a,
                              const std::string& label_b) {
    std::ostringstream out;
    const std::size_t w = 10;
    out << "paired samples: " << cmp.n_paired << "\n\n";
    out << pad("metric", 8) << pad(label_a.size() > w ? label_a.substr(label_a.size() - w) : label_a, w)
        << pad(label_b.size() > w ? label_b.substr(label_b.size() - w) : label_b, w)
        << pad("delta", w) << "\n";
    const auto row = [&](const char* name, double a, double b) {
        out << pad(name, 8) << pad(fmt(a), w) << pad(fmt(b), w) << pad(fmt(b - a), w) << "\n";
    };
    row("Acc.", cmp.ensemble_a.accuracy, cmp.ensemble_b.accuracy);
    row("F1", cmp.ensemble_a.macro_f1, cmp.ensemble_b.macro_f1);
    row("RMSE", cmp.ensemble_a.rmse, cmp.ensemble_b.rmse);
    out << "\nMcNemar (correctness): chi2=" << fmt(cmp.mcnemar_correctness.statistic)
        << " p=" << cmp.mcnemar_correctness.p_value
        << " n_discordant=" << cmp.mcnemar_correctness.n_effective << "\n";
    out << "Wilcoxon (abs errors): W=" << cmp.wilcoxon_abs_error.statistic
        << " p=" << cmp.wilcoxon_abs_error.p_value
        << " n_effective=" << cmp.wilcoxon_abs_error.n_effective << " ("
        << cmp.wilcoxon_abs_error.method << ")\n";
    return out.str();
}

void run_grid(ExperimentConfig base, const std::string& out_root) {
    struct Cell {
        Strategy strategy;
        double temperature;
        std::string dir;
    };
    std::vector<Cell> cells;
    for (Strategy s : {Strategy::RSE, Strategy::CRE}) {
        for (double t : {0.8, 1.5}) {
            char name[32];
            std::snprintf(name, sizeof(name), "%s_t%.1f", strategy_name(s), t);
            cells.push_back({s, t, (fs::path(out_root) / name).string()});
        }
    }

    for (const Cell& cell : cells) {
        ExperimentConfig cfg = base;
        cfg.strategy = cell.strategy;
        cfg.gen.temperature = cell.temperature;
        cfg.out_dir = cell.dir;
        run_pipeline(cfg);
    }

    json summary;
    std::ostringstream text;
    const std::size_t w = 9;
    text << pad("cell", 10) << pad("Acc.", w) << pad("F1", w) << pad("RMSE", w) << "\n";
    std::map<std::string, LoadedRun> runs;
    for (const Cell& cell : cells) {
        LoadedRun run = load_run(cell.dir);
        const RunEval eval = evaluate_run(run);
        const std::string name = fs::path(cell.dir).filename().string();
        summary["cells"][name] = {{"dir", cell.dir}, {"ensemble", eval.ensemble}};
        text << pad(name, 10) << pad(fmt(eval.ensemble.accuracy), w)
             << pad(fmt(eval.ensemble.macro_f1), w) << pad(fmt(eval.ensemble.rmse), w) << "\n";
        runs.emplace(name, std::move(run));
    }

    // Strategy within temperature, temperature within strategy.
    const std::vector<std::pair<std::string, std::string>> contrasts = {
        {"rse_t0.8", "cre_t0.8"},
        {"rse_t1.5", "cre_t1.5"},
        {"rse_t0.8", "rse_t1.5"},
        {"cre_t0.8", "cre_t1.5"},
    };
    text << "\n";
    for (const auto& [a, b] : contrasts) {
        const Comparison cmp = compare_runs(runs.at(a), runs.at(b));
        summary["contrasts"][a + "_vs_" + b] = comparison_to_json(cmp, a, b);
        text << "== " << a << " vs " << b << " ==\n" << render_comparison(cmp, a, b) << "\n";
    }

    fs::create_directories(out_root);
    atomic_write_file((fs::path(out_root) / "grid_summary.json").string(),
                      summary.dump(2) + "\n");
    atomic_write_file((fs::path(out_root) / "grid_summary.txt").string(), text.str());
}

}  // namespace llmens
