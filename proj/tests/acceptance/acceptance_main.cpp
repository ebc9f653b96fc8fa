// Acceptance suite: one check per release criterion, one line of output
// each. Exits non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "llmens/config.hpp"
#include "llmens/ensemble.hpp"
#include "llmens/error.hpp"
#include "llmens/io.hpp"
#include "llmens/metrics.hpp"
#include "llmens/pipeline.hpp"
#include "llmens/rng.hpp"
#include "llmens/selection.hpp"
#include "llmens/simd/kernels.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace llmens;
using nlohmann::json;

namespace {

struct CriterionFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw CriterionFailure(msg);
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Metric oracle equivalence on 200 random instances (n <= 12).
// ---------------------------------------------------------------------------
std::string criterion_metric_oracles() {
    SplitMix64 rng(4242);
    const double tol = 1e-9;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.bounded(11);  // 2..12
        std::vector<int> pred(n), truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = 1 + int(rng.bounded(5));
            truth[i] = 1 + int(rng.bounded(5));
        }

        require(std::abs(accuracy(pred, truth) - oracle::accuracy(pred, truth)) < tol,
                "accuracy diverged from oracle");
        require(std::abs(rmse(pred, truth) - oracle::rmse(pred, truth)) < tol,
                "rmse diverged from oracle");

        const F1Result f1 = f1_scores(pred, truth);
        const oracle::F1 of1 = oracle::f1(pred, truth);
        require(std::abs(f1.macro - of1.macro) < tol, "macro F1 diverged from oracle");
        require(std::abs(f1.weighted - of1.weighted) < tol, "weighted F1 diverged from oracle");
        for (int c = 1; c <= 5; ++c) {
            require(std::abs(f1.per_class.at(c) - of1.per_class.at(c)) < tol,
                    "per-class F1 diverged from oracle");
        }

        std::vector<bool> ca(n), cb(n);
        for (std::size_t i = 0; i < n; ++i) {
            ca[i] = rng.bounded(2) == 0;
            cb[i] = rng.bounded(2) == 0;
        }
        const PairedTestResult mc = mcnemar(ca, cb);
        const oracle::McNemar mo = oracle::mcnemar(ca, cb);
        require(std::abs(mc.statistic - mo.chi2) < tol, "mcnemar statistic diverged");
        require(std::abs(mc.p_value - mo.p) < tol, "mcnemar p diverged from quadrature oracle");

        std::vector<double> ea(n), eb(n);
        for (std::size_t i = 0; i < n; ++i) {
            ea[i] = double(rng.bounded(5));
            eb[i] = double(rng.bounded(5));
        }
        const PairedTestResult wil = wilcoxon_signed_rank(ea, eb);
        const oracle::Wilcoxon wo = oracle::wilcoxon_exact(ea, eb);
        require(std::abs(wil.statistic - wo.w) < tol, "wilcoxon W diverged");
        require(std::abs(wil.p_value - wo.p) < tol, "wilcoxon p diverged from enumeration");
        require(wil.n_effective == wo.n, "wilcoxon n_effective diverged");
    }
    return "200 instances within 1e-9 of brute-force oracles";
}

// ---------------------------------------------------------------------------
// 2. McNemar spot value b=10, c=25.
// ---------------------------------------------------------------------------
std::string criterion_mcnemar_spot() {
    std::vector<bool> a, b;
    for (int i = 0; i < 10; ++i) { a.push_back(true);  b.push_back(false); }
    for (int i = 0; i < 25; ++i) { a.push_back(false); b.push_back(true); }
    for (int i = 0; i < 40; ++i) { a.push_back(true);  b.push_back(true); }

    const PairedTestResult res = mcnemar(a, b);
    require(res.statistic == 196.0 / 35.0, "chi2 not exactly 5.6");
    const double oracle_p = oracle::chi2_1df_sf_quadrature(res.statistic);
    require(std::abs(res.p_value - oracle_p) < 1e-4, "p not within 1e-4 of the chi2 tail oracle");
    require(std::abs(res.p_value - 0.0180) < 1e-4, "p not ~0.0180");
    return "chi2 = 5.6, p = " + fmt("%.6f", res.p_value);
}

// ---------------------------------------------------------------------------
// 3. Wilcoxon exact branch d = [+1, +2, +3].
// ---------------------------------------------------------------------------
std::string criterion_wilcoxon_exact() {
    const PairedTestResult res = wilcoxon_signed_rank({2, 3, 4}, {1, 1, 1});
    require(res.statistic == 0.0, "W not 0");
    require(res.p_value == 0.25, "two-sided exact p not exactly 0.25");
    require(res.method == "wilcoxon-exact", "exact branch not taken");
    return "W = 0, p = 0.25 from the 2^3 enumeration";
}

// ---------------------------------------------------------------------------
// 4. Median properties over all 5^5 = 3125 tuples.
// ---------------------------------------------------------------------------
std::string criterion_median_properties() {
    std::vector<int> tuple(5);
    int checked = 0;
    for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b)
    for (int c = 1; c <= 5; ++c)
    for (int d = 1; d <= 5; ++d)
    for (int e = 1; e <= 5; ++e) {
        tuple = {a, b, c, d, e};
        const int med = median_aggregate(tuple);

        require(std::count(tuple.begin(), tuple.end(), med) > 0,
                "odd-n median must be a member of the tuple");

        std::vector<int> perm = tuple;
        std::sort(perm.begin(), perm.end());
        do {
            if (median_aggregate(perm) != med) {
                throw CriterionFailure("median not permutation-invariant");
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        ++checked;
    }
    require(checked == 3125, "tuple enumeration incomplete");

    for (int x = 1; x <= 5; ++x) {
        require(median_aggregate({4, 4, 4, 4, x}) == 4, "median([4,4,4,4,x]) != 4");
    }
    return "3125 tuples: permutation-invariant, member-of-tuple, outlier-robust";
}

// ---------------------------------------------------------------------------
// 5. CRE selection on well-separated synthetic blobs, 20 seeds.
// ---------------------------------------------------------------------------
std::string criterion_cre_blobs() {
    // 5 isotropic blobs (std 1), centers >= 30 sigma apart, 100 points each.
    const auto blobs = synth::make_blobs(5, 100, 4, 30.0, 777);
    double min_center_dist = 1e300;
    for (std::size_t i = 0; i < blobs.centers.size(); ++i) {
        for (std::size_t j = i + 1; j < blobs.centers.size(); ++j) {
            min_center_dist = std::min(
                min_center_dist,
                std::sqrt(double(simd::squared_l2(blobs.centers[i], blobs.centers[j]))));
        }
    }
    require(min_center_dist >= 20.0, "blob construction violates the 20x separation bound");

    std::vector<Sample> pool;
    for (std::size_t i = 0; i < blobs.points.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "p%04zu", i);
        pool.push_back({id, "t", 1 + int(i % 5), {}, {}});
    }
    std::map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < pool.size(); ++i) index_of[pool[i].id] = i;

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ExampleSet set = select_cre(pool, blobs.points, 5, seed);
        require(set.examples.size() == 5, "wrong exemplar count");

        // exactly one exemplar per ground-truth blob
        std::set<int> covered;
        for (const Sample& e : set.examples) {
            covered.insert(blobs.labels[index_of.at(e.id)]);
        }
        require(covered.size() == 5, "seed " + std::to_string(seed) +
                                         ": exemplars do not cover every ground-truth cluster");

        // every exemplar is the true nearest-to-centroid point of its
        // cluster (brute-force nearest check over the membership)
        for (int c = 0; c < 5; ++c) {
            std::vector<std::size_t> members;
            for (const auto& [id, cluster] : set.cluster_assignments) {
                if (cluster == c) members.push_back(index_of.at(id));
            }
            require(!members.empty(), "empty cluster in CRE assignment");
            EmbeddingVector centroid(4, 0.0f);
            for (const std::size_t m : members) simd::add_inplace(centroid, blobs.points[m]);
            simd::scale_inplace(centroid, 1.0f / float(members.size()));

            std::size_t nearest = members.front();
            double nearest_d = 1e300;
            for (const std::size_t m : members) {
                const double d = double(simd::squared_l2(blobs.points[m], centroid));
                if (d < nearest_d) {
                    nearest_d = d;
                    nearest = m;
                }
            }
            const std::size_t exemplar = index_of.at(set.examples[std::size_t(c)].id);
            require(exemplar == nearest,
                    "seed " + std::to_string(seed) + ": exemplar is not the brute-force nearest");
        }
    }
    return "20 seeds: one exemplar per blob, each the brute-force nearest-to-centroid";
}

// ---------------------------------------------------------------------------
// Shared mock pipeline for criteria 6-8.
// ---------------------------------------------------------------------------
ExperimentConfig mock_pipeline_config(const std::string& corpus, const std::string& out_dir,
                                      Strategy strategy, double noise) {
    ExperimentConfig cfg;
    cfg.corpus_path = corpus;
    cfg.split = SplitSpec{5000, 1000, 20250801};
    cfg.embedder.kind = EmbedderKind::deterministic_test;
    cfg.embedder.dim = 16;
    cfg.strategy = strategy;
    cfg.k = 5;
    cfg.selection_seed = 3;
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.gen.temperature = 1.5;
    cfg.backend.kind = BackendKind::mock;
    cfg.backend.mock_noise_floor = noise;
    cfg.backend.mock_temp_gain = 0.0;
    cfg.out_dir = out_dir;
    return cfg;
}

std::string criterion_pipeline_determinism(const synth::TempDir& dir,
                                           const std::string& corpus) {
    const ExperimentConfig a = mock_pipeline_config(corpus, dir.file("det_a"), Strategy::CRE, 0.35);
    const ExperimentConfig b = mock_pipeline_config(corpus, dir.file("det_b"), Strategy::CRE, 0.35);
    run_pipeline(a);
    run_pipeline(b);

    std::vector<std::string> files = {"records.jsonl", "eval.json", "consistency.json",
                                      "summary.txt", "example_set.json"};
    for (int m = 1; m <= 5; ++m) files.push_back("predictions_M" + std::to_string(m) + ".jsonl");
    for (const std::string& name : files) {
        require(read_file(dir.file("det_a") + "/" + name) ==
                    read_file(dir.file("det_b") + "/" + name),
                name + " differs between identical runs");
    }
    return std::to_string(files.size()) + " artifact files byte-identical across reruns";
}

// Direct Monte Carlo oracle for the criterion-7 margin: 5 independent mock
// models at corruption rate p over uniformly distributed true labels,
// median-aggregated. Implemented with std::mt19937_64 and its own median,
// sharing nothing with the pipeline under test.
double oracle_margin_pp(double p, int reps) {
    std::mt19937_64 gen(987654321);
    std::uniform_int_distribution<int> label_dist(1, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> other(0, 3);

    long long ens_correct = 0, base_correct = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const int truth = label_dist(gen);
        int ratings[5];
        for (int m = 0; m < 5; ++m) {
            if (unit(gen) < p) {
                int candidates[4];
                int idx = 0;
                for (int l = 1; l <= 5; ++l) {
                    if (l != truth) candidates[idx++] = l;
                }
                ratings[m] = candidates[other(gen)];
            } else {
                ratings[m] = truth;
            }
            if (ratings[m] == truth) ++base_correct;
        }
        std::sort(ratings, ratings + 5);
        if (ratings[2] == truth) ++ens_correct;
    }
    const double ens_acc = double(ens_correct) / reps;
    const double base_acc = double(base_correct) / (5.0 * reps);
    return (ens_acc - base_acc) * 100.0;
}

struct MockRunStats {
    double ens_acc = 0;
    double mean_base_acc = 0;
    double margin_pp = 0;
    PairedTestResult mcnemar_vs_median_base;
    LoadedRun run;
};

MockRunStats analyze_mock_run(const std::string& run_dir) {
    MockRunStats out;
    out.run = load_run(run_dir);
    const RunEval eval = evaluate_run(out.run);

    std::vector<std::pair<double, std::string>> base;
    for (const auto& [id, report] : eval.per_model) {
        base.emplace_back(report.accuracy, id);
        out.mean_base_acc += report.accuracy / double(eval.per_model.size());
    }
    out.ens_acc = eval.ensemble.accuracy;
    out.margin_pp = (out.ens_acc - out.mean_base_acc) * 100.0;

    // base model with the median accuracy
    std::sort(base.begin(), base.end());
    const std::string median_base = base[base.size() / 2].second;

    std::vector<bool> ens_correct, base_model_correct;
    for (const EnsembleRecord& rec : out.run.records) {
        const int truth = out.run.truth.at(rec.sample_id);
        const auto it = rec.per_model.find(median_base);
        if (!rec.median_rating || it == rec.per_model.end() ||
            it->second.status != PredictionStatus::ok) {
            continue;
        }
        ens_correct.push_back(*rec.median_rating == truth);
        base_model_correct.push_back(*it->second.rating == truth);
    }
    out.mcnemar_vs_median_base = mcnemar(ens_correct, base_model_correct);
    return out;
}

std::string criterion_ensemble_lift(const MockRunStats& stats) {
    const double oracle_pp = oracle_margin_pp(0.35, 400000);

    require(stats.margin_pp >= 5.0,
            "ensemble margin " + fmt("%.2f", stats.margin_pp) + "pp below 5pp");
    require(std::abs(stats.margin_pp - oracle_pp) <= 2.0,
            "margin " + fmt("%.2f", stats.margin_pp) + "pp not within 2pp of oracle " +
                fmt("%.2f", oracle_pp) + "pp");
    require(stats.mcnemar_vs_median_base.p_value < 0.01,
            "McNemar ensemble-vs-median-base p = " +
                fmt("%.4g", stats.mcnemar_vs_median_base.p_value) + " not < 0.01");

    return "margin " + fmt("%.2f", stats.margin_pp) + "pp (oracle " + fmt("%.2f", oracle_pp) +
           "pp), McNemar p = " + fmt("%.3g", stats.mcnemar_vs_median_base.p_value);
}

std::string criterion_consistency_monotonicity(const MockRunStats& stats) {
    std::vector<EnsembleRecord> valid;
    for (const EnsembleRecord& r : stats.run.records) {
        if (r.median_rating) valid.push_back(r);
    }
    const ConsistencyReport report = stratify_by_consistency(valid, stats.run.truth, 5);

    const ConsistencyStratum& unanimous = report.per_stratum.at(1);
    require(unanimous.count > 0, "no unanimous stratum in the mock run");
    require(unanimous.accuracy.has_value(), "unanimous stratum lacks accuracy");

    std::size_t pooled_n = 0, pooled_correct = 0;
    for (const EnsembleRecord& r : valid) {
        if (r.n_unique < 3) continue;
        ++pooled_n;
        if (*r.median_rating == stats.run.truth.at(r.sample_id)) ++pooled_correct;
    }
    require(pooled_n > 0, "no low-consistency stratum in the mock run");
    const double pooled_acc = double(pooled_correct) / double(pooled_n);

    require(*unanimous.accuracy > pooled_acc,
            "accuracy not monotone: stratum1 " + fmt("%.3f", *unanimous.accuracy) +
                " <= strata>=3 " + fmt("%.3f", pooled_acc));
    return "acc(n_unique=1) = " + fmt("%.3f", *unanimous.accuracy) +
           " > acc(n_unique>=3) = " + fmt("%.3f", pooled_acc);
}

// ---------------------------------------------------------------------------
// 9. K-means invariants: inertia monotone, permutation invariance.
// ---------------------------------------------------------------------------
std::string criterion_kmeans_invariants() {
    SplitMix64 rng(13131);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 30 + int(rng.bounded(120));
        const int dim = 2 + int(rng.bounded(8));
        std::vector<EmbeddingVector> vectors;
        for (int i = 0; i < n; ++i) {
            EmbeddingVector v(static_cast<std::size_t>(dim));
            for (auto& x : v) x = float(rng.u01() * 20.0 - 10.0);
            vectors.push_back(std::move(v));
        }
        const int k = 2 + int(rng.bounded(6));
        const KMeansResult km = kmeans(vectors, k, rng.next());
        for (std::size_t i = 1; i < km.inertia_trace.size(); ++i) {
            require(km.inertia_trace[i] <= km.inertia_trace[i - 1] + 1e-9,
                    "inertia increased between iterations");
        }
    }

    // permutation invariance after id-canonicalization
    SplitMix64 prng(999);
    for (int trial = 0; trial < 10; ++trial) {
        const auto blobs = synth::make_blobs(4, 30, 3, 12.0, 500 + std::uint64_t(trial));
        std::vector<Sample> pool;
        for (std::size_t i = 0; i < blobs.points.size(); ++i) {
            pool.push_back({"s" + std::to_string(1000 + i), "t", 1 + int(i % 5), {}, {}});
        }
        const ExampleSet base = select_cre(pool, blobs.points, 4, 77);

        std::vector<std::size_t> perm(pool.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        prng.shuffle(perm);
        std::vector<Sample> pool2;
        std::vector<EmbeddingVector> vecs2;
        for (const std::size_t i : perm) {
            pool2.push_back(pool[i]);
            vecs2.push_back(blobs.points[i]);
        }
        const ExampleSet shuffled = select_cre(pool2, vecs2, 4, 77);

        require(base.examples.size() == shuffled.examples.size(), "exemplar count changed");
        for (std::size_t i = 0; i < base.examples.size(); ++i) {
            require(base.examples[i].id == shuffled.examples[i].id,
                    "exemplars differ across input permutations");
        }
        require(base.cluster_assignments == shuffled.cluster_assignments,
                "assignments differ across input permutations");
    }
    return "50 traces non-increasing; 10 permuted pools select identically";
}

// ---------------------------------------------------------------------------
// 10. Wire-contract conformance against a stub completion server.
// ---------------------------------------------------------------------------
std::string criterion_wire_contract() {
    httplib::Server server;
    std::atomic<int> requests{0};
    std::atomic<int> violations{0};
    std::mutex mu;
    std::map<long long, int> per_seed;
    std::string first_violation;

    server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
        ++requests;
        const json body = json::parse(req.body, nullptr, false);
        const auto violate = [&](const std::string& why) {
            ++violations;
            std::lock_guard lock(mu);
            if (first_violation.empty()) first_violation = why;
        };
        if (body.is_discarded()) {
            violate("unparseable body");
        } else {
            if (!body.contains("max_tokens") || body["max_tokens"] != 1) violate("max_tokens != 1");
            if (!body.contains("temperature") || body["temperature"] != 1.5) {
                violate("temperature != 1.5");
            }
            if (!body.contains("top_p") || body["top_p"] != 0.9) violate("top_p != 0.9");
            if (!body.contains("seed") || !body["seed"].is_number_integer()) {
                violate("seed missing");
            } else {
                const long long seed = body["seed"].get<long long>();
                if (seed < 1 || seed > 5) {
                    violate("seed out of the configured range");
                } else {
                    std::lock_guard lock(mu);
                    ++per_seed[seed];
                }
            }
            if (!body.contains("prompt") || !body["prompt"].is_string()) violate("prompt missing");
            if (!body.contains("model") || body["model"] != "stub-model") violate("model missing");
        }
        res.set_content(json{{"choices", {{{"text", "3"}}}}}.dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::string result;
    try {
        const auto pool = synth::make_corpus(5, 321);
        const auto test = synth::make_corpus(50, 322);

        EnsembleConfig cfg;
        cfg.n_models = 5;
        cfg.example_set.strategy = Strategy::RSE;
        cfg.example_set.k = 5;
        cfg.example_set.seed = 1;
        for (const Sample& s : pool) cfg.example_set.examples.push_back(s);
        cfg.seeds = {1, 2, 3, 4, 5};
        cfg.params.temperature = 1.5;
        cfg.params.top_p = 0.9;
        cfg.params.max_new_tokens = 1;
        cfg.prompt_template = default_template();

        RemoteSpec remote;
        remote.endpoint = "http://127.0.0.1:" + std::to_string(port);
        remote.model_name = "stub-model";
        remote.backoff_base_ms = 1;
        HttpBackend backend(remote);

        EnsembleRunOptions opts;
        opts.max_in_flight = 4;
        const EnsembleRunResult run = run_ensemble(cfg, test, backend, opts);

        int ok = 0;
        for (const EnsembleRecord& rec : run.records) {
            for (const auto& [id, pred] : rec.per_model) {
                if (pred.status == PredictionStatus::ok) ++ok;
            }
        }
        require(ok == 250, "expected 250 ok predictions, got " + std::to_string(ok));
        require(requests.load() == 250, "expected 250 requests, got " +
                                            std::to_string(requests.load()));
        require(violations.load() == 0, "wire violations: " + first_violation);
        {
            std::lock_guard lock(mu);
            for (long long seed = 1; seed <= 5; ++seed) {
                require(per_seed[seed] == 50,
                        "seed " + std::to_string(seed) + " not used exactly 50 times");
            }
        }
        result = "250/250 ok; max_tokens=1, temperature/top_p/seed transmitted exactly";
    } catch (...) {
        server.stop();
        listener.join();
        throw;
    }
    server.stop();
    listener.join();
    return result;
}

}  // namespace

int main() {
    synth::TempDir scratch("acceptance");
    const std::string corpus = scratch.file("corpus.jsonl");
    synth::write_corpus_jsonl(synth::make_corpus(6000, 31337), corpus);

    // Criteria 7 and 8 share one mock run at corruption rate 0.35.
    MockRunStats mock_stats;
    const auto prepare_mock_run = [&]() {
        const ExperimentConfig cfg =
            mock_pipeline_config(corpus, scratch.file("mock_run"), Strategy::RSE, 0.35);
        run_pipeline(cfg);
        mock_stats = analyze_mock_run(cfg.out_dir);
    };

    struct Criterion {
        int id;
        std::string name;
        std::function<std::string()> fn;
        double max_seconds = 0.0;  // 0 = unbounded
    };
    const std::vector<Criterion> criteria = {
        {1, "metric oracle equivalence", criterion_metric_oracles, 10.0},
        {2, "McNemar spot value", criterion_mcnemar_spot, 0.0},
        {3, "Wilcoxon exact branch", criterion_wilcoxon_exact, 0.0},
        {4, "median aggregation properties", criterion_median_properties, 1.0},
        {5, "CRE selection on synthetic blobs", criterion_cre_blobs, 5.0},
        {6, "pipeline determinism",
         [&] { return criterion_pipeline_determinism(scratch, corpus); }, 0.0},
        {7, "ensemble lift over base models",
         [&] {
             prepare_mock_run();
             return criterion_ensemble_lift(mock_stats);
         },
         0.0},
        {8, "consistency stratification monotonicity",
         [&] { return criterion_consistency_monotonicity(mock_stats); }, 0.0},
        {9, "k-means invariants", criterion_kmeans_invariants, 10.0},
        {10, "wire-contract conformance", criterion_wire_contract, 0.0},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = criterion.fn();
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (pass && criterion.max_seconds > 0.0 && elapsed > criterion.max_seconds) {
            pass = false;
            detail = "exceeded " + fmt("%.0f", criterion.max_seconds) + "s runtime bound (" +
                     fmt("%.1f", elapsed) + "s)";
        }
        if (!pass) ++failures;
        std::printf("criterion %2d %s: %s -- %s (%.2fs)\n", criterion.id,
                    pass ? "PASS" : "FAIL", criterion.name.c_str(), detail.c_str(), elapsed);
        std::fflush(stdout);
    }

    if (failures > 0) {
        std::printf("%d criterion(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
