#include "llmens/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "llmens/error.hpp"
#include "llmens/rng.hpp"
#include "llmens/simd/kernels.hpp"

namespace llmens {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kDisplacementTol = 1e-6;

struct AssignOut {
    std::vector<int> assignment;
    std::vector<double> dist2;  // to assigned centroid
};

AssignOut assign_points(const std::vector<EmbeddingVector>& vectors,
                        const std::vector<EmbeddingVector>& centroids) {
    AssignOut out;
    out.assignment.resize(vectors.size());
    out.dist2.resize(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        int best = 0;
        float best_d = simd::squared_l2(vectors[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const float d = simd::squared_l2(vectors[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        out.assignment[i] = best;
        out.dist2[i] = static_cast<double>(best_d);
    }
    return out;
}

// Moves the point farthest from its assigned centroid (among clusters that
// can spare one) into each empty cluster. Returns true if anything moved.
bool repair_empty_clusters(AssignOut& a, int k) {
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int c : a.assignment) ++sizes[static_cast<std::size_t>(c)];

    bool moved = false;
    for (int empty = 0; empty < k; ++empty) {
        if (sizes[static_cast<std::size_t>(empty)] > 0) continue;
        std::size_t donor = a.assignment.size();
        double donor_d = -1.0;
        for (std::size_t i = 0; i < a.assignment.size(); ++i) {
            if (sizes[static_cast<std::size_t>(a.assignment[i])] < 2) continue;
            if (a.dist2[i] > donor_d) {
                donor_d = a.dist2[i];
                donor = i;
            }
        }
        if (donor == a.assignment.size()) break;  // k > n cannot happen; all singletons
        --sizes[static_cast<std::size_t>(a.assignment[donor])];
        a.assignment[donor] = empty;
        a.dist2[donor] = 0.0;  // its centroid becomes the point itself
        ++sizes[static_cast<std::size_t>(empty)];
        moved = true;
    }
    return moved;
}

std::vector<EmbeddingVector> compute_means(const std::vector<EmbeddingVector>& vectors,
                                           const std::vector<int>& assignment, int k) {
    const std::size_t dim = vectors.front().size();
    std::vector<EmbeddingVector> means(static_cast<std::size_t>(k), EmbeddingVector(dim, 0.0f));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        simd::add_inplace(means[static_cast<std::size_t>(assignment[i])], vectors[i]);
        ++counts[static_cast<std::size_t>(assignment[i])];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
            simd::scale_inplace(means[static_cast<std::size_t>(c)],
                                1.0f / static_cast<float>(counts[static_cast<std::size_t>(c)]));
        }
    }
    return means;
}

// Greedy k-means++: each new centroid is the best of a few D^2-weighted
// candidates, judged by the total potential it would leave.
std::vector<EmbeddingVector> kmeanspp_init(const std::vector<EmbeddingVector>& vectors, int k,
                                           SplitMix64& rng) {
    const std::size_t n = vectors.size();
    std::vector<EmbeddingVector> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    std::vector<bool> chosen(n, false);

    const std::size_t first = static_cast<std::size_t>(rng.bounded(n));
    centroids.push_back(vectors[first]);
    chosen[first] = true;

    std::vector<double> d2(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d2[i] = static_cast<double>(simd::squared_l2(vectors[i], centroids[0]));
        total += d2[i];
    }

    const int n_trials = 2 + static_cast<int>(std::floor(std::log(static_cast<double>(k))));
    std::vector<double> cand_d2(n);
    std::vector<double> best_d2(n);

    for (int j = 1; j < k; ++j) {
        std::size_t best_idx = n;
        double best_pot = std::numeric_limits<double>::infinity();

        if (total <= 0.0) {
            // All remaining mass sits on already-chosen positions (duplicate
            // points). Fall back to the first unchosen index.
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    best_idx = i;
                    best_d2 = d2;  // unchanged; candidate coincides with a centroid
                    break;
                }
            }
        } else {
            for (int t = 0; t < n_trials; ++t) {
                const double r = rng.u01() * total;
                double cum = 0.0;
                std::size_t cand = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    cum += d2[i];
                    if (r < cum) {
                        cand = i;
                        break;
                    }
                }
                double pot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    cand_d2[i] = std::min(
                        d2[i], static_cast<double>(simd::squared_l2(vectors[i], vectors[cand])));
                    pot += cand_d2[i];
                }
                if (pot < best_pot) {
                    best_pot = pot;
                    best_idx = cand;
                    best_d2 = cand_d2;
                }
            }
            total = best_pot;
        }

        centroids.push_back(vectors[best_idx]);
        chosen[best_idx] = true;
        d2 = best_d2;
    }
    return centroids;
}

std::vector<std::size_t> order_by_id(const std::vector<Sample>& pool) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pool[a].id < pool[b].id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (pool[order[i - 1]].id == pool[order[i]].id) {
            throw validation_error("duplicate sample id in pool: " + pool[order[i]].id);
        }
    }
    return order;
}

}  // namespace

const char* strategy_name(Strategy s) { return s == Strategy::CRE ? "cre" : "rse"; }

Strategy strategy_from_name(const std::string& name) {
    if (name == "cre") return Strategy::CRE;
    if (name == "rse") return Strategy::RSE;
    throw validation_error("unknown strategy '" + name + "' (expected cre or rse)");
}

KMeansResult kmeans(const std::vector<EmbeddingVector>& vectors, int k, std::uint64_t seed) {
    if (k <= 0) throw validation_error("kmeans: k must be positive");
    if (vectors.size() < static_cast<std::size_t>(k)) {
        throw validation_error("kmeans: need at least k=" + std::to_string(k) + " vectors, got " +
                               std::to_string(vectors.size()));
    }
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != dim) throw validation_error("kmeans: ragged dimensions");
    }

    SplitMix64 rng(seed);
    KMeansResult res;
    res.centroids = kmeanspp_init(vectors, k, rng);

    std::vector<int> prev_assignment;
    AssignOut a;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        a = assign_points(vectors, res.centroids);
        res.inertia_trace.push_back(std::accumulate(a.dist2.begin(), a.dist2.end(), 0.0));
        repair_empty_clusters(a, k);

        auto means = compute_means(vectors, a.assignment, k);
        double max_disp2 = 0.0;
        for (int c = 0; c < k; ++c) {
            max_disp2 = std::max(max_disp2, static_cast<double>(simd::squared_l2(
                                                res.centroids[static_cast<std::size_t>(c)],
                                                means[static_cast<std::size_t>(c)])));
        }
        res.centroids = std::move(means);
        res.iterations = iter;

        const bool converged =
            std::sqrt(max_disp2) < kDisplacementTol && a.assignment == prev_assignment;
        prev_assignment = a.assignment;
        if (converged) break;
    }

    res.assignments = std::move(a.assignment);
    double inertia = 0.0;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        inertia += static_cast<double>(simd::squared_l2(
            vectors[i], res.centroids[static_cast<std::size_t>(res.assignments[i])]));
    }
    res.inertia = inertia;
    res.inertia_trace.push_back(inertia);
    return res;
}

ExampleSet select_cre(const std::vector<Sample>& pool, const std::vector<EmbeddingVector>& vectors,
                      int k, std::uint64_t seed) {
    if (pool.size() != vectors.size()) {
        throw validation_error("select_cre: pool and vectors must align positionally");
    }
    const auto order = order_by_id(pool);

    std::vector<EmbeddingVector> canon(vectors.size());
    for (std::size_t i = 0; i < order.size(); ++i) canon[i] = vectors[order[i]];

    const KMeansResult km = kmeans(canon, k, seed);

    // Nearest member per cluster; canonical order makes "first strictly
    // better" equivalent to the smallest-id tie rule.
    std::vector<std::size_t> best(static_cast<std::size_t>(k), canon.size());
    std::vector<double> best_d(static_cast<std::size_t>(k),
                               std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < canon.size(); ++i) {
        const auto c = static_cast<std::size_t>(km.assignments[i]);
        const double d = static_cast<double>(simd::squared_l2(canon[i], km.centroids[c]));
        if (d < best_d[c]) {
            best_d[c] = d;
            best[c] = i;
        }
    }

    ExampleSet set;
    set.strategy = Strategy::CRE;
    set.k = k;
    set.seed = seed;
    for (int c = 0; c < k; ++c) {
        set.examples.push_back(pool[order[best[static_cast<std::size_t>(c)]]]);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        set.cluster_assignments[pool[order[i]].id] = km.assignments[i];
    }
    return set;
}

ExampleSet select_rse(const std::vector<Sample>& pool, int k, std::uint64_t seed) {
    if (k <= 0) throw validation_error("select_rse: k must be positive");
    if (pool.size() < static_cast<std::size_t>(k)) {
        throw validation_error("select_rse: pool smaller than k");
    }
    const auto order = order_by_id(pool);

    SplitMix64 rng(seed);
    const auto draws = rng.sample_indices(pool.size(), static_cast<std::size_t>(k));

    ExampleSet set;
    set.strategy = Strategy::RSE;
    set.k = k;
    set.seed = seed;
    for (std::size_t d : draws) set.examples.push_back(pool[order[d]]);
    return set;
}

std::map<int, int> label_histogram(const ExampleSet& set) {
    std::map<int, int> hist;
    for (int label = 1; label <= 5; ++label) hist[label] = 0;
    for (const Sample& s : set.examples) ++hist[s.label];
    return hist;
}

}  // namespace llmens
