#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "llmens/dataset.hpp"
#include "llmens/embedding.hpp"

namespace llmens {

enum class Strategy { CRE, RSE };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// The K selected one-shot exemplars plus provenance. CRE examples are
// ordered by ascending cluster index (one per cluster); RSE examples are in
// draw order. Example i is paired with model M(i+1) and seed i+1 downstream.
struct ExampleSet {
    Strategy strategy = Strategy::RSE;
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<Sample> examples;
    std::map<std::string, int> cluster_assignments;  // sample id -> cluster, CRE only
};

struct KMeansResult {
    std::vector<EmbeddingVector> centroids;  // size k, no empty cluster
    std::vector<int> assignments;            // size n, values in [0, k)
    double inertia = 0.0;                    // sum of squared distances to assigned centroid
    int iterations = 0;
    std::vector<double> inertia_trace;       // per-iteration inertia, non-increasing
};

// Lloyd's algorithm with greedy k-means++ seeding (2 + floor(log k) local
// trials per step), Euclidean metric, splitmix64-v1 randomness. Converges
// when max centroid displacement < 1e-6 and assignments are stable, or at
// 300 iterations. Distance ties assign to the lowest cluster index; empty
// clusters are repaired by moving the point farthest from its assigned
// centroid (ties: smallest point index). Deterministic for fixed
// (vectors, k, seed).
KMeansResult kmeans(const std::vector<EmbeddingVector>& vectors, int k, std::uint64_t seed);

// Centroid-based representative examples: cluster the pool embeddings with
// k-means (K = k) and take each cluster's member nearest to the centroid
// (Euclidean; ties broken by lexicographically smallest sample id).
// Pool order does not matter: samples are canonicalized by id before any
// seeded step, so shuffled pools select identical exemplars.
ExampleSet select_cre(const std::vector<Sample>& pool,
                      const std::vector<EmbeddingVector>& vectors, int k, std::uint64_t seed);

// Random baseline: uniform sample without replacement (splitmix64-v1 partial
// Fisher-Yates over the id-canonicalized pool), in draw order.
ExampleSet select_rse(const std::vector<Sample>& pool, int k, std::uint64_t seed);

// Counts over labels {1..5}, zeros included.
std::map<int, int> label_histogram(const ExampleSet& set);

}  // namespace llmens
