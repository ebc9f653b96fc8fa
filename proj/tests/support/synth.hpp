#pragma once

// Test data builders: Gaussian blob embeddings, random label vectors,
// synthetic corpora, scratch directories.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmens/dataset.hpp"
#include "llmens/embedding.hpp"
#include "llmens/io.hpp"
#include "llmens/rng.hpp"
#include "llmens/serialization.hpp"

namespace synth {

inline double gaussian(llmens::SplitMix64& rng) {
    // Box-Muller; one value per call is plenty for tests
    const double u1 = std::max(rng.u01(), 1e-12);
    const double u2 = rng.u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct Blobs {
    std::vector<llmens::EmbeddingVector> points;
    std::vector<int> labels;  // ground-truth blob index
    std::vector<llmens::EmbeddingVector> centers;
};

// `k` isotropic Gaussian blobs (std 1) with centers `separation` apart
// along distinct axes, `per_blob` points each.
inline Blobs make_blobs(int k, int per_blob, int dim, double separation,
                        std::uint64_t seed) {
    llmens::SplitMix64 rng(seed);
    Blobs out;
    for (int c = 0; c < k; ++c) {
        llmens::EmbeddingVector center(dim, 0.0f);
        center[c % dim] = float(separation * (1 + c / dim));
        if (c % 2 == 1) center[c % dim] *= -1.0f;
        out.centers.push_back(center);
    }
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < per_blob; ++i) {
            llmens::EmbeddingVector p(dim);
            for (int d = 0; d < dim; ++d) {
                p[d] = out.centers[c][d] + float(gaussian(rng));
            }
            out.points.push_back(std::move(p));
            out.labels.push_back(c);
        }
    }
    return out;
}

inline std::vector<int> random_labels(std::size_t n, llmens::SplitMix64& rng) {
    std::vector<int> v(n);
    for (auto& x : v) x = 1 + int(rng.bounded(5));
    return v;
}

inline std::vector<llmens::Sample> make_corpus(std::size_t n, std::uint64_t seed) {
    llmens::SplitMix64 rng(seed);
    std::vector<llmens::Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        llmens::Sample s;
        char id[24];
        std::snprintf(id, sizeof(id), "s%06zu", i);
        s.id = id;
        s.label = 1 + int(rng.bounded(5));
        s.text = "review " + std::to_string(rng.next() % 100000) + " stars " +
                 std::to_string(s.label);
        samples.push_back(std::move(s));
    }
    return samples;
}

inline void write_corpus_jsonl(const std::vector<llmens::Sample>& samples,
                               const std::string& path) {
    std::string content;
    for (const llmens::Sample& s : samples) {
        content += nlohmann::json(s).dump();
        content += '\n';
    }
    llmens::atomic_write_file(path, content);
}

// Fresh scratch directory under the system temp dir.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("llmens_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++)))
                    .string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const {
        return (std::filesystem::path(path_) / name).string();
    }

  private:
    std::string path_;
};

}  // namespace synth
