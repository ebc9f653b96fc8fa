#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace llmens {

// One labeled review. `label` is the star rating in {1..5}.
struct Sample {
    std::string id;
    std::string text;
    int label = 0;
    std::optional<std::string> user_id;
    std::optional<std::string> venue_id;
};

struct SplitSpec {
    std::size_t pool_size = 0;
    std::size_t test_size = 0;
    std::uint64_t seed = 0;
};

struct CorpusStats {
    std::size_t n = 0;
    std::size_t n_users = 0;
    std::size_t n_venues = 0;
    double rating_mean = 0.0;
    double rating_std = 0.0;
    double chars_mean = 0.0;
    double chars_std = 0.0;
};

struct LoadResult {
    std::vector<Sample> samples;
    std::size_t rejected = 0;  // parseable rows dropped for invalid stars / empty text
};

// Reads a JSON Lines corpus. Each line: {"id"?, "text", "stars", "user_id"?,
// "business_id"?, "categories"?}. Missing ids are synthesized from the
// 1-based line number. Structurally malformed lines (bad JSON, missing or
// non-string/non-numeric required keys) abort with the line number; rows
// whose stars are not exactly an integer in {1..5} or whose text is empty
// after whitespace trim are skipped and counted in LoadResult::rejected.
// `filter_category` keeps only rows whose `categories` string contains the
// given category as a substring.
LoadResult load_corpus(const std::string& path,
                       const std::optional<std::string>& filter_category = std::nullopt);

// Seeded Fisher-Yates shuffle (splitmix64-v1), then prefix partition:
// first pool_size samples -> pool, next test_size -> test.
std::pair<std::vector<Sample>, std::vector<Sample>> split_corpus(const std::vector<Sample>& samples,
                                                                 const SplitSpec& spec);

// Means and sample standard deviations (n-1 divisor; n == 1 reports 0).
// Character counts are Unicode scalar counts of the raw text.
CorpusStats summarize(const std::vector<Sample>& samples);

// Unicode scalar count of UTF-8 text (continuation bytes not counted).
std::size_t count_codepoints(const std::string& text);

}  // namespace llmens
