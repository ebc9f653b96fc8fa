// Synthetic review corpus generator for offline experiments with the mock
// backend. Texts are nonsense but deterministic, labels follow either a
// uniform or a positive-skewed distribution (the latter roughly mirrors
// real review sites).
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "llmens/io.hpp"
#include "llmens/rng.hpp"

using nlohmann::json;

namespace {

const std::vector<std::string> kWords = {
    "food",   "service", "table",  "menu",   "staff",  "order",  "place",   "time",
    "lunch",  "dinner",  "drink",  "price",  "taste",  "dish",   "waiter",  "plate",
    "salad",  "pasta",   "pizza",  "coffee", "dessert","bread",  "sauce",   "grill",
    "fresh",  "warm",    "cold",   "slow",   "fast",   "busy",   "quiet",   "clean"};

const std::vector<std::vector<std::string>> kToneWords = {
    {"awful", "terrible", "worst", "disgusting"},
    {"bad", "poor", "disappointing", "bland"},
    {"okay", "average", "fine", "decent"},
    {"good", "tasty", "friendly", "pleasant"},
    {"great", "excellent", "amazing", "perfect"}};

int draw_label(llmens::SplitMix64& rng, bool skew) {
    if (!skew) return 1 + static_cast<int>(rng.bounded(5));
    // roughly review-site shaped: more 4s and 5s than 1s and 2s
    const double u = rng.u01();
    if (u < 0.10) return 1;
    if (u < 0.20) return 2;
    if (u < 0.35) return 3;
    if (u < 0.65) return 4;
    return 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic JSONL review corpus"};
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    std::string out;
    bool skew = false;
    app.add_option("--n", n, "number of reviews");
    app.add_option("--seed", seed, "generator seed");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_flag("--positive-skew", skew, "skew labels toward 4-5 stars");
    CLI11_PARSE(app, argc, argv);

    llmens::SplitMix64 rng(seed);
    std::string buffer;
    for (std::size_t i = 0; i < n; ++i) {
        const int label = draw_label(rng, skew);
        const std::size_t words = 5 + rng.bounded(30);
        std::string text;
        for (std::size_t w = 0; w < words; ++w) {
            if (!text.empty()) text += ' ';
            // tone words tie text content to the label so embedding-based
            // selection has structure to find
            if (rng.u01() < 0.3) {
                const auto& tone = kToneWords[static_cast<std::size_t>(label - 1)];
                text += tone[rng.bounded(tone.size())];
            } else {
                text += kWords[rng.bounded(kWords.size())];
            }
        }
        char id[24], user[24], venue[24];
        std::snprintf(id, sizeof(id), "s%06zu", i);
        std::snprintf(user, sizeof(user), "u%04llu",
                      static_cast<unsigned long long>(rng.bounded(n / 3 + 1)));
        std::snprintf(venue, sizeof(venue), "b%03llu",
                      static_cast<unsigned long long>(rng.bounded(97)));
        json row{{"id", id},       {"text", text},        {"stars", label},
                 {"user_id", user}, {"business_id", venue}, {"categories", "Restaurants, Food"}};
        buffer += row.dump();
        buffer += '\n';
    }

    if (out.empty()) {
        std::cout << buffer;
    } else {
        llmens::atomic_write_file(out, buffer);
        std::cerr << "wrote " << n << " reviews to " << out << "\n";
    }
    return 0;
}
