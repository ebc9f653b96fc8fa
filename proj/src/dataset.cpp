#include "llmens/dataset.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "llmens/error.hpp"
#include "llmens/rng.hpp"

namespace llmens {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(begin, end - begin + 1);
}

// Exact integer match: accepts 4 and 4.0, rejects 3.5 and "4".
std::optional<int> exact_int(const json& v) {
    if (v.is_number_integer()) return v.get<long long>() >= INT32_MIN && v.get<long long>() <= INT32_MAX
                                          ? std::optional<int>(static_cast<int>(v.get<long long>()))
                                          : std::nullopt;
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    return std::nullopt;
}

}  // namespace

std::size_t count_codepoints(const std::string& text) {
    std::size_t n = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

LoadResult load_corpus(const std::string& path, const std::optional<std::string>& filter_category) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open corpus file: " + path);

    LoadResult result;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;

        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            throw data_error(path + ":" + std::to_string(line_no) + ": malformed JSON line");
        }
        if (!row.contains("text") || !row["text"].is_string()) {
            throw data_error(path + ":" + std::to_string(line_no) + ": missing string key 'text'");
        }
        if (!row.contains("stars") || !row["stars"].is_number()) {
            throw data_error(path + ":" + std::to_string(line_no) + ": missing numeric key 'stars'");
        }

        if (filter_category) {
            std::string cats;
            if (row.contains("categories") && row["categories"].is_string()) {
                cats = row["categories"].get<std::string>();
            }
            if (cats.find(*filter_category) == std::string::npos) continue;
        }

        Sample s;
        s.text = row["text"].get<std::string>();
        const auto stars = exact_int(row["stars"]);
        if (!stars || *stars < 1 || *stars > 5 || trimmed(s.text).empty()) {
            ++result.rejected;
            continue;
        }
        s.label = *stars;
        if (row.contains("id") && row["id"].is_string()) {
            s.id = row["id"].get<std::string>();
        } else {
            s.id = std::to_string(line_no);
        }
        if (row.contains("user_id") && row["user_id"].is_string()) {
            s.user_id = row["user_id"].get<std::string>();
        }
        if (row.contains("business_id") && row["business_id"].is_string()) {
            s.venue_id = row["business_id"].get<std::string>();
        }
        if (!seen_ids.insert(s.id).second) {
            throw data_error(path + ":" + std::to_string(line_no) + ": duplicate sample id '" +
                             s.id + "'");
        }
        result.samples.push_back(std::move(s));
    }
    return result;
}

std::pair<std::vector<Sample>, std::vector<Sample>> split_corpus(const std::vector<Sample>& samples,
                                                                 const SplitSpec& spec) {
    if (spec.pool_size == 0 || spec.test_size == 0) {
        throw validation_error("split sizes must be positive");
    }
    if (spec.pool_size + spec.test_size > samples.size()) {
        throw validation_error("split needs " + std::to_string(spec.pool_size + spec.test_size) +
                               " samples, corpus has " + std::to_string(samples.size()));
    }
    std::vector<Sample> shuffled = samples;
    SplitMix64 rng(spec.seed);
    rng.shuffle(shuffled);

    std::vector<Sample> pool(shuffled.begin(), shuffled.begin() + spec.pool_size);
    std::vector<Sample> test(shuffled.begin() + spec.pool_size,
                             shuffled.begin() + spec.pool_size + spec.test_size);
    return {std::move(pool), std::move(test)};
}

CorpusStats summarize(const std::vector<Sample>& samples) {
    if (samples.empty()) throw validation_error("summarize: empty sample list");

    CorpusStats st;
    st.n = samples.size();

    std::unordered_set<std::string> users, venues;
    double rating_sum = 0.0, chars_sum = 0.0;
    for (const Sample& s : samples) {
        rating_sum += s.label;
        chars_sum += static_cast<double>(count_codepoints(s.text));
        if (s.user_id) users.insert(*s.user_id);
        if (s.venue_id) venues.insert(*s.venue_id);
    }
    st.n_users = users.size();
    st.n_venues = venues.size();

    const double n = static_cast<double>(st.n);
    st.rating_mean = rating_sum / n;
    st.chars_mean = chars_sum / n;

    if (st.n > 1) {
        double rating_ss = 0.0, chars_ss = 0.0;
        for (const Sample& s : samples) {
            const double dr = s.label - st.rating_mean;
            const double dc = static_cast<double>(count_codepoints(s.text)) - st.chars_mean;
            rating_ss += dr * dr;
            chars_ss += dc * dc;
        }
        st.rating_std = std::sqrt(rating_ss / (n - 1.0));
        st.chars_std = std::sqrt(chars_ss / (n - 1.0));
    }
    return st;
}

}  // namespace llmens
