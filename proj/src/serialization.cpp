#include "llmens/serialization.hpp"

#include "llmens/error.hpp"

namespace llmens {

using nlohmann::json;

void to_json(json& j, const Sample& s) {
    j = json{{"id", s.id}, {"text", s.text}, {"stars", s.label}};
    if (s.user_id) j["user_id"] = *s.user_id;
    if (s.venue_id) j["business_id"] = *s.venue_id;
}

void from_json(const json& j, Sample& s) {
    s.id = j.at("id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    s.label = j.at("stars").get<int>();
    if (j.contains("user_id")) s.user_id = j.at("user_id").get<std::string>();
    if (j.contains("business_id")) s.venue_id = j.at("business_id").get<std::string>();
}

void to_json(json& j, const CorpusStats& st) {
    j = json{{"n", st.n},
             {"n_users", st.n_users},
             {"n_venues", st.n_venues},
             {"rating_mean", st.rating_mean},
             {"rating_std", st.rating_std},
             {"chars_mean", st.chars_mean},
             {"chars_std", st.chars_std}};
}

void to_json(json& j, const Prediction& p) {
    j = json{{"model_id", p.model_id},
             {"sample_id", p.sample_id},
             {"raw_token", p.raw_token},
             {"status", p.status == PredictionStatus::ok ? "ok" : "parse_failure"},
             {"attempts", p.attempts}};
    if (p.rating) {
        j["rating"] = *p.rating;
    } else {
        j["rating"] = nullptr;
    }
}

void from_json(const json& j, Prediction& p) {
    p.model_id = j.at("model_id").get<std::string>();
    p.sample_id = j.at("sample_id").get<std::string>();
    p.raw_token = j.at("raw_token").get<std::string>();
    p.attempts = j.at("attempts").get<int>();
    const std::string status = j.at("status").get<std::string>();
    if (status == "ok") {
        p.status = PredictionStatus::ok;
    } else if (status == "parse_failure") {
        p.status = PredictionStatus::parse_failure;
    } else {
        throw data_error("unknown prediction status: " + status);
    }
    if (j.contains("rating") && !j.at("rating").is_null()) {
        p.rating = j.at("rating").get<int>();
    } else {
        p.rating.reset();
    }
    if ((p.status == PredictionStatus::ok) != p.rating.has_value()) {
        throw data_error("prediction status/rating mismatch for sample " + p.sample_id);
    }
}

void to_json(json& j, const ExampleSet& set) {
    json examples = json::array();
    for (std::size_t i = 0; i < set.examples.size(); ++i) {
        json e = set.examples[i];
        if (set.strategy == Strategy::CRE) e["cluster"] = static_cast<int>(i);
        examples.push_back(std::move(e));
    }
    j = json{{"strategy", strategy_name(set.strategy)},
             {"k", set.k},
             {"seed", set.seed},
             {"examples", std::move(examples)}};
    if (!set.cluster_assignments.empty()) j["cluster_assignments"] = set.cluster_assignments;
}

void from_json(const json& j, ExampleSet& set) {
    set.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    set.k = j.at("k").get<int>();
    set.seed = j.at("seed").get<std::uint64_t>();
    set.examples = j.at("examples").get<std::vector<Sample>>();
    set.cluster_assignments.clear();
    if (j.contains("cluster_assignments")) {
        set.cluster_assignments = j.at("cluster_assignments").get<std::map<std::string, int>>();
    }
    if (static_cast<int>(set.examples.size()) != set.k) {
        throw data_error("example set: examples count does not match k");
    }
}

void to_json(json& j, const EnsembleRecord& r) {
    j = json{{"sample_id", r.sample_id},
             {"per_model", r.per_model},
             {"n_unique", r.n_unique},
             {"n_valid", r.n_valid}};
    if (r.median_rating) {
        j["median_rating"] = *r.median_rating;
    } else {
        j["median_rating"] = nullptr;
    }
}

void from_json(const json& j, EnsembleRecord& r) {
    r.sample_id = j.at("sample_id").get<std::string>();
    r.per_model = j.at("per_model").get<std::map<std::string, Prediction>>();
    r.n_unique = j.at("n_unique").get<int>();
    r.n_valid = j.at("n_valid").get<int>();
    if (j.contains("median_rating") && !j.at("median_rating").is_null()) {
        r.median_rating = j.at("median_rating").get<int>();
    } else {
        r.median_rating.reset();
    }
}

void to_json(json& j, const EvalReport& r) {
    json per_class;
    for (const auto& [label, f1] : r.f1_per_class) per_class[std::to_string(label)] = f1;
    j = json{{"accuracy", r.accuracy},
             {"f1_per_class", std::move(per_class)},
             {"macro_f1", r.macro_f1},
             {"weighted_f1", r.weighted_f1},
             {"rmse", r.rmse},
             {"n", r.n}};
}

void from_json(const json& j, EvalReport& r) {
    r.accuracy = j.at("accuracy").get<double>();
    r.macro_f1 = j.at("macro_f1").get<double>();
    r.weighted_f1 = j.at("weighted_f1").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.f1_per_class.clear();
    for (const auto& [key, value] : j.at("f1_per_class").items()) {
        r.f1_per_class[std::stoi(key)] = value.get<double>();
    }
}

void to_json(json& j, const PairedTestResult& r) {
    j = json{{"statistic", r.statistic},
             {"p_value", r.p_value},
             {"n_effective", r.n_effective},
             {"method", r.method}};
}

void to_json(json& j, const ConsistencyReport& r) {
    json strata;
    for (const auto& [u, s] : r.per_stratum) {
        json entry{{"count", s.count}};
        entry["accuracy"] = s.accuracy ? json(*s.accuracy) : json(nullptr);
        entry["macro_f1"] = s.macro_f1 ? json(*s.macro_f1) : json(nullptr);
        strata[std::to_string(u)] = std::move(entry);
    }
    j = json{{"per_stratum", std::move(strata)}};
}

}  // namespace llmens
