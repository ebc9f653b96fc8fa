#pragma once

#include <nlohmann/json.hpp>

#include "llmens/dataset.hpp"
#include "llmens/ensemble.hpp"
#include "llmens/inference.hpp"
#include "llmens/metrics.hpp"
#include "llmens/selection.hpp"

// JSON schemas for every artifact the tool reads or writes. nlohmann keeps
// object keys sorted, so serialization is byte-stable for identical values.
namespace llmens {

void to_json(nlohmann::json& j, const Sample& s);
void from_json(const nlohmann::json& j, Sample& s);

void to_json(nlohmann::json& j, const CorpusStats& st);

void to_json(nlohmann::json& j, const Prediction& p);
void from_json(const nlohmann::json& j, Prediction& p);

void to_json(nlohmann::json& j, const ExampleSet& set);
void from_json(const nlohmann::json& j, ExampleSet& set);

void to_json(nlohmann::json& j, const EnsembleRecord& r);
void from_json(const nlohmann::json& j, EnsembleRecord& r);

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

void to_json(nlohmann::json& j, const PairedTestResult& r);

void to_json(nlohmann::json& j, const ConsistencyReport& r);

}  // namespace llmens
