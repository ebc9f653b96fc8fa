#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace llmens {

struct EnsembleRecord;

struct EvalReport {
    double accuracy = 0.0;
    std::map<int, double> f1_per_class;  // labels 1..5, always all five
    double macro_f1 = 0.0;               // unweighted mean over all 5 labels
    double weighted_f1 = 0.0;            // support-weighted over true labels
    double rmse = 0.0;
    std::size_t n = 0;
};

struct PairedTestResult {
    double statistic = 0.0;  // chi^2 for McNemar, W = min(W+, W-) for Wilcoxon
    double p_value = 1.0;
    std::size_t n_effective = 0;
    std::string method;  // mcnemar-cc | wilcoxon-exact | wilcoxon-normal
};

struct ConsistencyStratum {
    std::size_t count = 0;
    std::optional<double> accuracy;  // absent for empty strata
    std::optional<double> macro_f1;
};

struct ConsistencyReport {
    std::map<int, ConsistencyStratum> per_stratum;  // keys 1..n_models
};

// Fraction of exact matches.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

struct F1Result {
    std::map<int, double> per_class;
    double macro = 0.0;
    double weighted = 0.0;
};

// Per-class precision/recall/F1 over labels {1..5} with 0-substitution for
// empty denominators; macro averages all 5 classes whether present or not.
F1Result f1_scores(const std::vector<int>& pred, const std::vector<int>& truth);

double rmse(const std::vector<int>& pred, const std::vector<int>& truth);

EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth);

// McNemar's test with continuity correction on paired correctness:
// chi^2 = (|b - c| - 1)^2 / (b + c), upper tail of chi^2 with 1 df.
// Degenerate b + c = 0 reports statistic 0, p 1.
PairedTestResult mcnemar(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b);

// Wilcoxon signed-rank on paired errors: zero differences discarded,
// average ranks for ties, W = min(W+, W-). Exact two-sided p by full 2^n
// sign enumeration for n_effective <= 25, else normal approximation with
// tie and continuity corrections. All-zero differences report statistic 0,
// p 1, n_effective 0.
PairedTestResult wilcoxon_signed_rank(const std::vector<double>& err_a,
                                      const std::vector<double>& err_b);

// Groups records by n_unique in {1..n_models}; per stratum: sample count,
// accuracy and macro-F1 of the median predictions. Records without a valid
// median are not evaluable and are rejected.
ConsistencyReport stratify_by_consistency(const std::vector<EnsembleRecord>& records,
                                          const std::map<std::string, int>& truth, int n_models);

// Upper tail of the chi-squared distribution with 1 degree of freedom.
double chi2_1df_sf(double x);

// Standard normal survival function P(Z > z).
double normal_sf(double z);

}  // namespace llmens
