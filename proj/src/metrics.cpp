#include "llmens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "llmens/ensemble.hpp"
#include "llmens/error.hpp"

namespace llmens {

namespace {

void check_paired(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw validation_error(std::string(what) + ": length mismatch (" + std::to_string(a) +
                               " vs " + std::to_string(b) + ")");
    }
    if (a == 0) throw validation_error(std::string(what) + ": empty input");
}

void check_labels(const std::vector<int>& v, const char* what) {
    for (int x : v) {
        if (x < 1 || x > 5) {
            throw validation_error(std::string(what) + ": label out of range: " + std::to_string(x));
        }
    }
}

struct RankedDiffs {
    std::vector<double> ranks;  // ranks of |d|, average ranks for ties
    std::vector<int> signs;     // +1 / -1
    double tie_term = 0.0;      // sum of (t^3 - t) over tie groups
};

RankedDiffs rank_abs_differences(const std::vector<double>& d) {
    RankedDiffs out;
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

    out.ranks.resize(n);
    out.signs.resize(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
        // positions i..j (0-based) share ranks i+1..j+1
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) out.tie_term += t * t * t - t;
        for (std::size_t p = i; p <= j; ++p) out.ranks[order[p]] = avg_rank;
        i = j + 1;
    }
    for (std::size_t p = 0; p < n; ++p) out.signs[p] = d[p] > 0.0 ? 1 : -1;
    return out;
}

}  // namespace

double chi2_1df_sf(double x) {
    if (x <= 0.0) return 1.0;
    // X ~ chi^2(1) is Z^2, so P(X > x) = P(|Z| > sqrt(x)) = erfc(sqrt(x/2)).
    return std::erfc(std::sqrt(x / 2.0));
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_paired(pred.size(), truth.size(), "accuracy");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == truth[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

F1Result f1_scores(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_paired(pred.size(), truth.size(), "f1_scores");
    check_labels(pred, "f1_scores pred");
    check_labels(truth, "f1_scores truth");

    F1Result out;
    double weighted_sum = 0.0;
    double macro_sum = 0.0;
    for (int label = 1; label <= 5; ++label) {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const bool p = pred[i] == label;
            const bool t = truth[i] == label;
            if (p && t) ++tp;
            if (p && !t) ++fp;
            if (!p && t) ++fn;
            if (t) ++support;
        }
        const double precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 =
            (precision + recall) == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
        out.per_class[label] = f1;
        macro_sum += f1;
        weighted_sum += f1 * static_cast<double>(support);
    }
    out.macro = macro_sum / 5.0;
    out.weighted = weighted_sum / static_cast<double>(pred.size());
    return out;
}

double rmse(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_paired(pred.size(), truth.size(), "rmse");
    double ss = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred[i]) - static_cast<double>(truth[i]);
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(pred.size()));
}

EvalReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth) {
    EvalReport report;
    report.accuracy = accuracy(pred, truth);
    const F1Result f1 = f1_scores(pred, truth);
    report.f1_per_class = f1.per_class;
    report.macro_f1 = f1.macro;
    report.weighted_f1 = f1.weighted;
    report.rmse = rmse(pred, truth);
    report.n = pred.size();
    return report;
}

PairedTestResult mcnemar(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b) {
    check_paired(correct_a.size(), correct_b.size(), "mcnemar");
    std::size_t b = 0, c = 0;
    for (std::size_t i = 0; i < correct_a.size(); ++i) {
        if (correct_a[i] && !correct_b[i]) ++b;
        if (!correct_a[i] && correct_b[i]) ++c;
    }
    PairedTestResult res;
    res.method = "mcnemar-cc";
    res.n_effective = b + c;
    if (b + c == 0) {
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }
    const double diff = std::abs(static_cast<double>(b) - static_cast<double>(c));
    res.statistic = (diff - 1.0) * (diff - 1.0) / static_cast<double>(b + c);
    res.p_value = chi2_1df_sf(res.statistic);
    return res;
}

PairedTestResult wilcoxon_signed_rank(const std::vector<double>& err_a,
                                      const std::vector<double>& err_b) {
    check_paired(err_a.size(), err_b.size(), "wilcoxon_signed_rank");

    std::vector<double> d;
    d.reserve(err_a.size());
    for (std::size_t i = 0; i < err_a.size(); ++i) {
        const double di = err_a[i] - err_b[i];
        if (di != 0.0) d.push_back(di);
    }

    PairedTestResult res;
    res.n_effective = d.size();
    if (d.empty()) {
        res.statistic = 0.0;
        res.p_value = 1.0;
        res.method = "wilcoxon-exact";
        return res;
    }

    const RankedDiffs ranked = rank_abs_differences(d);
    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (ranked.signs[i] > 0) {
            w_plus += ranked.ranks[i];
        } else {
            w_minus += ranked.ranks[i];
        }
    }
    const double w = std::min(w_plus, w_minus);
    res.statistic = w;

    const std::size_t n = d.size();
    if (n <= 25) {
        // Exact null: every one of the 2^n sign patterns is equally likely;
        // two-sided p is the probability of a min(W+, W-) at least as
        // extreme as observed. Average ranks are half-integers, so doubling
        // them gives an integer rank-sum distribution we can count exactly
        // with a convolution instead of walking all patterns.
        res.method = "wilcoxon-exact";
        std::vector<int> ranks2(n);
        int total2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ranks2[i] = static_cast<int>(std::llround(2.0 * ranked.ranks[i]));
            total2 += ranks2[i];
        }
        std::vector<std::uint64_t> count(static_cast<std::size_t>(total2) + 1, 0);
        count[0] = 1;
        int reached = 0;
        for (std::size_t i = 0; i < n; ++i) {
            reached += ranks2[i];
            for (int s = reached; s >= ranks2[i]; --s) {
                count[static_cast<std::size_t>(s)] +=
                    count[static_cast<std::size_t>(s - ranks2[i])];
            }
        }
        const int w2 = static_cast<int>(std::llround(2.0 * w));
        std::uint64_t hits = 0;
        for (int s = 0; s <= total2; ++s) {
            // min(W+, W-) <= w  <=>  W+ <= w or W+ >= total - w
            if (s <= w2 || s >= total2 - w2) hits += count[static_cast<std::size_t>(s)];
        }
        res.p_value = static_cast<double>(hits) / static_cast<double>(1ULL << n);
    } else {
        res.method = "wilcoxon-normal";
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - ranked.tie_term / 48.0;
        const double sd = std::sqrt(var);
        if (sd == 0.0) {
            res.p_value = 1.0;
            return res;
        }
        // W = min(W+, W-) <= mean; continuity correction moves toward the mean.
        const double z = (w - mean + 0.5) / sd;
        res.p_value = std::min(1.0, 2.0 * normal_sf(-z));
    }
    return res;
}

ConsistencyReport stratify_by_consistency(const std::vector<EnsembleRecord>& records,
                                          const std::map<std::string, int>& truth, int n_models) {
    ConsistencyReport report;
    std::map<int, std::pair<std::vector<int>, std::vector<int>>> strata;  // n_unique -> (pred, truth)
    for (int u = 1; u <= n_models; ++u) {
        report.per_stratum[u] = ConsistencyStratum{};
        strata[u] = {};
    }
    for (const EnsembleRecord& rec : records) {
        if (!rec.median_rating) {
            throw validation_error("stratify_by_consistency: record without valid predictions: " +
                                   rec.sample_id);
        }
        const auto it = truth.find(rec.sample_id);
        if (it == truth.end()) {
            throw validation_error("stratify_by_consistency: missing truth for sample " +
                                   rec.sample_id);
        }
        if (rec.n_unique < 1 || rec.n_unique > n_models) {
            throw validation_error("stratify_by_consistency: n_unique out of range for sample " +
                                   rec.sample_id);
        }
        strata[rec.n_unique].first.push_back(*rec.median_rating);
        strata[rec.n_unique].second.push_back(it->second);
    }
    for (auto& [u, pt] : strata) {
        auto& stratum = report.per_stratum[u];
        stratum.count = pt.first.size();
        if (stratum.count > 0) {
            stratum.accuracy = accuracy(pt.first, pt.second);
            stratum.macro_f1 = f1_scores(pt.first, pt.second).macro;
        }
    }
    return report;
}

}  // namespace llmens
