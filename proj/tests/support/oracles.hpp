#pragma once

// Brute-force reference implementations, kept deliberately independent of
// the library code they check: direct definition evaluation, full
// enumeration, and quadrature. Slow on purpose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    int hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i] ? 1 : 0;
    return double(hits) / double(pred.size());
}

inline double rmse(const std::vector<int>& pred, const std::vector<int>& truth) {
    double ss = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ss += double(pred[i] - truth[i]) * double(pred[i] - truth[i]);
    }
    return std::sqrt(ss / double(pred.size()));
}

struct F1 {
    std::map<int, double> per_class;
    double macro = 0;
    double weighted = 0;
};

inline F1 f1(const std::vector<int>& pred, const std::vector<int>& truth) {
    F1 out;
    for (int c = 1; c <= 5; ++c) {
        int tp = 0, pred_c = 0, true_c = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == c) ++pred_c;
            if (truth[i] == c) ++true_c;
            if (pred[i] == c && truth[i] == c) ++tp;
        }
        const double prec = pred_c == 0 ? 0.0 : double(tp) / pred_c;
        const double rec = true_c == 0 ? 0.0 : double(tp) / true_c;
        const double f = (prec + rec) == 0 ? 0.0 : 2 * prec * rec / (prec + rec);
        out.per_class[c] = f;
        out.macro += f / 5.0;
        out.weighted += f * double(true_c) / double(pred.size());
    }
    return out;
}

// chi^2(1 df) upper tail by adaptive Simpson quadrature of the density
// exp(-t/2) / sqrt(2 pi t) on [x, cutoff].
inline double chi2_1df_sf_quadrature(double x) {
    if (x <= 0) return 1.0;
    const auto pdf = [](double t) { return std::exp(-t / 2.0) / std::sqrt(2.0 * M_PI * t); };
    const auto simpson = [&](double a, double b) {
        const double m = (a + b) / 2;
        return (b - a) / 6.0 * (pdf(a) + 4 * pdf(m) + pdf(b));
    };
    const std::function<double(double, double, double, double)> adapt =
        [&](double a, double b, double whole, double eps) -> double {
        const double m = (a + b) / 2;
        const double left = simpson(a, m), right = simpson(m, b);
        if (std::abs(left + right - whole) < 15 * eps) {
            return left + right + (left + right - whole) / 15.0;
        }
        return adapt(a, m, left, eps / 2) + adapt(m, b, right, eps / 2);
    };
    const double cutoff = std::max(x + 200.0, 300.0);  // tail beyond is < 1e-40
    double total = 0;
    double lo = x;
    while (lo < cutoff) {
        const double hi = std::min(lo + 10.0, cutoff);
        total += adapt(lo, hi, simpson(lo, hi), 1e-13);
        lo = hi;
    }
    return total;
}

struct McNemar {
    double chi2 = 0;
    double p = 1;
};

inline McNemar mcnemar(const std::vector<bool>& a, const std::vector<bool>& b) {
    int disc_ab = 0, disc_ba = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) ++disc_ab;
        if (!a[i] && b[i]) ++disc_ba;
    }
    McNemar out;
    if (disc_ab + disc_ba == 0) return out;
    const double d = std::abs(double(disc_ab) - double(disc_ba));
    out.chi2 = (d - 1) * (d - 1) / double(disc_ab + disc_ba);
    out.p = chi2_1df_sf_quadrature(out.chi2);
    return out;
}

struct Wilcoxon {
    double w = 0;
    double p = 1;
    std::size_t n = 0;
};

// Full 2^n enumeration, n <= ~20 for sane runtime.
inline Wilcoxon wilcoxon_exact(const std::vector<double>& err_a,
                               const std::vector<double>& err_b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < err_a.size(); ++i) {
        if (err_a[i] != err_b[i]) d.push_back(err_a[i] - err_b[i]);
    }
    Wilcoxon out;
    out.n = d.size();
    if (d.empty()) return out;

    const std::size_t n = d.size();
    // average ranks of |d| by sorting pairs
    std::vector<std::pair<double, std::size_t>> mag(n);
    for (std::size_t i = 0; i < n; ++i) mag[i] = {std::abs(d[i]), i};
    std::sort(mag.begin(), mag.end());
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && mag[j + 1].first == mag[i].first) ++j;
        const double avg = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) rank[mag[k].second] = avg;
        i = j + 1;
    }

    double wp = 0, wm = 0;
    for (std::size_t k = 0; k < n; ++k) {
        (d[k] > 0 ? wp : wm) += rank[k];
    }
    out.w = std::min(wp, wm);

    const double total_rank = wp + wm;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        double w_plus = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (mask & (1ULL << k)) w_plus += rank[k];
        }
        if (std::min(w_plus, total_rank - w_plus) <= out.w + 1e-12) ++hits;
    }
    out.p = double(hits) / double(1ULL << n);
    return out;
}

}  // namespace oracle
