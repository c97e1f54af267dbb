#pragma once

// Comparison statistics: Cramer's V between categorical labelings, Pearson
// and Spearman correlation. Coefficients only, no significance testing.

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "patmap/common.hpp"

namespace patmap {

struct ContingencyTable {
    std::vector<std::vector<long>> counts;  // r x c
    long n = 0;

    int rows() const { return static_cast<int>(counts.size()); }
    int cols() const { return counts.empty() ? 0 : static_cast<int>(counts[0].size()); }
};

template <typename Label>
ContingencyTable cross_tabulate(const std::vector<Label>& a, const std::vector<Label>& b) {
    if (a.size() != b.size()) throw Error("cross_tabulate: labelings differ in length");
    if (a.empty()) throw Error("cross_tabulate: empty labelings");

    std::map<Label, int> row_ids, col_ids;
    for (const auto& x : a) row_ids.try_emplace(x, static_cast<int>(row_ids.size()));
    for (const auto& y : b) col_ids.try_emplace(y, static_cast<int>(col_ids.size()));

    ContingencyTable t;
    t.counts.assign(row_ids.size(), std::vector<long>(col_ids.size(), 0));
    for (size_t i = 0; i < a.size(); ++i) ++t.counts[row_ids[a[i]]][col_ids[b[i]]];
    t.n = static_cast<long>(a.size());
    return t;
}

inline double chi_square(const ContingencyTable& t) {
    const int r = t.rows(), c = t.cols();
    std::vector<double> row_sum(r, 0.0), col_sum(c, 0.0);
    double n = 0.0;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            row_sum[i] += static_cast<double>(t.counts[i][j]);
            col_sum[j] += static_cast<double>(t.counts[i][j]);
            n += static_cast<double>(t.counts[i][j]);
        }
    }
    if (n <= 0) throw Error("chi_square: empty table");
    double chi2 = 0.0;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            const double expected = row_sum[i] * col_sum[j] / n;
            if (expected > 0) {
                const double diff = static_cast<double>(t.counts[i][j]) - expected;
                chi2 += diff * diff / expected;
            }
        }
    }
    return chi2;
}

// V = sqrt(chi2 / (n * (min(r, c) - 1))), in [0, 1]. No continuity correction.
inline double cramers_v(const ContingencyTable& t) {
    if (t.rows() < 2 || t.cols() < 2)
        throw Error("cramers_v: need at least 2 distinct labels on each side");
    double n = 0;
    for (const auto& row : t.counts)
        for (long c : row) n += static_cast<double>(c);
    if (n <= 0) throw Error("cramers_v: empty table");
    const int dof = std::min(t.rows(), t.cols()) - 1;
    return std::sqrt(chi_square(t) / (n * dof));
}

template <typename Label>
double cramers_v(const std::vector<Label>& a, const std::vector<Label>& b) {
    return cramers_v(cross_tabulate(a, b));
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("pearson: series differ in length");
    const size_t n = x.size();
    if (n < 2) throw Error("pearson: need at least 2 observations");

    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0 || syy <= 0) throw Error("pearson: zero variance");
    return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

// Ranks with ties resolved to the average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
    const size_t n = x.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });

    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Pearson correlation of average ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("spearman: series differ in length");
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

}  // namespace patmap
