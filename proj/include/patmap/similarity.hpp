#pragma once

// Projection of the 2-mode matrix onto symmetric 1-mode class-by-class
// similarity matrices. Jaccard works on binarized vectors, Tanimoto is its
// raw-count equivalent, cosine uses raw counts. (1 - cosine) is the distance
// measure; Jaccard distances are deliberately not offered.
//
// Classes with empty citation profiles have similarity 0 with everything,
// including themselves: no citations, no relatedness evidence.

#include <cmath>
#include <span>
#include <vector>

#include "patmap/common.hpp"
#include "patmap/two_mode.hpp"

namespace patmap {

enum class SimilarityKind { jaccard, cosine, tanimoto, unknown };

inline const char* to_string(SimilarityKind k) {
    switch (k) {
        case SimilarityKind::jaccard: return "jaccard";
        case SimilarityKind::cosine: return "cosine";
        case SimilarityKind::tanimoto: return "tanimoto";
        default: return "";
    }
}

inline SimilarityKind similarity_kind_from_string(std::string_view s) {
    if (s == "jaccard") return SimilarityKind::jaccard;
    if (s == "cosine") return SimilarityKind::cosine;
    if (s == "tanimoto") return SimilarityKind::tanimoto;
    return SimilarityKind::unknown;
}

// --- scalar kernels -------------------------------------------------------

// sum(xy) / (sum(x^2) + sum(y^2) - sum(xy)) on binarized inputs; any positive
// component counts as 1. Returns 0 when both vectors are zero.
inline double jaccard(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("jaccard: dimension mismatch");
    double xy = 0, xx = 0, yy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i] > 0 ? 1.0 : 0.0;
        const double yi = y[i] > 0 ? 1.0 : 0.0;
        xy += xi * yi;
        xx += xi;
        yy += yi;
    }
    const double denom = xx + yy - xy;
    return denom > 0 ? xy / denom : 0.0;
}

// sum(xy) / (sqrt(sum(x^2)) * sqrt(sum(y^2))); 0 if either norm is 0.
inline double cosine(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("cosine: dimension mismatch");
    double xy = 0, xx = 0, yy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx <= 0 || yy <= 0) return 0.0;
    return xy / (std::sqrt(xx) * std::sqrt(yy));
}

// Raw-count equivalent of the Jaccard index.
inline double tanimoto(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("tanimoto: dimension mismatch");
    double xy = 0, xx = 0, yy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    const double denom = xx + yy - xy;
    return denom > 0 ? xy / denom : 0.0;
}

// --- symmetric matrices ---------------------------------------------------

// Dense upper-triangle storage (the 1-mode side is small); raw values stay
// untouched, export_scale is applied by writers only.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    SymmetricMatrix(int n, SimilarityKind kind)
        : n_(n), kind_(kind), values_(static_cast<size_t>(n) * (n + 1) / 2, 0.0) {}

    int size() const { return n_; }
    SimilarityKind kind() const { return kind_; }

    double export_scale = 1.0;

    double operator()(int i, int j) const { return values_[index(i, j)]; }
    void set(int i, int j, double v) { values_[index(i, j)] = v; }

    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return a.n_ == b.n_ && a.values_ == b.values_;
    }

private:
    size_t index(int i, int j) const {
        if (i > j) std::swap(i, j);
        // row-major upper triangle
        return static_cast<size_t>(i) * (2 * n_ - i - 1) / 2 + j;
    }

    int n_ = 0;
    SimilarityKind kind_ = SimilarityKind::unknown;
    std::vector<double> values_;
};

// Export-time view: value(i,j) = raw * factor. Raw matrix is untouched and
// scaled values must never feed to_distance.
class ScaledView {
public:
    ScaledView(const SymmetricMatrix& m, double factor) : m_(m), factor_(factor) {
        if (!(factor > 0)) throw Error("scale factor must be positive");
    }
    int size() const { return m_.size(); }
    double operator()(int i, int j) const { return m_(i, j) * factor_; }
    double factor() const { return factor_; }

private:
    const SymmetricMatrix& m_;
    double factor_;
};

inline ScaledView scaled_view(const SymmetricMatrix& m, double factor) {
    return ScaledView(m, factor);
}

namespace detail {

// Pairwise sum(x_i * y_j) over all row pairs, accumulated column by column.
// Cited-patent columns are short on the class side, so sweeping columns costs
// sum(d_c^2) instead of the n^2 merges of the naive pairwise approach.
// Summation order is fixed (column ordinal, then row pairs), so results are
// deterministic.
inline std::vector<double> pairwise_dot(const TwoModeMatrix& m, bool binary) {
    const int n = m.n_rows();
    std::vector<double> dot(static_cast<size_t>(n) * (n + 1) / 2, 0.0);
    auto idx = [n](int i, int j) {
        return static_cast<size_t>(i) * (2 * n - i - 1) / 2 + j;
    };

    // column buckets: (row, value) lists in row order
    std::vector<std::vector<std::pair<int32_t, double>>> cols(m.n_cols());
    for (int r = 0; r < n; ++r)
        for (const auto& e : m.row(r)) cols[e.col].push_back({r, e.value});

    for (const auto& entries : cols) {
        for (size_t a = 0; a < entries.size(); ++a) {
            const double va = binary ? 1.0 : entries[a].second;
            for (size_t b = a; b < entries.size(); ++b) {
                const double vb = binary ? 1.0 : entries[b].second;
                dot[idx(entries[a].first, entries[b].first)] += va * vb;
            }
        }
    }
    return dot;
}

}  // namespace detail

// All pairwise class-profile similarities. Jaccard binarizes internally.
inline SymmetricMatrix similarity_matrix(const TwoModeMatrix& m, SimilarityKind kind) {
    if (kind == SimilarityKind::unknown) throw Error("similarity kind not specified");
    const int n = m.n_rows();
    const bool binary = kind == SimilarityKind::jaccard;
    const std::vector<double> dot = detail::pairwise_dot(m, binary);
    auto idx = [n](int i, int j) {
        return static_cast<size_t>(i) * (2 * n - i - 1) / 2 + j;
    };

    SymmetricMatrix s(n, kind);
    for (int i = 0; i < n; ++i) {
        const double xx = dot[idx(i, i)];
        if (xx <= 0) continue;  // zero profile: similarity 0 with everything
        s.set(i, i, 1.0);       // nonzero profile: diagonal exactly 1
        for (int j = i + 1; j < n; ++j) {
            const double yy = dot[idx(j, j)];
            if (yy <= 0) continue;
            const double xy = dot[idx(i, j)];
            double v = 0.0;
            if (kind == SimilarityKind::cosine) {
                v = xy / (std::sqrt(xx) * std::sqrt(yy));
            } else {
                const double denom = xx + yy - xy;
                v = denom > 0 ? xy / denom : 0.0;
            }
            s.set(i, j, v);
        }
    }
    return s;
}

struct DistanceMatrix {
    int n = 0;
    std::vector<double> values;  // dense upper triangle, same layout as SymmetricMatrix

    double operator()(int i, int j) const {
        if (i > j) std::swap(i, j);
        return values[static_cast<size_t>(i) * (2 * n - i - 1) / 2 + j];
    }
};

// d_ij = 1 - cosine_ij. Rejects non-cosine kinds (the Jaccard index is a
// relational measure, not a positional one) and matrices that look scaled.
inline DistanceMatrix to_distance(const SymmetricMatrix& s) {
    if (s.kind() != SimilarityKind::cosine)
        throw Error("distances are derived from cosine similarities only");
    DistanceMatrix d;
    d.n = s.size();
    d.values.resize(static_cast<size_t>(d.n) * (d.n + 1) / 2);
    size_t k = 0;
    for (int i = 0; i < d.n; ++i) {
        for (int j = i; j < d.n; ++j, ++k) {
            const double v = s(i, j);
            if (v > 1.0 + 1e-9)
                throw Error("similarity value > 1; scaled matrices cannot be used for distances");
            d.values[k] = 1.0 - v;
        }
    }
    return d;
}

// Pearson correlation over paired off-diagonal cells of two equally sized
// square matrices (QAP-style; diagonals excluded, no permutation test).
template <typename MatA, typename MatB>
double offdiag_pearson(const MatA& a, const MatB& b) {
    const int n = a.size();
    if (n != b.size()) throw Error("offdiag_pearson: dimension mismatch");
    if (n < 2) throw Error("offdiag_pearson: need dimension >= 2");

    double mean_a = 0, mean_b = 0;
    size_t count = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            mean_a += a(i, j);
            mean_b += b(i, j);
            ++count;
        }
    }
    mean_a /= static_cast<double>(count);
    mean_b /= static_cast<double>(count);

    double saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double da = a(i, j) - mean_a;
            const double db = b(i, j) - mean_b;
            saa += da * da;
            sbb += db * db;
            sab += da * db;
        }
    }
    if (saa <= 0 || sbb <= 0)
        throw Error("offdiag_pearson: zero variance, correlation undefined");
    return sab / (std::sqrt(saa) * std::sqrt(sbb));
}

}  // namespace patmap
