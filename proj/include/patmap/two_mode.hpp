#pragma once

// Sparse 2-mode matrix: CPC-4 classes (citing side, aggregated) in the rows,
// individual cited patents in the columns. Cited-patent ordinals are assigned
// in first-encounter order, so the matrix is deterministic for a given corpus
// order; similarity projections do not depend on column order at all.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patmap/common.hpp"
#include "patmap/record.hpp"

namespace patmap {

enum class Counting { whole, fractional };

struct SparseEntry {
    int32_t col = 0;
    double value = 0.0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// One class's citation vector, sorted by column.
using SparseRow = std::vector<SparseEntry>;

class TwoModeMatrix {
public:
    TwoModeMatrix() = default;
    TwoModeMatrix(std::vector<SparseRow> rows, std::vector<std::string> col_ids)
        : rows_(std::move(rows)), col_ids_(std::move(col_ids)) {
        for (int i = 0; i < static_cast<int>(col_ids_.size()); ++i) col_index_[col_ids_[i]] = i;
        for (const auto& row : rows_)
            for (const auto& e : row) total_ += e.value;
    }

    int n_rows() const { return static_cast<int>(rows_.size()); }
    int n_cols() const { return static_cast<int>(col_ids_.size()); }
    const SparseRow& row(int r) const { return rows_.at(r); }
    const std::vector<std::string>& col_ids() const { return col_ids_; }
    double total() const { return total_; }

    size_t nnz() const {
        size_t n = 0;
        for (const auto& row : rows_) n += row.size();
        return n;
    }

    const std::unordered_map<std::string, int>& col_index() const { return col_index_; }

private:
    std::vector<SparseRow> rows_;
    std::vector<std::string> col_ids_;
    std::unordered_map<std::string, int> col_index_;
    double total_ = 0.0;
};

// A patent with k classes citing a patent m times contributes m (whole) or
// m/k (fractional) to each of its classes' cells for that cited patent.
inline TwoModeMatrix build_two_mode(const std::vector<PatentRecord>& corpus,
                                    const ClassScheme& scheme,
                                    Counting counting = Counting::fractional) {
    const int n = scheme.size();
    std::vector<std::unordered_map<int32_t, double>> accum(n);
    std::vector<std::string> col_ids;
    std::unordered_map<std::string, int32_t> col_index;

    for (const auto& rec : corpus) {
        const double k = static_cast<double>(rec.classes.size());
        const double unit = counting == Counting::fractional ? 1.0 / k : 1.0;
        for (const auto& cited_id : rec.cited) {
            auto [it, inserted] = col_index.try_emplace(cited_id, static_cast<int32_t>(col_ids.size()));
            if (inserted) col_ids.push_back(cited_id);
            const int32_t col = it->second;
            for (const auto& cls : rec.classes) {
                auto ord = scheme.ordinal(cls);
                if (!ord) throw Error("class '" + cls + "' not in scheme; validate the corpus first");
                accum[*ord][col] += unit;
            }
        }
    }

    std::vector<SparseRow> rows(n);
    for (int r = 0; r < n; ++r) {
        rows[r].reserve(accum[r].size());
        for (const auto& [col, v] : accum[r]) rows[r].push_back({col, v});
        std::sort(rows[r].begin(), rows[r].end(),
                  [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
    }
    return TwoModeMatrix(std::move(rows), std::move(col_ids));
}

// Every positive entry becomes 1; the nonzero pattern is unchanged.
inline TwoModeMatrix binarize(const TwoModeMatrix& m) {
    std::vector<SparseRow> rows(m.n_rows());
    for (int r = 0; r < m.n_rows(); ++r) {
        rows[r] = m.row(r);
        for (auto& e : rows[r]) e.value = 1.0;
    }
    return TwoModeMatrix(std::move(rows), m.col_ids());
}

struct ClassCitationProfile {
    std::string class_code;
    SparseRow vector;
};

inline ClassCitationProfile row_profile(const TwoModeMatrix& m, const ClassScheme& scheme,
                                        std::string_view class_code) {
    auto ord = scheme.ordinal(to_upper(class_code));
    if (!ord) throw Error("unknown class code '" + std::string(class_code) + "'");
    return {scheme.code(*ord), m.row(*ord)};
}

}  // namespace patmap
