#pragma once

// Portfolio distributions over the class scheme, overlays on a fixed basemap,
// difference maps between two portfolios, and the local cosine network among
// accumulated runs. Map geometry is always consumed from a basemap file,
// never computed.

#include <cmath>
#include <string>
#include <vector>

#include "patmap/common.hpp"
#include "patmap/diversity.hpp"
#include "patmap/record.hpp"
#include "patmap/similarity.hpp"

namespace patmap {

// Fractional class weights for a named patent set. The weights sum to the
// patent count: each patent contributes 1/k to each of its k classes.
struct PortfolioDistribution {
    std::string sample_name;
    std::vector<double> weights;  // indexed by class ordinal
    long n_patents = 0;

    double total() const {
        double t = 0;
        for (double w : weights) t += w;
        return t;
    }
};

inline PortfolioDistribution distribution(const std::vector<PatentRecord>& corpus,
                                          const ClassScheme& scheme,
                                          const std::string& sample_name) {
    if (corpus.empty()) throw Error("distribution: empty corpus");
    if (sample_name.empty()) throw Error("distribution: sample name is required");

    PortfolioDistribution p;
    p.sample_name = sample_name;
    p.weights.assign(scheme.size(), 0.0);
    p.n_patents = static_cast<long>(corpus.size());
    for (const auto& rec : corpus) {
        const double share = 1.0 / static_cast<double>(rec.classes.size());
        for (const auto& cls : rec.classes) {
            auto ord = scheme.ordinal(cls);
            if (!ord) throw Error("class '" + cls + "' not in scheme; validate the corpus first");
            p.weights[*ord] += share;
        }
    }
    return p;
}

// Fixed map geometry: one node per scheme class, ids are ordinal + 1.
struct BaseMapNode {
    int id = 0;
    std::string label;
    double x = 0.0;
    double y = 0.0;
    int cluster = 0;
};

struct BaseMap {
    std::vector<BaseMapNode> nodes;

    int size() const { return static_cast<int>(nodes.size()); }
};

inline void require_aligned(const BaseMap& base, const ClassScheme& scheme) {
    if (base.size() != scheme.size())
        throw Error("basemap has " + std::to_string(base.size()) + " nodes, scheme has " +
                    std::to_string(scheme.size()) + " classes");
    for (int i = 0; i < base.size(); ++i) {
        if (base.nodes[i].id != i + 1)
            throw Error("basemap node ids must be ordinal + 1 (node " + std::to_string(i) + ")");
        if (base.nodes[i].label != scheme.code(i))
            throw Error("basemap label '" + base.nodes[i].label + "' does not match scheme code '" +
                        scheme.code(i) + "'");
    }
}

enum class DiffColor { neutral, red, green };

inline const char* to_string(DiffColor c) {
    switch (c) {
        case DiffColor::red: return "red";
        case DiffColor::green: return "green";
        default: return "neutral";
    }
}

struct OverlayNode {
    int id = 0;
    std::string label;
    double x = 0.0;
    double y = 0.0;
    int cluster = 0;
    double weight = 0.0;
    double score = 0.0;          // difference maps only: w1 - w2
    DiffColor color = DiffColor::neutral;
};

struct OverlayMap {
    std::vector<OverlayNode> nodes;
    bool is_difference = false;

    int size() const { return static_cast<int>(nodes.size()); }
};

// Weights from the distribution on the basemap geometry. Zero-weight nodes
// are retained so the map geometry stays stable across samples.
inline OverlayMap overlay(const PortfolioDistribution& p, const BaseMap& base,
                          const ClassScheme& scheme) {
    require_aligned(base, scheme);
    if (static_cast<int>(p.weights.size()) != scheme.size())
        throw Error("overlay: distribution and scheme dimensions differ");

    OverlayMap out;
    out.nodes.reserve(base.size());
    for (int i = 0; i < base.size(); ++i) {
        const BaseMapNode& b = base.nodes[i];
        out.nodes.push_back({b.id, b.label, b.x, b.y, b.cluster, p.weights[i], 0.0,
                             DiffColor::neutral});
    }
    return out;
}

// Signed comparison of two portfolios on the same scheme: red where the first
// set is stronger, green where the second is, neutral on exact ties. Node
// weight is the magnitude of the difference.
inline OverlayMap difference_overlay(const PortfolioDistribution& p1,
                                     const PortfolioDistribution& p2, const BaseMap& base,
                                     const ClassScheme& scheme) {
    require_aligned(base, scheme);
    if (p1.weights.size() != p2.weights.size() ||
        static_cast<int>(p1.weights.size()) != scheme.size())
        throw Error("difference_overlay: distributions must share the scheme");

    OverlayMap out;
    out.is_difference = true;
    out.nodes.reserve(base.size());
    for (int i = 0; i < base.size(); ++i) {
        const BaseMapNode& b = base.nodes[i];
        const double score = p1.weights[i] - p2.weights[i];
        DiffColor color = DiffColor::neutral;
        if (score > 0) color = DiffColor::red;
        if (score < 0) color = DiffColor::green;
        out.nodes.push_back({b.id, b.label, b.x, b.y, b.cluster, std::fabs(score), score, color});
    }
    return out;
}

// --- local portfolio-similarity network -------------------------------------

// In-memory accumulation table: class rows, one weight column per run.
struct MatrixTable {
    std::vector<std::string> codes;                 // row labels, scheme order
    std::vector<std::string> names;                 // column labels, insertion order
    std::vector<std::vector<double>> columns;       // columns[j][i], |codes| rows

    int n_runs() const { return static_cast<int>(names.size()); }
};

struct RunNetwork {
    std::vector<std::string> names;
    SymmetricMatrix cosines;       // runs x runs, diagonal 1 for nonzero runs
    SymmetricMatrix cooccurrence;  // raw dot products between run vectors
    std::vector<std::string> warnings;
};

// Pairwise cosine between the runs' class-weight vectors.
inline RunNetwork portfolio_cosine_network(const MatrixTable& table) {
    const int n = table.n_runs();
    if (n < 2) throw Error("portfolio_cosine_network: need at least 2 runs");

    RunNetwork net;
    net.names = table.names;
    net.cosines = SymmetricMatrix(n, SimilarityKind::cosine);
    net.cooccurrence = SymmetricMatrix(n, SimilarityKind::unknown);
    for (int i = 0; i < n; ++i) {
        bool zero = true;
        for (double v : table.columns[i])
            if (v != 0) zero = false;
        if (zero)
            net.warnings.push_back("run '" + table.names[i] + "' has an all-zero class vector");
        for (int j = i; j < n; ++j) {
            net.cosines.set(i, j, cosine(table.columns[i], table.columns[j]));
            double dot = 0;
            for (size_t r = 0; r < table.columns[i].size(); ++r)
                dot += table.columns[i][r] * table.columns[j][r];
            net.cooccurrence.set(i, j, dot);
        }
    }
    return net;
}

}  // namespace patmap
