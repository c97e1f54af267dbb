#pragma once

// Community detection on the class similarity graph: greedy local moving plus
// aggregation (Louvain-style) maximizing weighted Newman modularity with a
// resolution multiplier on the null term. The similarity matrix is read as an
// undirected weighted graph over its positive off-diagonal entries; the
// diagonal carries no relational information and is ignored.
//
// Determinism contract: identical (matrix, resolution, seed) yields an
// identical partition. Node visit order is a seeded shuffle, gain ties go to
// the lowest community ordinal, and community ids are renumbered canonically
// by first occurrence.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "patmap/common.hpp"
#include "patmap/record.hpp"
#include "patmap/similarity.hpp"

namespace patmap {

struct Partition {
    std::vector<int> assignment;  // node ordinal -> cluster id, ids contiguous from 1
    int k = 0;

    friend bool operator==(const Partition&, const Partition&) = default;
};

// Renumbers arbitrary labels to contiguous ids from 1 in order of first
// occurrence along the node ordering.
inline Partition canonical_partition(const std::vector<int>& raw) {
    Partition p;
    p.assignment.resize(raw.size());
    std::unordered_map<int, int> relabel;
    for (size_t i = 0; i < raw.size(); ++i) {
        auto [it, inserted] = relabel.try_emplace(raw[i], static_cast<int>(relabel.size()) + 1);
        p.assignment[i] = it->second;
    }
    p.k = static_cast<int>(relabel.size());
    return p;
}

// Weighted Newman modularity with resolution gamma:
//   Q = sum_c [ in_c / 2m - gamma * (tot_c / 2m)^2 ]
// where in_c sums ordered within-cluster off-diagonal weights.
inline double modularity(const SymmetricMatrix& s, const Partition& p, double resolution = 1.0) {
    const int n = s.size();
    if (static_cast<int>(p.assignment.size()) != n)
        throw Error("modularity: partition does not cover the graph");

    std::vector<double> degree(n, 0.0);
    double m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            degree[i] += s(i, j);
        }
        m2 += degree[i];
    }
    if (m2 <= 0) throw Error("modularity: total edge weight is zero");

    std::vector<double> in_c(p.k + 1, 0.0), tot_c(p.k + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        tot_c[p.assignment[i]] += degree[i];
        for (int j = 0; j < n; ++j) {
            if (i != j && p.assignment[i] == p.assignment[j]) in_c[p.assignment[i]] += s(i, j);
        }
    }
    double q = 0.0;
    for (int c = 1; c <= p.k; ++c)
        q += in_c[c] / m2 - resolution * (tot_c[c] / m2) * (tot_c[c] / m2);
    return q;
}

namespace detail {

struct LevelGraph {
    std::vector<std::vector<std::pair<int, double>>> adj;  // neighbors j != i
    std::vector<double> self_w;   // aggregated internal weight (ordered sum)
    std::vector<double> degree;   // sum of adj weights + self_w
    double m2 = 0.0;              // total degree

    int size() const { return static_cast<int>(adj.size()); }
};

inline LevelGraph level_graph_from_matrix(const SymmetricMatrix& s) {
    LevelGraph g;
    const int n = s.size();
    g.adj.resize(n);
    g.self_w.assign(n, 0.0);
    g.degree.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = s(i, j);
            if (w > 0) {
                g.adj[i].push_back({j, w});
                g.degree[i] += w;
            }
        }
        g.m2 += g.degree[i];
    }
    return g;
}

// One round of local moving. Returns true if any node changed community.
inline bool local_moving(const LevelGraph& g, std::vector<int>& node2comm, double resolution,
                         std::mt19937_64& rng) {
    const int n = g.size();
    std::vector<double> comm_tot(n, 0.0);
    for (int u = 0; u < n; ++u) comm_tot[node2comm[u]] += g.degree[u];

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (int u : order) {
            const int old_comm = node2comm[u];

            // weight from u to each neighboring community, community ids sorted
            std::map<int, double> comm_w;
            comm_w[old_comm];  // staying is always a candidate
            for (const auto& [v, w] : g.adj[u]) comm_w[node2comm[v]] += w;

            comm_tot[old_comm] -= g.degree[u];

            int best_comm = old_comm;
            double best_gain =
                comm_w[old_comm] - resolution * g.degree[u] * comm_tot[old_comm] / g.m2;
            for (const auto& [c, w] : comm_w) {
                if (c == old_comm) continue;
                const double gain = w - resolution * g.degree[u] * comm_tot[c] / g.m2;
                if (gain > best_gain) {  // strict: ties keep the lowest ordinal seen first
                    best_gain = gain;
                    best_comm = c;
                }
            }

            comm_tot[best_comm] += g.degree[u];
            node2comm[u] = best_comm;
            if (best_comm != old_comm) {
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

inline LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& node2comm, int n_comms) {
    LevelGraph out;
    out.adj.resize(n_comms);
    out.self_w.assign(n_comms, 0.0);
    out.degree.assign(n_comms, 0.0);
    out.m2 = g.m2;

    std::vector<std::map<int, double>> merged(n_comms);
    for (int u = 0; u < g.size(); ++u) {
        const int cu = node2comm[u];
        out.self_w[cu] += g.self_w[u];
        for (const auto& [v, w] : g.adj[u]) {
            const int cv = node2comm[v];
            if (cu == cv)
                out.self_w[cu] += w;  // ordered sum: each internal edge lands twice
            else
                merged[cu][cv] += w;
        }
    }
    for (int c = 0; c < n_comms; ++c) {
        out.adj[c].assign(merged[c].begin(), merged[c].end());
        out.degree[c] = out.self_w[c];
        for (const auto& [v, w] : out.adj[c]) out.degree[c] += w;
    }
    return out;
}

}  // namespace detail

// Locally modularity-maximal partition of the similarity graph. An edgeless
// graph yields all singletons. Empty graph is an error.
inline Partition modularity_cluster(const SymmetricMatrix& s, double resolution = 1.0,
                                    uint64_t seed = 1) {
    const int n = s.size();
    if (n == 0) throw Error("modularity_cluster: empty graph");
    if (resolution <= 0) throw Error("modularity_cluster: resolution must be positive");

    detail::LevelGraph g = detail::level_graph_from_matrix(s);
    std::vector<int> membership(n);
    for (int i = 0; i < n; ++i) membership[i] = i;
    if (g.m2 <= 0) return canonical_partition(membership);

    std::mt19937_64 rng(seed);
    while (true) {
        std::vector<int> node2comm(g.size());
        for (int i = 0; i < g.size(); ++i) node2comm[i] = i;
        if (!detail::local_moving(g, node2comm, resolution, rng)) break;

        // renumber communities of this level
        std::unordered_map<int, int> relabel;
        for (int& c : node2comm) {
            auto [it, ins] = relabel.try_emplace(c, static_cast<int>(relabel.size()));
            c = it->second;
        }
        for (int& m : membership) m = node2comm[m];
        if (static_cast<int>(relabel.size()) == g.size()) break;
        g = detail::aggregate(g, node2comm, static_cast<int>(relabel.size()));
    }
    return canonical_partition(membership);
}

// --- hierarchical decomposition --------------------------------------------

struct DecomposePolicy {
    int min_size = 10;
    int max_depth = 3;
    double resolution = 1.0;
    uint64_t seed = 1;
};

struct ClusterTree {
    std::string label;          // "0" for the root, then "2", "2.1", ...
    int depth = 0;
    std::vector<int> classes;   // member ordinals in the root matrix
    Partition partition;        // valid when the node has children
    std::vector<ClusterTree> children;

    bool is_leaf() const { return children.empty(); }
};

inline SymmetricMatrix submatrix(const SymmetricMatrix& s, const std::vector<int>& indices) {
    SymmetricMatrix out(static_cast<int>(indices.size()), s.kind());
    for (size_t i = 0; i < indices.size(); ++i)
        for (size_t j = i; j < indices.size(); ++j)
            out.set(static_cast<int>(i), static_cast<int>(j), s(indices[i], indices[j]));
    return out;
}

namespace detail {

inline void decompose_node(const SymmetricMatrix& root, ClusterTree& node,
                           const DecomposePolicy& policy) {
    const int size = static_cast<int>(node.classes.size());
    if (size < policy.min_size || node.depth >= policy.max_depth) return;

    const SymmetricMatrix sub = submatrix(root, node.classes);
    Partition p = modularity_cluster(sub, policy.resolution, policy.seed);
    if (p.k <= 1) return;

    node.partition = p;
    node.children.resize(p.k);
    for (int c = 1; c <= p.k; ++c) {
        ClusterTree& child = node.children[c - 1];
        child.depth = node.depth + 1;
        child.label = node.label == "0" ? std::to_string(c) : node.label + "." + std::to_string(c);
        for (int i = 0; i < size; ++i)
            if (p.assignment[i] == c) child.classes.push_back(node.classes[i]);
        decompose_node(root, child, policy);
    }
}

}  // namespace detail

// Clusters the root matrix, then recursively each cluster's induced submatrix
// until the policy stops. Leaf class sets partition the root class set.
inline ClusterTree decompose(const SymmetricMatrix& s, const DecomposePolicy& policy = {}) {
    ClusterTree root;
    root.label = "0";
    root.depth = 0;
    root.classes.resize(s.size());
    for (int i = 0; i < s.size(); ++i) root.classes[i] = i;
    detail::decompose_node(s, root, policy);
    return root;
}

// --- lexical cluster summaries ----------------------------------------------

struct TermTable {
    int top_k = 10;
    // per cluster (index = id - 1): (word, frequency), ordered by frequency
    // descending then alphabetically
    std::vector<std::vector<std::pair<std::string, int>>> clusters;
};

inline const std::unordered_set<std::string>& default_stopwords() {
    static const std::unordered_set<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any",
        "are", "as", "at", "be", "because", "been", "before", "being", "below", "between",
        "both", "but", "by", "can", "cannot", "could", "did", "do", "does", "doing", "down",
        "during", "each", "eg", "etc", "few", "for", "from", "further", "had", "has", "have",
        "having", "he", "her", "here", "hers", "him", "his", "how", "i", "ie", "if", "in",
        "into", "is", "it", "its", "itself", "more", "most", "my", "no", "nor", "not", "of",
        "off", "on", "once", "only", "or", "other", "ought", "our", "ours", "out", "over",
        "own", "same", "she", "should", "so", "some", "such", "than", "that", "the", "their",
        "theirs", "them", "then", "there", "these", "they", "this", "those", "through", "to",
        "too", "under", "until", "up", "very", "was", "we", "were", "what", "when", "where",
        "which", "while", "who", "whom", "why", "with", "would", "you", "your", "yours",
    };
    return words;
}

namespace detail {

inline std::vector<std::string> tokenize_title(std::string_view title) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        while (!current.empty() && current.back() == '-') current.pop_back();
        size_t start = 0;
        while (start < current.size() && current[start] == '-') ++start;
        std::string word = current.substr(start);
        bool has_alpha = std::any_of(word.begin(), word.end(), [](unsigned char c) {
            return std::isalpha(c);
        });
        if (word.size() >= 2 && has_alpha) tokens.push_back(std::move(word));
        current.clear();
    };
    for (char ch : title) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || ch == '-')
            current.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

}  // namespace detail

// Word frequencies over the titles of each cluster's member classes,
// stopword-filtered and lowercased.
inline TermTable cluster_terms(const Partition& p, const ClassScheme& scheme,
                               const std::unordered_set<std::string>& stopwords =
                                   default_stopwords(),
                               int top_k = 10) {
    if (static_cast<int>(p.assignment.size()) != scheme.size())
        throw Error("cluster_terms: partition does not cover the scheme");

    std::vector<std::map<std::string, int>> counts(p.k);
    for (int i = 0; i < scheme.size(); ++i) {
        for (auto& word : detail::tokenize_title(scheme.title(i))) {
            if (!stopwords.count(word)) ++counts[p.assignment[i] - 1][word];
        }
    }

    TermTable table;
    table.top_k = top_k;
    table.clusters.resize(p.k);
    for (int c = 0; c < p.k; ++c) {
        std::vector<std::pair<std::string, int>> ranked(counts[c].begin(), counts[c].end());
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (static_cast<int>(ranked.size()) > top_k) ranked.resize(top_k);
        table.clusters[c] = std::move(ranked);
    }
    return table;
}

}  // namespace patmap
