#pragma once

// Portfolio diversity: Rao-Stirling delta over (1 - cosine) class distances,
// and the transformed measure 2D3 = 1 / (1 - delta).

#include <string>
#include <vector>

#include "patmap/common.hpp"
#include "patmap/similarity.hpp"

namespace patmap {

struct DiversityResult {
    std::string sample_name;
    double delta = 0.0;
    double d2_3 = 1.0;
    long n_patents = 0;
};

// delta = sum over ordered pairs i != j of p_i * p_j * d_ij, with the weights
// normalized to proportions internally. Invariant under positive rescaling of
// the raw weights.
inline double rao_delta(const std::vector<double>& weights, const DistanceMatrix& d) {
    if (static_cast<int>(weights.size()) != d.n)
        throw Error("rao_delta: portfolio and distance matrix dimensions differ");

    double total = 0.0;
    std::vector<int> support;
    for (int i = 0; i < d.n; ++i) {
        if (weights[i] < 0) throw Error("rao_delta: negative portfolio weight");
        if (weights[i] > 0) {
            support.push_back(i);
            total += weights[i];
        }
    }
    if (support.empty() || total <= 0) throw Error("rao_delta: empty portfolio");

    double delta = 0.0;
    for (size_t a = 0; a < support.size(); ++a) {
        const int i = support[a];
        const double pi = weights[i] / total;
        for (size_t b = a + 1; b < support.size(); ++b) {
            const int j = support[b];
            const double pj = weights[j] / total;
            delta += 2.0 * pi * pj * d(i, j);
        }
    }
    return delta;
}

// 1 / (1 - delta); defined for 0 <= delta < 1.
inline double d2_3(double delta) {
    if (delta < 0.0 || delta >= 1.0) throw Error("d2_3: delta must lie in [0, 1)");
    return 1.0 / (1.0 - delta);
}

inline DiversityResult compute_diversity(const std::string& sample_name,
                                         const std::vector<double>& weights, long n_patents,
                                         const DistanceMatrix& d) {
    DiversityResult r;
    r.sample_name = sample_name;
    r.delta = rao_delta(weights, d);
    r.d2_3 = d2_3(r.delta);
    r.n_patents = n_patents;
    return r;
}

}  // namespace patmap
