#include <catch2/catch.hpp>

#include "patmap/diversity.hpp"
#include "test_support.hpp"

using namespace patmap;

namespace {

DistanceMatrix random_distances(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    DistanceMatrix d;
    d.n = n;
    d.values.assign(static_cast<size_t>(n) * (n + 1) / 2, 0.0);
    size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j, ++k) d.values[k] = i == j ? 0.0 : dist(rng);
    return d;
}

std::vector<double> random_weights(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> w(0.0, 10.0);
    std::bernoulli_distribution keep(0.6);
    std::vector<double> weights(n, 0.0);
    for (auto& x : weights)
        if (keep(rng)) x = w(rng);
    if (std::all_of(weights.begin(), weights.end(), [](double v) { return v == 0; }))
        weights[0] = 1.0;
    return weights;
}

}  // namespace

TEST_CASE("all mass on one class gives delta 0", "[diversity]") {
    DistanceMatrix d;
    d.n = 3;
    d.values.assign(6, 0.5);
    std::vector<double> weights = {0.0, 7.0, 0.0};
    REQUIRE(rao_delta(weights, d) == 0.0);
}

TEST_CASE("two equal classes at distance 0.4 give delta 0.2", "[diversity]") {
    DistanceMatrix d;
    d.n = 2;
    d.values = {0.0, 0.4, 0.0};  // (0,0), (0,1), (1,1)
    std::vector<double> weights = {0.5, 0.5};
    REQUIRE(rao_delta(weights, d) == Approx(0.2).margin(1e-12));
}

TEST_CASE("rao delta matches the brute-force double sum", "[diversity]") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 15);
        auto d = random_distances(rng, n);
        auto weights = random_weights(rng, n);
        REQUIRE(rao_delta(weights, d) ==
                Approx(testsupport::oracle_rao_delta(weights, d)).margin(1e-12));
    }
}

TEST_CASE("delta is invariant under positive rescaling of raw counts", "[diversity]") {
    std::mt19937_64 rng(52);
    auto d = random_distances(rng, 8);
    auto weights = random_weights(rng, 8);
    const double base = rao_delta(weights, d);
    for (double c : {0.25, 3.0, 1000.0}) {
        auto scaled = weights;
        for (auto& w : scaled) w *= c;
        REQUIRE(rao_delta(scaled, d) == Approx(base).margin(1e-12));
    }
}

TEST_CASE("spreading mass across distant classes increases delta", "[diversity]") {
    DistanceMatrix d;
    d.n = 2;
    d.values = {0.0, 0.6, 0.0};
    const double concentrated = rao_delta({1.0, 0.0}, d);
    const double spread = rao_delta({0.5, 0.5}, d);
    REQUIRE(concentrated == 0.0);
    REQUIRE(spread > concentrated);
}

TEST_CASE("delta never exceeds the largest off-diagonal distance", "[diversity]") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 10);
        auto d = random_distances(rng, n);
        auto weights = random_weights(rng, n);
        double dmax = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) dmax = std::max(dmax, d(i, j));
        REQUIRE(rao_delta(weights, d) <= dmax + 1e-12);
    }
}

TEST_CASE("rao delta input validation", "[diversity]") {
    DistanceMatrix d;
    d.n = 2;
    d.values = {0.0, 0.4, 0.0};
    REQUIRE_THROWS_AS(rao_delta({0.0, 0.0}, d), Error);          // empty portfolio
    REQUIRE_THROWS_AS(rao_delta({1.0, 1.0, 1.0}, d), Error);     // dimension mismatch
    REQUIRE_THROWS_AS(rao_delta({-1.0, 1.0}, d), Error);         // negative weight
}

TEST_CASE("d2_3 transform", "[diversity]") {
    REQUIRE(d2_3(0.0) == 1.0);
    REQUIRE_THROWS_AS(d2_3(1.0), Error);
    REQUIRE_THROWS_AS(d2_3(-0.01), Error);

    SECTION("delta 0.53 prints as 2.13 at two decimals") {
        const double v = d2_3(0.53);
        REQUIRE(v == Approx(2.12766).margin(5e-6));
        REQUIRE(std::round(v * 100.0) / 100.0 == 2.13);
    }

    SECTION("the pair (0.80, 5.01) is consistent under 2-decimal rounding") {
        // A table delta of 0.80 stands for some exact delta in [0.795, 0.805);
        // the transformed values over that interval cover 5.01.
        const double lo = d2_3(0.795);
        const double hi = d2_3(0.805 - 1e-12);
        REQUIRE(lo <= 5.01);
        REQUIRE(hi >= 5.01);
    }
}

TEST_CASE("delta ranking equals d2_3 ranking", "[diversity]") {
    std::mt19937_64 rng(54);
    auto d = random_distances(rng, 10);

    std::vector<double> deltas, transforms;
    for (int i = 0; i < 12; ++i) {
        const double delta = rao_delta(random_weights(rng, 10), d);
        deltas.push_back(delta);
        transforms.push_back(d2_3(delta));
    }
    std::vector<size_t> by_delta(deltas.size()), by_d23(deltas.size());
    for (size_t i = 0; i < deltas.size(); ++i) by_delta[i] = by_d23[i] = i;
    std::sort(by_delta.begin(), by_delta.end(),
              [&](size_t a, size_t b) { return deltas[a] > deltas[b]; });
    std::sort(by_d23.begin(), by_d23.end(),
              [&](size_t a, size_t b) { return transforms[a] > transforms[b]; });
    REQUIRE(by_delta == by_d23);
}

TEST_CASE("compute_diversity bundles the pair with its sample", "[diversity]") {
    DistanceMatrix d;
    d.n = 2;
    d.values = {0.0, 0.5, 0.0};
    auto r = compute_diversity("boston", {1.0, 1.0}, 2, d);
    REQUIRE(r.sample_name == "boston");
    REQUIRE(r.delta == Approx(0.25).margin(1e-12));
    REQUIRE(r.d2_3 == Approx(1.0 / 0.75).margin(1e-12));
    REQUIRE(r.n_patents == 2);
}
