#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "vts/errors.hpp"
#include "vts/objectives.hpp"

using namespace vts;
using namespace vts::objectives;

namespace {

Vec polar(double r, double rad) { return {r * std::cos(rad), r * std::sin(rad)}; }

Vec random_vec(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> n01;
    Vec v(d);
    for (auto& x : v) x = n01(rng);
    return v;
}

// Central difference of f along coordinate i of v.
double central(const std::function<double(const Vec&)>& f, Vec v, std::size_t i, double h) {
    const double x = v[i];
    v[i] = x + h;
    const double up = f(v);
    v[i] = x - h;
    const double down = f(v);
    return (up - down) / (2.0 * h);
}

bool close(double analytic, double numeric) {
    return std::abs(analytic - numeric) <= 1e-4 * std::max(1.0, std::abs(numeric));
}

}  // namespace

TEST_CASE("contrastive loss") {
    const Vec a{1.0, 0.0};
    CHECK(contrastive_loss(a, a, true, 0.8) == 0.0);
    CHECK(contrastive_loss(a, Vec{-1.0, 0.0}, false, 0.8) == 0.0);
    CHECK(contrastive_loss(Vec{0.0, 0.0}, Vec{0.3, 0.0}, false, 0.8) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(contrastive_loss(Vec{0.0, 0.0}, Vec{0.3, 0.0}, true, 0.8) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("triplet loss") {
    const Vec a{1.0, 0.0};
    CHECK(triplet_loss({a, a, Vec{-1.0, 0.0}}, 0.8) == 0.0);
    CHECK(triplet_loss({a, a, a}, 0.8) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(triplet_loss({Vec{0, 0}, Vec{1.0, 0}, Vec{0, 0.5}}, 0.8) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("tracking loss combines means with lambda_t") {
    // Contrastive term: same pair at distance sqrt(0.2) gives 0.2.
    const std::vector<LabeledPair> pairs = {{Vec{0, 0}, Vec{std::sqrt(0.2), 0}, true}};
    // Triplet term: d(a,p)=0.5, d(a,n)=1.2, margin 0.8 gives 0.1.
    const std::vector<Triplet> trips = {{Vec{0, 0}, Vec{0.5, 0}, Vec{0, 1.2}}};
    LossWeights w;
    CHECK(tracking_loss(pairs, trips, w) == doctest::Approx(0.3).epsilon(1e-12));
    w.lambda_t = 2.0;
    CHECK(tracking_loss(pairs, trips, w) == doctest::Approx(0.4).epsilon(1e-12));

    const std::vector<LabeledPair> zero_pairs = {{Vec{1, 0}, Vec{1, 0}, true}};
    const std::vector<Triplet> zero_trips = {{Vec{1, 0}, Vec{1, 0}, Vec{-1, 0}}};
    CHECK(tracking_loss(zero_pairs, zero_trips, LossWeights{}) == 0.0);

    CHECK_THROWS_AS((void)tracking_loss({}, trips, w), ContractError);
    CHECK_THROWS_AS((void)tracking_loss(pairs, {}, w), ContractError);
    w.margin = 0.0;
    CHECK_THROWS_AS((void)tracking_loss(pairs, trips, w), ContractError);
}

TEST_CASE("a separate contrastive margin is honoured") {
    const std::vector<LabeledPair> pairs = {{Vec{0, 0}, Vec{0.3, 0}, false}};
    const std::vector<Triplet> trips = {{Vec{0, 0}, Vec{0, 0}, Vec{5, 0}}};
    LossWeights w;
    CHECK(tracking_loss(pairs, trips, w) == doctest::Approx(0.25).epsilon(1e-12));
    w.contrastive_margin = 1.3;
    CHECK(tracking_loss(pairs, trips, w) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scoring loss") {
    CHECK(scoring_loss(Vec{0.4, 0.7}, Vec{0.4, 0.7}) == 0.0);
    CHECK(scoring_loss(Vec{1, 0}, Vec{0, 1}) == 1.0);
    CHECK(scoring_loss(Vec{0.9, 0.5}, Vec{0.7, 0.6}) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK_THROWS_AS((void)scoring_loss(Vec{1}, Vec{1, 2}), ContractError);
    CHECK_THROWS_AS((void)scoring_loss(Vec{}, Vec{}), ContractError);
}

TEST_CASE("joint loss") {
    CHECK(joint_loss(0, 0, 0, {}) == 0.0);
    CHECK(joint_loss(1, 2, 3, {}) == 6.0);
    LossWeights w;
    w.lambda1 = 0.5;
    w.lambda2 = 1.0;
    w.lambda3 = 2.0;
    CHECK(joint_loss(1, 2, 3, w) == doctest::Approx(8.5).epsilon(1e-15));
}

TEST_CASE("random vectors: non-negativity and symmetry") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const auto a = random_vec(rng, 4), b = random_vec(rng, 4), c = random_vec(rng, 4);
        for (bool same : {true, false}) {
            CHECK(contrastive_loss(a, b, same, 0.8) >= 0.0);
            CHECK(contrastive_loss(a, b, same, 0.8) == contrastive_loss(b, a, same, 0.8));
        }
        CHECK(triplet_loss({a, b, c}, 0.8) >= 0.0);
        CHECK(scoring_loss(a, b) >= 0.0);
    }
}

TEST_CASE("triplet loss is monotone in each distance") {
    const Vec anchor{0.0, 0.0};
    for (double dp = 0.0; dp <= 2.0; dp += 0.25) {
        double prev = std::numeric_limits<double>::infinity();
        for (double dn = 0.0; dn <= 2.0; dn += 0.25) {
            const double l = triplet_loss({anchor, polar(dp, 0.3), polar(dn, 1.9)}, 0.8);
            CHECK(l <= prev);
            prev = l;
        }
    }
    for (double dn = 0.0; dn <= 2.0; dn += 0.25) {
        double prev = -1.0;
        for (double dp = 0.0; dp <= 2.0; dp += 0.25) {
            const double l = triplet_loss({anchor, polar(dp, 0.3), polar(dn, 1.9)}, 0.8);
            CHECK(l >= prev);
            prev = l;
        }
    }
}

TEST_CASE("analytic subgradients agree with central differences away from kinks") {
    std::mt19937_64 rng(99);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 100) {
        const auto a = random_vec(rng, 3), b = random_vec(rng, 3), c = random_vec(rng, 3);
        const bool same = checked % 2 == 0;
        const double margin = 2.5;
        const double d_ab = euclidean(a, b);
        const double slack = euclidean(a, b) - euclidean(a, c) + margin;
        if (std::abs(d_ab - margin) < 1e-3 || std::abs(slack) < 1e-3 || d_ab < 1e-3 || euclidean(a, c) < 1e-3) continue;

        const auto pg = contrastive_gradient(a, b, same, margin);
        const auto tg = triplet_gradient({a, b, c}, margin);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(close(pg.da[i], central([&](const Vec& v) { return contrastive_loss(v, b, same, margin); }, a, i, h)));
            CHECK(close(pg.db[i], central([&](const Vec& v) { return contrastive_loss(a, v, same, margin); }, b, i, h)));
            CHECK(close(tg.da[i], central([&](const Vec& v) { return triplet_loss({v, b, c}, margin); }, a, i, h)));
            CHECK(close(tg.dp[i], central([&](const Vec& v) { return triplet_loss({a, v, c}, margin); }, b, i, h)));
            CHECK(close(tg.dn[i], central([&](const Vec& v) { return triplet_loss({a, b, v}, margin); }, c, i, h)));
        }
        ++checked;
    }
}
