#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "tbeval/operating_point.hpp"
#include "tbeval/rng.hpp"

using namespace tbeval;

namespace {

Sample scan_sample() {
    // pos {0.9, 0.7, 0.3}, neg {0.8, 0.2, 0.1}
    return {{0.9, 0.7, 0.3, 0.8, 0.2, 0.1}, {1, 1, 1, 0, 0, 0}};
}

Sample random_sample(Rng& rng, std::size_t max_n, int tie_level) {
    for (;;) {
        std::size_t n = 2 + rng.uniform_index(max_n - 1);
        Sample s;
        for (std::size_t i = 0; i < n; ++i) {
            double x = rng.uniform01();
            if (tie_level > 0) x = std::round(x * tie_level) / tie_level;
            s.scores.push_back(x);
            s.labels.push_back(rng.bernoulli(0.35) ? 1 : 0);
        }
        if (s.n_positive() > 0 && s.n_negative() > 0) return s;
    }
}

}  // namespace

TEST_CASE("spec_at_sens on the worked example", "[operating_point]") {
    auto op = spec_at_sens(scan_sample(), 0.9);
    CHECK(op.threshold == 0.3);
    CHECK(op.point.sensitivity == 1.0);
    CHECK(op.point.specificity == Catch::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(op.selection_rule == SelectionRule::spec_at_sens);
    CHECK(op.target == 0.9);
}

TEST_CASE("spec_at_sens edge cases", "[operating_point]") {
    SECTION("target 1.0 on tie-free data returns the minimum positive score") {
        auto op = spec_at_sens(scan_sample(), 1.0);
        CHECK(op.threshold == 0.3);
        CHECK(op.point.sensitivity == 1.0);
    }
    SECTION("perfectly separated data achieves specificity 1") {
        Sample s{{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}};
        auto op = spec_at_sens(s, 0.9);
        CHECK(op.point.specificity == 1.0);
        CHECK(op.point.sensitivity == 1.0);
    }
    SECTION("invalid target") {
        CHECK_THROWS_AS(spec_at_sens(scan_sample(), 0.0), Error);
        CHECK_THROWS_AS(spec_at_sens(scan_sample(), 1.5), Error);
    }
}

TEST_CASE("sens_at_spec on the worked example", "[operating_point]") {
    auto op = sens_at_spec(scan_sample(), 0.7);
    CHECK(op.threshold == 0.9);
    CHECK(op.point.sensitivity == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(op.point.specificity == 1.0);
}

TEST_CASE("sens_at_spec edge cases", "[operating_point]") {
    SECTION("target 0 puts everything positive") {
        auto op = sens_at_spec(scan_sample(), 0.0);
        CHECK(op.point.sensitivity == 1.0);
    }
    SECTION("perfectly separated data keeps sensitivity 1") {
        Sample s{{0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}};
        auto op = sens_at_spec(s, 0.7);
        CHECK(op.point.sensitivity == 1.0);
    }
    SECTION("unreachable specificity falls back to predicting nothing") {
        Sample s{{0.5, 0.5}, {1, 0}};
        auto op = sens_at_spec(s, 0.9);
        CHECK(std::isinf(op.threshold));
        CHECK(op.point.sensitivity == 0.0);
        CHECK(op.point.specificity == 1.0);
    }
}

TEST_CASE("matching agrees with exhaustive threshold scans", "[operating_point]") {
    Rng rng(31);
    for (int rep = 0; rep < 100; ++rep) {
        Sample s = random_sample(rng, 200, rep % 2 ? 12 : 0);
        double target = 0.05 + 0.9 * rng.uniform01();

        auto op_s = spec_at_sens(s, target);
        auto oracle_s = oracle::best_spec_at_sens(s.scores, s.labels, target);
        CHECK(op_s.point.specificity == oracle_s.specificity);
        CHECK(op_s.point.sensitivity == oracle_s.sensitivity);
        CHECK(op_s.threshold == oracle_s.threshold);

        auto op_p = sens_at_spec(s, target);
        auto oracle_p = oracle::best_sens_at_spec(s.scores, s.labels, target);
        CHECK(op_p.point.sensitivity == oracle_p.sensitivity);
        CHECK(op_p.point.specificity == oracle_p.specificity);
        CHECK(op_p.threshold == oracle_p.threshold);
    }
}

TEST_CASE("selected points satisfy their constraint monotonically", "[operating_point]") {
    Rng rng(37);
    Sample s = random_sample(rng, 150, 8);
    double prev_spec = 0.0;
    for (double t = 0.95; t >= 0.1; t -= 0.05) {
        auto op = spec_at_sens(s, t);
        CHECK(op.point.sensitivity >= t);
        // decreasing the sensitivity target never decreases achievable specificity
        CHECK(op.point.specificity >= prev_spec);
        prev_spec = op.point.specificity;
    }
}

TEST_CASE("selected point lies on the empirical roc curve", "[operating_point]") {
    Rng rng(41);
    for (int rep = 0; rep < 20; ++rep) {
        Sample s = random_sample(rng, 100, 6);
        auto curve = roc_curve(s.scores, s.labels);
        auto op = spec_at_sens(s, 0.8);
        bool on_curve = false;
        for (const auto& p : curve.points)
            on_curve |= (p.tpr == op.point.sensitivity &&
                         std::abs((1.0 - p.fpr) - op.point.specificity) < 1e-12);
        CHECK(on_curve);
    }
}

TEST_CASE("matching is invariant under increasing score transforms", "[operating_point]") {
    Rng rng(43);
    for (int rep = 0; rep < 20; ++rep) {
        Sample s = random_sample(rng, 100, 5);
        auto before = spec_at_sens(s, 0.75);
        Sample t = s;
        for (auto& x : t.scores) x = std::atan(4.0 * x);
        auto after = spec_at_sens(t, 0.75);
        CHECK(after.point.sensitivity == before.point.sensitivity);
        CHECK(after.point.specificity == before.point.specificity);
    }
}

TEST_CASE("match_mean_reader delegates with the panel mean", "[operating_point]") {
    Sample s = scan_sample();
    std::vector<PerformancePoint> panel = {
        {0.8, 0.6, std::nullopt, 10, 10},
        {0.6, 0.8, std::nullopt, 10, 10},
    };
    auto op = match_mean_reader(s, panel, MatchAxis::specificity);
    auto direct = sens_at_spec(s, 0.7);
    CHECK(op.point.sensitivity == direct.point.sensitivity);
    CHECK(op.point.specificity == direct.point.specificity);
    CHECK(op.selection_rule == SelectionRule::match_mean_reader);
    CHECK(op.target == Catch::Approx(0.7).epsilon(1e-12));

    SECTION("single-reader panel equals individual matching") {
        std::vector<PerformancePoint> one = {panel[0]};
        auto mean_op = match_mean_reader(s, one, MatchAxis::sensitivity);
        auto ind_op = match_individual_reader(s, panel[0], MatchAxis::sensitivity);
        CHECK(mean_op.threshold == ind_op.threshold);
        CHECK(mean_op.point.sensitivity == ind_op.point.sensitivity);
    }
    SECTION("empty panel") {
        CHECK_THROWS_AS(match_mean_reader(s, {}, MatchAxis::sensitivity), Error);
    }
}

TEST_CASE("matching a reader whose calls are the scores reproduces the reader",
          "[operating_point]") {
    // Encode a reader's binary calls as the score vector itself.
    std::vector<std::uint8_t> labels = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    std::vector<std::uint8_t> calls = {1, 0, 1, 1, 0, 0, 1, 0, 0, 0};
    Sample s;
    s.labels = labels;
    for (auto c : calls) s.scores.push_back(c ? 1.0 : 0.0);

    std::size_t tp = 0, tn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] && calls[i]) ++tp;
        if (!labels[i] && !calls[i]) ++tn;
    }
    PerformancePoint reader{tp / 4.0, tn / 6.0, std::nullopt, 4, 6};

    auto op = match_individual_reader(s, reader, MatchAxis::specificity);
    CHECK(op.point.sensitivity == Catch::Approx(reader.sensitivity).epsilon(1e-12));
}

TEST_CASE("who_compliance boundaries are inclusive", "[operating_point]") {
    CHECK(who_compliance({0.93, 0.77, std::nullopt, 100, 100}));
    CHECK(who_compliance({0.90, 0.70, std::nullopt, 100, 100}));
    CHECK_FALSE(who_compliance({0.89, 0.99, std::nullopt, 100, 100}));
    CHECK_FALSE(who_compliance({0.99, 0.69, std::nullopt, 100, 100}));
}
