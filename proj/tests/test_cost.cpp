#include <catch2/catch_amalgamated.hpp>

#include "tbeval/cost.hpp"

using namespace tbeval;

namespace {

CostInputs inputs(double p, double se, double sp) {
    CostInputs in;
    in.prevalence = p;
    in.sensitivity = se;
    in.specificity = sp;
    return in;
}

}  // namespace

TEST_CASE("evaluate_cost reproduces the measured-point savings", "[cost]") {
    // India-dataset performance (94/95) at 10% and 1% prevalence.
    auto high = evaluate_cost(inputs(0.10, 0.94, 0.95));
    CHECK(high.triage_positive_rate == Catch::Approx(0.139).epsilon(1e-12));
    CHECK(high.cost_per_case_detected == Catch::Approx(35.16).margin(0.005));
    CHECK(high.naat_only_cost_per_case == Catch::Approx(130.60).margin(1e-9));
    CHECK(100.0 * high.savings_fraction == Catch::Approx(73.0).margin(0.7));

    auto low = evaluate_cost(inputs(0.01, 0.94, 0.95));
    CHECK(low.cost_per_case_detected == Catch::Approx(240.34).margin(0.005));
    CHECK(100.0 * low.savings_fraction == Catch::Approx(82.0).margin(0.7));
}

TEST_CASE("evaluate_cost reproduces the WHO-target and lower-spec savings", "[cost]") {
    CHECK(100.0 * evaluate_cost(inputs(0.10, 0.90, 0.70)).savings_fraction ==
          Catch::Approx(47.0).margin(0.7));
    CHECK(100.0 * evaluate_cost(inputs(0.01, 0.90, 0.70)).savings_fraction ==
          Catch::Approx(53.0).margin(0.7));
    CHECK(100.0 * evaluate_cost(inputs(0.10, 0.90, 0.65)).savings_fraction ==
          Catch::Approx(42.0).margin(0.7));
    CHECK(100.0 * evaluate_cost(inputs(0.01, 0.90, 0.65)).savings_fraction ==
          Catch::Approx(48.0).margin(0.7));
}

TEST_CASE("perfect triage costs exactly one confirmatory test per case", "[cost]") {
    auto in = inputs(0.07, 0.83, 1.0);
    in.cost_cxr = 0.0;
    in.cost_cad = 0.0;
    auto r = evaluate_cost(in);
    CHECK(r.cost_per_case_detected == Catch::Approx(in.cost_confirmatory_test).epsilon(1e-12));
}

TEST_CASE("savings are invariant under common cost scaling", "[cost]") {
    auto base = inputs(0.05, 0.9, 0.8);
    base.cost_cad = 0.25;
    auto r1 = evaluate_cost(base);
    auto scaled = base;
    scaled.cost_confirmatory_test *= 10.0;
    scaled.cost_cxr *= 10.0;
    scaled.cost_cad *= 10.0;
    auto r2 = evaluate_cost(scaled);
    CHECK(r2.savings_fraction == Catch::Approx(r1.savings_fraction).epsilon(1e-12));
    CHECK(r2.cost_per_case_detected == Catch::Approx(10.0 * r1.cost_per_case_detected).epsilon(1e-12));
}

TEST_CASE("cost monotonicity in prevalence and specificity", "[cost]") {
    double prev_cost = 1e18;
    for (double p = 0.01; p <= 0.301; p += 0.01) {
        double c = evaluate_cost(inputs(p, 0.9, 0.75)).cost_per_case_detected;
        CHECK(c < prev_cost);
        prev_cost = c;
    }
    double prev_savings = -1.0;
    prev_cost = 1e18;
    for (double sp = 0.5; sp <= 0.99; sp += 0.01) {
        auto r = evaluate_cost(inputs(0.05, 0.9, sp));
        CHECK(r.cost_per_case_detected < prev_cost);
        CHECK(r.savings_fraction > prev_savings);
        prev_cost = r.cost_per_case_detected;
        prev_savings = r.savings_fraction;
    }
}

TEST_CASE("cost result internal identities", "[cost]") {
    auto r = evaluate_cost(inputs(0.08, 0.88, 0.77));
    CHECK(r.savings_fraction ==
          Catch::Approx(1.0 - r.cost_per_case_detected / r.naat_only_cost_per_case)
              .epsilon(1e-12));
    CHECK(r.triage_positive_rate == Catch::Approx(0.08 * 0.88 + 0.92 * 0.23).epsilon(1e-12));
    CHECK(r.true_positive_rate_per_patient == Catch::Approx(0.08 * 0.88).epsilon(1e-12));
}

TEST_CASE("evaluate_cost input validation", "[cost]") {
    CHECK_THROWS_AS(evaluate_cost(inputs(0.0, 0.9, 0.9)), Error);
    CHECK_THROWS_AS(evaluate_cost(inputs(1.0, 0.9, 0.9)), Error);
    CHECK_THROWS_AS(evaluate_cost(inputs(0.1, 0.0, 0.9)), Error);  // no detectable cases
    CHECK_THROWS_AS(evaluate_cost(inputs(0.1, 1.2, 0.9)), Error);
    auto neg = inputs(0.1, 0.9, 0.9);
    neg.cost_cxr = -1.0;
    CHECK_THROWS_AS(evaluate_cost(neg), Error);
}

TEST_CASE("prevalence_sweep walks the grid", "[cost]") {
    auto sweep = prevalence_sweep(inputs(0.0, 0.90, 0.70), 0.01, 0.10, 0.01);
    REQUIRE(sweep.points.size() == 10);
    CHECK(sweep.points.front().prevalence == Catch::Approx(0.01));
    CHECK(sweep.points.back().prevalence == Catch::Approx(0.10));
    CHECK(sweep.cost_per_case_decreasing);
    CHECK(100.0 * sweep.points.front().result.savings_fraction == Catch::Approx(53.0).margin(0.7));
    CHECK(100.0 * sweep.points.back().result.savings_fraction == Catch::Approx(47.0).margin(0.7));

    SECTION("degenerate single-point sweep equals evaluate_cost") {
        auto single = prevalence_sweep(inputs(0.0, 0.94, 0.95), 0.05, 0.05, 0.01);
        REQUIRE(single.points.size() == 1);
        auto direct = evaluate_cost(inputs(0.05, 0.94, 0.95));
        CHECK(single.points[0].result.cost_per_case_detected == direct.cost_per_case_detected);
    }
    SECTION("bad grids") {
        CHECK_THROWS_AS(prevalence_sweep(inputs(0, 0.9, 0.9), 0.1, 0.01, 0.01), Error);
        CHECK_THROWS_AS(prevalence_sweep(inputs(0, 0.9, 0.9), 0.01, 0.1, 0.0), Error);
        CHECK_THROWS_AS(prevalence_sweep(inputs(0, 0.9, 0.9), 0.0, 0.1, 0.01), Error);
    }
}

TEST_CASE("workflow_sensitivity is the triage sensitivity", "[cost]") {
    CHECK(workflow_sensitivity(inputs(0.1, 0.94, 0.9)) == 0.94);
    CHECK(workflow_sensitivity(inputs(0.1, 0.94, 0.9)) >= 0.90);  // WHO floor passes
    CHECK(workflow_sensitivity(inputs(0.1, 0.89, 0.9)) < 0.90);   // floor fails
    CHECK(workflow_sensitivity(inputs(0.1, 0.90, 0.9)) >= 0.90);  // boundary passes
}
