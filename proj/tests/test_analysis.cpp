#include <doctest.h>

#include <cmath>

#include "bbfgs/analysis.hpp"
#include "support/test_util.hpp"

using namespace bbfgs;
using namespace bbfgs::testing;

namespace {

TheoryBounds all_ones(std::size_t memory = 1) {
    // hand-set bounds for testing the rate formulas in isolation
    return TheoryBounds{1.0, 1.0, 1.0, memory, 1.0, 1.0};
}

}  // namespace

TEST_CASE("metric_bounds with zero memory is the identity sandwich") {
    TheoryBounds b = metric_bounds(1.0, 1.0, 0);
    CHECK(b.gamma_lb == doctest::Approx(1.0));
    CHECK(b.Gamma_ub == doctest::Approx(1.0));
    CHECK(b.kappa == doctest::Approx(1.0));
}

TEST_CASE("metric_bounds hand-checked values at lambda = Lambda = 1") {
    // alpha = (1 + 1)^2 = 4
    TheoryBounds m1 = metric_bounds(1.0, 1.0, 1);
    CHECK(m1.gamma_lb == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m1.Gamma_ub == doctest::Approx(5.0).epsilon(1e-15));  // 4 + 3/3

    TheoryBounds m5 = metric_bounds(1.0, 1.0, 5);
    CHECK(m5.gamma_lb == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(m5.Gamma_ub == doctest::Approx(1365.0).epsilon(1e-12));  // 4^5 + (4^5-1)/3
}

TEST_CASE("metric_bounds exact lower-bound formula") {
    for (std::size_t m : {0u, 1u, 3u, 7u}) {
        TheoryBounds b = metric_bounds(0.3, 2.5, m);
        CHECK(b.gamma_lb == 1.0 / (1.0 + double(m) * 2.5));
    }
}

TEST_CASE("metric_bounds monotonicity in memory") {
    double prev_gamma = 2.0, prev_Gamma = 0.0;
    for (std::size_t m = 0; m <= 6; ++m) {
        TheoryBounds b = metric_bounds(0.5, 2.0, m);
        CHECK(b.gamma_lb < prev_gamma);
        CHECK(b.Gamma_ub > prev_Gamma);
        prev_gamma = b.gamma_lb;
        prev_Gamma = b.Gamma_ub;
    }
}

TEST_CASE("geometric-sum upper bound never exceeds the closed form") {
    for (double lambda : {0.1, 0.5, 1.0}) {
        for (double Lambda : {1.0, 2.0, 10.0}) {
            if (Lambda < lambda) continue;
            for (std::size_t m : {1u, 2u, 5u}) {
                TheoryBounds b = metric_bounds(lambda, Lambda, m);
                CHECK(b.Gamma_ub <= gamma_upper_closed_form(lambda, Lambda, m) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("metric_bounds rejects bad constants") {
    CHECK_THROWS_AS(metric_bounds(0.0, 1.0, 1), BadConstants);
    CHECK_THROWS_AS(metric_bounds(2.0, 1.0, 1), BadConstants);
    CHECK_THROWS_AS(gamma_upper_closed_form(-1.0, 1.0, 1), BadConstants);
}

TEST_CASE("convergence_rate hand-checked value") {
    // rho = (1/(2*10*0.1) + 0) / (1 - 0.1) = 0.5 / 0.9
    CHECK(convergence_rate(0.1, 10.0, all_ones()) ==
          doctest::Approx(0.5 / 0.9).epsilon(1e-15));
}

TEST_CASE("convergence_rate guards") {
    CHECK_THROWS_AS(convergence_rate(0.6, 100.0, all_ones()), StepTooLarge);
    CHECK_THROWS_AS(convergence_rate(0.5, 100.0, all_ones()), StepTooLarge);  // boundary
    CHECK_THROWS_AS(convergence_rate(0.0, 100.0, all_ones()), StepTooLarge);
    CHECK_THROWS_AS(convergence_rate(0.1, 5.0, all_ones()), InnerLoopTooShort);
    CHECK_NOTHROW(convergence_rate(0.1, 6.0, all_ones()));
}

TEST_CASE("min_inner_loop hand-checked value") {
    // 1 / (2 * 0.1 * (1 - 0.1 * 1 * (2 - 1))) = 1 / 0.18
    CHECK(min_inner_loop(0.1, all_ones()) == doctest::Approx(1.0 / 0.18).epsilon(1e-15));
}

TEST_CASE("rate improves as the inner loop lengthens") {
    double prev = 2.0;
    for (double m : {10.0, 20.0, 50.0, 200.0}) {
        const double rho = convergence_rate(0.1, m, all_ones());
        CHECK(rho < prev);
        CHECK(rho < 1.0);
        prev = rho;
    }
}

TEST_CASE("rate is below one when the stepsize and inner-loop conditions hold") {
    TheoryBounds b = metric_bounds(0.5, 2.0, 1);
    const double eta = 0.25 * b.gamma_lb * b.lambda / (2.0 * b.Gamma_ub * b.Gamma_ub * b.Lambda * b.Lambda);
    const double m = 2.0 * min_inner_loop(eta, b);
    CHECK(convergence_rate(eta, m, b) < 1.0);
}

TEST_CASE("verify_vr_bound holds across random points") {
    Rng rng(3);
    Dataset data = make_synthetic_logistic(rng, 8, 3);
    LogisticModel model(data, 0.2);
    for (int rep = 0; rep < 10; ++rep) {
        Vector x = rand_vector(rng, 3);
        Vector w = rand_vector(rng, 3);
        for (std::size_t s : {1u, 2u, 4u, 8u}) {
            VrBoundReport report = verify_vr_bound(model, x, w, s);
            CHECK(report.holds);
            CHECK(report.lhs >= 0.0);
        }
    }
}

TEST_CASE("verify_vr_bound is tight-zero at the optimum") {
    Rng rng(5);
    Dataset data = make_synthetic_logistic(rng, 6, 3);
    LogisticModel model(data, 0.3);
    Vector w_star = reference_optimum(model);
    VrBoundReport report = verify_vr_bound(model, w_star, w_star, 2);
    CHECK(report.holds);
    CHECK(report.lhs <= 1e-16);
    CHECK(report.rhs <= 1e-12);
}

TEST_CASE("verify_vr_bound with s = n reduces to the full gradient norm") {
    Rng rng(7);
    Dataset data = make_synthetic_logistic(rng, 5, 3);
    LogisticModel model(data, 0.2);
    Vector x = rand_vector(rng, 3);
    Vector w = rand_vector(rng, 3);
    VrBoundReport report = verify_vr_bound(model, x, w, 5);
    Vector g = model.full_gradient(x);
    double norm_sq = 0.0;
    for (double gi : g) norm_sq += gi * gi;
    CHECK(report.lhs == doctest::Approx(norm_sq).epsilon(1e-12));
}

TEST_CASE("verify_vr_bound guards") {
    Rng rng(9);
    Dataset data = make_synthetic_logistic(rng, 50, 3);
    LogisticModel model(data, 0.2);
    Vector x(3, 0.0);
    CHECK_THROWS_AS(verify_vr_bound(model, x, x, 25), TooManySubsets);
    CHECK_THROWS_AS(verify_vr_bound(model, x, x, 0), SizeOutOfRange);
    CHECK_THROWS_AS(verify_vr_bound(model, x, x, 51), SizeOutOfRange);
}

TEST_CASE("reference_optimum drives the gradient to zero") {
    Rng rng(11);
    Dataset data = make_synthetic_logistic(rng, 20, 4);
    LogisticModel model(data, 0.05);
    Vector w_star = reference_optimum(model);
    Vector g = model.full_gradient(w_star);
    double norm = 0.0;
    for (double gi : g) norm += gi * gi;
    CHECK(std::sqrt(norm) <= 1e-10);
    // and it is a minimum: nearby points are no better
    const double f_star = model.value(w_star);
    for (int rep = 0; rep < 20; ++rep) {
        Vector nearby = w_star;
        for (double& v : nearby) v += 1e-4 * rng.normal();
        CHECK(model.value(nearby) >= f_star);
    }
}

TEST_CASE("reference_optimum reports non-convergence") {
    Rng rng(13);
    Dataset data = make_synthetic_logistic(rng, 10, 3);
    LogisticModel model(data, 0.1);
    CHECK_THROWS_AS(reference_optimum(model, 1e-10, 0), OptimumNotConverged);
}
