#include <doctest.h>

#include <cmath>

#include "bbfgs/sketch.hpp"
#include "support/test_util.hpp"

using namespace bbfgs;
using namespace bbfgs::testing;

TEST_CASE("gaussian_sketch shape and determinism") {
    Rng a(5), b(5);
    Matrix m1 = gaussian_sketch(a, 7, 3);
    CHECK(m1.rows() == 7);
    CHECK(m1.cols() == 3);
    Matrix m2 = gaussian_sketch(b, 7, 3);
    CHECK((m1 - m2).frobenius_norm() == 0.0);
    // fresh draw each call
    CHECK((gaussian_sketch(a, 7, 3) - m1).frobenius_norm() > 0.0);
    CHECK_THROWS_AS(gaussian_sketch(a, 3, 4), BadShape);
    CHECK_THROWS_AS(gaussian_sketch(a, 3, 0), BadShape);
}

TEST_CASE("gaussian_sketch moments") {
    Rng rng(17);
    double sum = 0.0, sumsq = 0.0;
    const std::size_t d = 1000;
    const int draws = 10000;
    for (int rep = 0; rep < draws / 100; ++rep) {
        Matrix m = gaussian_sketch(rng, d, 1);
        for (std::size_t i = 0; i < d; ++i) {
            sum += m(i, 0);
            sumsq += m(i, 0) * m(i, 0);
        }
    }
    const double count = double(d) * (draws / 100);
    const double mean = sum / count;
    CHECK(std::abs(mean) <= 0.05);
    CHECK(std::abs(sumsq / count - mean * mean - 1.0) <= 0.05);
}

TEST_CASE("direction window emission semantics") {
    DirectionWindow window(2);
    Vector v1 = {1.0, 0.0}, v2 = {0.0, 2.0};
    CHECK(!window.push(v1).has_value());
    auto block = window.push(v2);
    REQUIRE(block.has_value());
    CHECK((*block)(0, 0) == 1.0);
    CHECK((*block)(1, 1) == 2.0);
    CHECK((*block)(1, 0) == 0.0);

    DirectionWindow every(1);
    CHECK(every.push(v1).has_value());
    CHECK(every.push(v2).has_value());
}

TEST_CASE("direction window cadence: floor(t/L) emissions") {
    Rng rng(8);
    for (std::size_t window_len : {1u, 2u, 3u, 5u}) {
        DirectionWindow window(window_len);
        std::size_t emissions = 0;
        const std::size_t pushes = 17;
        for (std::size_t t = 0; t < pushes; ++t) {
            if (window.push(rand_vector(rng, 4)).has_value()) ++emissions;
        }
        CHECK(emissions == pushes / window_len);
    }
}

TEST_CASE("direction window rejects the zero vector") {
    DirectionWindow window(3);
    CHECK_THROWS_AS(window.push(Vector(4, 0.0)), ZeroDirection);
}

TEST_CASE("self-conditioning sketch with empty buffer yields identity columns") {
    Rng rng(2);
    CurvatureBuffer buffer(5, true);
    auto [cols, d] = self_conditioning_sketch(rng, buffer, 6, 3);
    REQUIRE(cols.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        std::size_t ones = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            if (d(i, j) == 1.0) {
                ++ones;
                CHECK(i == cols[j]);
            } else {
                CHECK(d(i, j) == 0.0);
            }
        }
        CHECK(ones == 1);
    }
}

TEST_CASE("self-conditioning sketch applies the scalar factored operator") {
    // one triple with L_1 = 1/2: D=[1], G=4, Y=[4], R_fact = 1/2
    CurvatureBuffer buffer(2, true);
    Matrix d(1, 1), y(1, 1);
    d(0, 0) = 1.0;
    y(0, 0) = 4.0;
    buffer.push(make_triple(d, y, {0}));
    Rng rng(1);
    auto result = self_conditioning_sketch(rng, buffer, 1, 1);
    CHECK(result.columns == std::vector<std::uint32_t>{0});
    CHECK(result.d(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("defaults follow the q and L rules") {
    CHECK(default_sketch_size(16) == 4);
    CHECK(default_sketch_size(100000) == 32);  // capped
    CHECK(default_direction_window(16) == 2);
    CHECK(default_direction_window(81) == 3);
}
