#include <catch2/catch_amalgamated.hpp>

#include "subconv/deltasym.hpp"

using namespace subconv;

TEST_CASE("mod_inverse basics") {
    REQUIRE(mod_inverse(3, 7) == 5);
    REQUIRE(mod_inverse(1, 1) == 0);
    REQUIRE(mod_inverse(-1, 4) == 3);
    REQUIRE_THROWS_AS(mod_inverse(4, 6), std::invalid_argument);
}

TEST_CASE("frames enumerate the dissection exactly") {
    std::vector<CircleFrame> f1 = frames(1.0);
    REQUIRE(f1.size() == 1);
    REQUIRE(f1[0].q == 1);
    REQUIRE(f1[0].a == 2);
    REQUIRE(f1[0].a_bar == 0);

    std::vector<CircleFrame> f2 = frames(2.0);
    REQUIRE(f2.size() == 2);
    REQUIRE((f2[0].q == 1 && f2[0].a == 3 && f2[0].a_bar == 0));
    REQUIRE((f2[1].q == 2 && f2[1].a == 3 && f2[1].a_bar == 1));  // (2,4) excluded by gcd

    for (double Q : {1.0, 1.5, 4.0, 9.0, 15.0})
        for (const CircleFrame& f : frames(Q)) {
            REQUIRE(f.a > Q);
            REQUIRE(static_cast<double>(f.a) <= Q + f.q);
            REQUIRE(gcd_i64(f.a, f.q) == 1);
            if (f.q > 1) REQUIRE((f.a * f.a_bar) % f.q == 1);
        }
}

TEST_CASE("delta identity: indicator of n = 0") {
    // hand check at Q = 1: single frame contributes 2 * (1/2) = 1
    REQUIRE(std::abs(delta_eval(0, 1.0) - 1.0) < 1e-15);
    // closed form at n = 1, Q = 1: 2 Re[(1 - e(-1/2)) / (2 pi i)] = 0
    REQUIRE(std::abs(delta_eval(1, 1.0)) < 1e-15);

    for (int64_t Q = 1; Q <= 8; ++Q) {
        std::vector<CircleFrame> fr = frames(static_cast<double>(Q));
        for (int64_t n = -30; n <= 30; ++n) {
            double expect = n == 0 ? 1.0 : 0.0;
            INFO("n = " << n << " Q = " << Q);
            REQUIRE(std::abs(delta_eval(n, Q, fr) - expect) <= 1e-9);
        }
    }
}

TEST_CASE("delta is even in n") {
    std::vector<CircleFrame> fr = frames(9.0);
    for (int64_t n : {1, 2, 7, 19}) {
        double d1 = delta_eval(n, 9.0, fr), d2 = delta_eval(-n, 9.0, fr);
        REQUIRE(std::abs(d1 - d2) < 1e-14);
    }
}

TEST_CASE("weight sum is exactly one") {
    REQUIRE(weight_sum(1.0) == Catch::Approx(1.0).margin(1e-15));  // 2 * (1/2)
    REQUIRE(weight_sum(2.0) == Catch::Approx(1.0).margin(1e-15));  // 2 * (1/3 + 1/6)
    REQUIRE(std::abs(weight_sum(50.0) - 1.0) <= 1e-12);
    // deterministic across worker counts
    REQUIRE(weight_sum(50.0, 1) == weight_sum(50.0, 8));
}

TEST_CASE("non-integer dissection parameter") {
    REQUIRE(std::abs(weight_sum(1.5) - 1.0) < 1e-15);
    std::vector<CircleFrame> fr = frames(1.5);
    for (int64_t n = -10; n <= 10; ++n) {
        double expect = n == 0 ? 1.0 : 0.0;
        REQUIRE(std::abs(delta_eval(n, 1.5, fr) - expect) <= 1e-9);
    }
}
