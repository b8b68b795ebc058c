#include <catch2/catch_amalgamated.hpp>

#include "subconv/windows.hpp"

using namespace subconv;

TEST_CASE("normalized bump integrates to one") {
    Window V = make_bump(1.0, 2.0, true);
    REQUIRE(std::abs(window_integral(V, 1e-14) - 1.0) < 1e-12);
}

TEST_CASE("bump vanishes with all derivatives at the support endpoints") {
    Window V = make_bump(1.0, 2.0, false);
    for (double x : {1.0, 2.0}) {
        Jet4 j = V.jet(x);
        for (int k = 0; k <= 4; ++k) REQUIRE(j.deriv(k) == 0.0);
    }
    // peak at the midpoint
    double peak = V(1.5);
    for (double x = 1.05; x < 2.0; x += 0.05) REQUIRE(V(x) <= peak + 1e-15);
    REQUIRE(peak == Catch::Approx(std::exp(-1.0)));
}

TEST_CASE("bump rejects degenerate intervals") {
    REQUIRE_THROWS_AS(make_bump(2.0, 2.0, false), std::invalid_argument);
}

TEST_CASE("plateau window is exactly one on the plateau and zero outside") {
    Window U = make_plateau(0.5, 1.0, 2.0, 2.5);
    REQUIRE(U(1.5) == 1.0);
    REQUIRE(U(1.0) == 1.0);
    REQUIRE(U(0.5) == 0.0);
    REQUIRE(U(2.5) == 0.0);
    REQUIRE(U(0.75) > 0.0);
    REQUIRE(U(0.75) < 1.0);
    REQUIRE_THROWS_AS(make_plateau(0.5, 2.0, 1.0, 2.5), std::invalid_argument);
}

TEST_CASE("ramp derivative integrates to one across the rise") {
    Window U = make_plateau(0.5, 1.0, 2.0, 2.5);
    double rise = detail::integrate_smooth([&](double x) { return U.deriv(x, 1); }, 0.5, 1.0,
                                           1e-13);
    REQUIRE(std::abs(rise - 1.0) < 1e-11);
}

TEST_CASE("finite differences agree with jet derivatives away from endpoints") {
    Window V = make_bump(1.0, 2.0, true);
    Window U = make_plateau(0.5, 1.0, 2.0, 2.5);
    for (const Window& W : {V, U}) {
        for (double x : {0.8, 1.2, 1.4, 1.7}) {
            if (x <= W.support_lo || x >= W.support_hi) continue;
            double h = 1e-5;
            double fd1 = (W(x + h) - W(x - h)) / (2 * h);
            double fd2 = (W(x + h) - 2 * W(x) + W(x - h)) / (h * h);
            if (std::abs(W.deriv(x, 1)) > 1e-6)
                REQUIRE(std::abs(fd1 - W.deriv(x, 1)) <
                        1e-6 * std::max(1.0, std::abs(W.deriv(x, 1))) * 10);
            if (std::abs(W.deriv(x, 2)) > 1e-4)
                REQUIRE(std::abs(fd2 - W.deriv(x, 2)) < 1e-4 * std::abs(W.deriv(x, 2)) * 10);
        }
    }
}

TEST_CASE("partition of unity sums to one on the target range") {
    for (double X : {1.0, 1.5, 10.0, 1000.0}) {
        std::vector<Window> parts = partition_of_unity(X);
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            double x = -X + 2.0 * X * i / 1000;
            NeumaierSum s;
            for (const Window& w : parts) s.add(w(x));
            worst = std::max(worst, std::abs(s.value() - 1.0));
        }
        INFO("X = " << X);
        REQUIRE(worst <= 1e-10);
    }
}

TEST_CASE("partition count is logarithmic and the center piece sits in [-1,1]") {
    for (double X : {1.0, 2.0, 3.0, 5.0, 17.0, 100.0, 1000.0, 12345.0}) {
        std::vector<Window> parts = partition_of_unity(X);
        REQUIRE(static_cast<double>(parts.size()) <= 2.0 * std::log2(X) + 3.0);
        REQUIRE(parts[0].label == 0.0);
        REQUIRE(parts[0].support_lo >= -1.0);
        REQUIRE(parts[0].support_hi <= 1.0);
        // dyadic labels 0, +-1, +-2, ...
        for (std::size_t i = 1; i < parts.size(); i += 2)
            REQUIRE(parts[i].label == std::pow(2.0, (i - 1) / 2));
    }
    REQUIRE_THROWS_AS(partition_of_unity(0.5), std::invalid_argument);
}

TEST_CASE("recorded derivative bounds are positive and finite") {
    Window V = make_bump(1.0, 2.0, true);
    for (int j = 0; j <= 4; ++j) {
        REQUIRE(V.deriv_bound(j) > 0.0);
        REQUIRE(std::isfinite(V.deriv_bound(j)));
        REQUIRE(std::isfinite(V.scaled_deriv_bound(j)));
    }
    // dyadic pieces carry x^l-weighted bounds
    for (const Window& w : partition_of_unity(64.0))
        for (int l = 0; l <= 4; ++l) REQUIRE(std::isfinite(w.scaled_deriv_bound(l)));
}

TEST_CASE("window_jet matches the order-4 evaluator") {
    Window V = make_bump(1.0, 2.0, true);
    Window U = make_plateau(0.5, 1.0, 2.0, 2.5);
    for (const Window& W : {V, U})
        for (double x : {0.9, 1.3, 1.9, 2.2}) {
            Jet8 j8 = window_jet<8>(W, Jet8::variable(x));
            Jet4 j4 = W.jet(x);
            for (int k = 0; k <= 4; ++k)
                REQUIRE(std::abs(j8.deriv(k) - j4.deriv(k)) <=
                        1e-12 * std::max(1.0, std::abs(j4.deriv(k))));
        }
}
