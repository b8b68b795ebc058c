#include <catch2/catch_amalgamated.hpp>

#include "subconv/calibration.hpp"
#include "subconv/cli.hpp"
#include "subconv/oscint.hpp"

using namespace subconv;

namespace {

PhaseProfile linear_profile(double B, const Window& g) {
    PhaseProfile p;
    p.a = g.support_lo;
    p.b = g.support_hi;
    p.phase = [B](double, int k) { return k == 0 ? 0.0 : (k == 1 ? B : 0.0); };
    // f(x) = Bx handled through value callback below
    p.phase = [B](double x, int k) { return k == 0 ? B * x : (k == 1 ? B : 0.0); };
    p.amplitude = [g](double x, int k) { return g.deriv(x, k); };
    p.theta_f = B;
    p.omega_f = 1.0;
    p.omega_g = 1.0;
    p.lambda = B;
    return p;
}

}  // namespace

TEST_CASE("non-stationary bound: direct formula value") {
    Window g = make_bump(0.0, 1.0, false);
    PhaseProfile p = linear_profile(100.0, g);
    p.theta_f = 100.0;
    p.omega_f = 1.0;
    p.omega_g = 1.0;
    p.lambda = 100.0;
    // (Theta/(Omega^2 Lambda^3)) (1 + 1 + Lambda Omega/Theta) = 3e-4
    REQUIRE(first_branch_bound(p) == Catch::Approx(3e-4).epsilon(1e-12));
    // doubling Lambda reduces the bound
    PhaseProfile p2 = p;
    p2.lambda = 200.0;
    REQUIRE(first_branch_bound(p2) < first_branch_bound(p));
    p2.lambda.reset();
    REQUIRE_THROWS_AS(first_branch_bound(p2), std::invalid_argument);
}

TEST_CASE("non-stationary oracle stays below the fitted envelope") {
    Window g = make_bump(1.0, 2.0, false);
    for (double B : {1e2, 1e3, 1e4, 1e5}) {
        PhaseProfile p = linear_profile(B, g);
        cplx o = oracle_quadrature(p, 1e-13);
        REQUIRE(std::abs(o) <= calib::FIRST_BRANCH_RATIO * first_branch_bound(p));
    }
}

TEST_CASE("stationary expansion: fresnel main term and error scaling") {
    Window g = make_bump(-0.5, 0.5, false);
    std::vector<double> lb, le;
    for (double B : {1e2, 1e3, 1e4}) {
        PhaseProfile p = cli::fresnel_profile(B, g);
        StationaryExpansion ex = second_branch_expand(p);
        REQUIRE(std::abs(ex.x0) < 1e-10);
        cplx main_expect = g(0.0) * e_of(0.125) / std::sqrt(2.0 * B);
        REQUIRE(std::abs(ex.main - main_expect) < 1e-12);
        cplx o = oracle_quadrature(p, 1e-12);
        double err = std::abs(o - ex.main);
        REQUIRE(err <= calib::STATIONARY_RATIO * ex.error_bound);
        lb.push_back(std::log(B));
        le.push_back(std::log(err));
    }
    double slope = fit_line(lb, le).slope;
    REQUIRE(slope > -1.8);
    REQUIRE(slope < -1.2);
}

TEST_CASE("stationary expansion rejects bad phases") {
    Window g = make_bump(-0.5, 0.5, false);
    PhaseProfile p = linear_profile(100.0, g);  // no sign change of f'
    REQUIRE_THROWS_AS(second_branch_expand(p), std::domain_error);
    // f'' below the declared lower bound
    PhaseProfile q = cli::fresnel_profile(100.0, g);
    q.theta_f = 1e6;
    REQUIRE_THROWS_AS(second_branch_expand(q), std::domain_error);
}

TEST_CASE("profile scale constants are recorded and modest") {
    Window g = make_bump(-0.5, 0.5, false);
    PhaseProfile p = cli::fresnel_profile(1000.0, g);
    double c = p.scale_constant();
    REQUIRE(std::isfinite(c));
    REQUIRE(c < 50.0);
}

TEST_CASE("w_dagger at r = 0, s = 1 is the plain window integral") {
    Window W = make_bump(1.0, 2.0, false);
    cplx got = w_dagger(W, 0.0, cplx(1.0, 0.0));
    REQUIRE(std::abs(got.real() - window_integral(W)) < 1e-11);
    REQUIRE(std::abs(got.imag()) < 1e-13);
    REQUIRE_THROWS_AS(w_dagger(make_bump(-1.0, 1.0, false), 0.0, cplx(1.0, 0.0)),
                      std::invalid_argument);
}

TEST_CASE("w_dagger non-oscillatory envelope at beta = 0") {
    Window W = make_bump(1.0, 2.0, false);
    for (double r : {20.0, 40.0, 80.0}) {
        double v = std::abs(w_dagger(W, r, cplx(1.0, 0.0), 1e-13));
        REQUIRE(v * r * r <= calib::WDAGGER_J2_ENVELOPE);
    }
}

TEST_CASE("w_dagger leading term: modulus identity and oracle agreement") {
    Window W = make_bump(1.0, 2.0, false);
    for (double beta : {50.0, 200.0, 800.0}) {
        double r = beta / (TWO_PI * 1.5);
        cplx s(1.0, beta);
        WDaggerMain m = w_dagger_main(W, r, s);
        REQUIRE(m.x0 == Catch::Approx(1.5));
        double want_mod = std::sqrt(TWO_PI / beta) * W(1.5) * std::pow(1.5, 1.0);
        REQUIRE(std::abs(m.main) == Catch::Approx(want_mod).epsilon(1e-12));
        cplx o = w_dagger(W, r, s, 1e-13);
        REQUIRE(std::abs(o - m.main) <= calib::WDAGGER_RATIO * m.error_bound);
    }
    // negative beta branch: modulus identity must still hold
    WDaggerMain m = w_dagger_main(W, -40.0 / (TWO_PI * 1.5), cplx(0.5, -40.0));
    REQUIRE(std::abs(m.main) ==
            Catch::Approx(std::sqrt(TWO_PI / 40.0) * W(1.5) * std::pow(1.5, 0.5)).epsilon(1e-12));
    cplx o = w_dagger(W, -40.0 / (TWO_PI * 1.5), cplx(0.5, -40.0), 1e-13);
    REQUIRE(std::abs(o - m.main) <= calib::WDAGGER_RATIO * m.error_bound);
}

TEST_CASE("w_dagger with the stationary point outside the support") {
    Window W = make_bump(1.0, 2.0, false);
    double beta = 400.0;
    double r = beta / (TWO_PI * 0.4);  // x0 = 0.4, outside [1,2]
    WDaggerMain m = w_dagger_main(W, r, cplx(1.0, beta));
    REQUIRE(m.main == cplx(0.0, 0.0));
    double a1 = std::abs(w_dagger(W, r, cplx(1.0, beta), 1e-13));
    REQUIRE(a1 <= calib::WDAGGER_RATIO * m.error_bound);
    double a2 = std::abs(w_dagger(W, 10.0 * r, cplx(1.0, beta), 1e-13));
    REQUIRE(a1 / std::max(a2, 1e-300) >= 1e3);
    REQUIRE_THROWS_AS(w_dagger_main(W, 0.0, cplx(1.0, beta)), std::invalid_argument);
}

TEST_CASE("conductor kernel: diagonal, symmetry, scale invariance") {
    Window V = make_bump(1.0, 2.0, true);
    REQUIRE(std::abs(conductor_kernel(977, 977, 64.0, V) - 1.0) <= 1e-10);
    cplx k12 = conductor_kernel(1000, 1013, 50.0, V);
    cplx k21 = conductor_kernel(1013, 1000, 50.0, V);
    REQUIRE(std::abs(k21 - std::conj(k12)) < 1e-12);
    cplx k2 = conductor_kernel(2000, 2026, 50.0, V);
    REQUIRE(std::abs(k12 - k2) < 1e-12);  // depends on n, m only through n/m
    REQUIRE_THROWS_AS(conductor_kernel(0, 1, 50.0, V), std::invalid_argument);
}

TEST_CASE("conductor kernel decays super-polynomially at wide separations") {
    Window V = make_bump(1.0, 2.0, true);
    double N = 1e4, K = 1e2;
    int64_t n = static_cast<int64_t>(N);
    double base = std::abs(conductor_kernel(n, n + static_cast<int64_t>(N / K), K, V));
    double k20 = std::abs(conductor_kernel(n, n + static_cast<int64_t>(20.0 * N / K), K, V));
    double k80 = std::abs(conductor_kernel(n, n + static_cast<int64_t>(80.0 * N / K), K, V));
    REQUIRE(k20 <= 0.02 * base);
    REQUIRE(k80 <= 0.2 * k20);
}

TEST_CASE("2d second-derivative bound against the oracle") {
    Window g1 = make_bump(-0.4, 0.4, false);
    auto make_profile = [&](double B) {
        TwoDPhaseProfile p;
        p.ax = p.ay = -0.4;
        p.bx = p.by = 0.4;
        p.r1 = p.r2 = std::sqrt(2.0 * B);
        p.phase = [B](double x, double y, int i, int j) {
            if (i == 0 && j == 0) return B * (x * x + y * y);
            if (i == 1 && j == 0) return 2 * B * x;
            if (i == 0 && j == 1) return 2 * B * y;
            if ((i == 2 && j == 0) || (i == 0 && j == 2)) return 2 * B;
            return 0.0;
        };
        p.amplitude = [g1](double x, double y, int i, int j) {
            return g1.deriv(x, i) * g1.deriv(y, j);
        };
        return p;
    };

    // B = 1e2: full 2d panel oracle
    {
        TwoDPhaseProfile p = make_profile(1e2);
        double bound = second_derivative_bound_2d(p);
        cplx I = oracle_quadrature_2d(p, 1e-8);
        REQUIRE(std::abs(I) <= calib::TWO_D_RATIO * bound);
        // var of the product amplitude equals the product of 1d variations
        double v1 = detail::integrate_smooth(
            [&](double x) { return std::abs(g1.deriv(x, 1)); }, -0.4, 0.4, 1e-9);
        REQUIRE(p.total_variation() == Catch::Approx(v1 * v1).epsilon(1e-4));
    }
    // B = 1e3: separable cross-check for the oracle value
    {
        TwoDPhaseProfile p = make_profile(1e3);
        double bound = second_derivative_bound_2d(p);
        cplx one = integrate_osc([&](double x) { return g1(x) * e_of(1e3 * x * x); }, -0.4,
                                 0.4, [](double x) { return 2e3 * std::abs(x); },
                                 QuadOptions{1e-12});
        REQUIRE(std::abs(one * one) <= calib::TWO_D_RATIO * bound);
    }
    // degenerate amplitude: zero variation, zero bound
    {
        TwoDPhaseProfile p = make_profile(1e2);
        p.amplitude = [](double, double, int, int) { return 0.0; };
        REQUIRE(second_derivative_bound_2d(p) == 0.0);
        REQUIRE(std::abs(oracle_quadrature_2d(p, 1e-9)) == 0.0);
    }
    // Hessian condition violation
    {
        TwoDPhaseProfile p = make_profile(1e2);
        p.r1 = p.r2 = 100.0 * std::sqrt(2e2);
        REQUIRE_THROWS_AS(second_derivative_bound_2d(p), std::domain_error);
    }
}
