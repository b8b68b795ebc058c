#include <catch2/catch_amalgamated.hpp>

#include "subconv/calibration.hpp"
#include "subconv/decomp.hpp"

using namespace subconv;

namespace {

const CuspForm& test_form() {
    static CuspForm f = make_delta_form(2000);
    return f;
}

}  // namespace

TEST_CASE("collapsed diagonal reduces to the plain dyadic sum") {
    const CuspForm& f = test_form();
    DecompConfig cfg;
    cfg.N = 60.0;
    cfg.K = 8.0;
    cfg.t = 100.0;
    // with the circle-method kernel replaced by delta(n - m) and the
    // conductor integral at n = m equal to int V = 1, the quadruple collapses
    cplx collapsed;
    {
        CplxSum s;
        for (int64_t n = 60; n <= 120; ++n) {
            double w = cfg.V(n / cfg.N) * cfg.U(n / cfg.N);
            s.add(f.lambda(n) * w * std::exp(cplx(0.0, -cfg.t * std::log((double)n))));
        }
        collapsed = s.value() * window_integral(cfg.V);
    }
    cplx direct = s_of_n(f, cfg.N, cfg.t, cfg.V);
    REQUIRE(std::abs(collapsed - direct) < 1e-12);
}

TEST_CASE("frame decomposition recovers S(N)") {
    const CuspForm& f = test_form();
    DecompConfig cfg;
    cfg.N = 40.0;
    cfg.K = 6.0;
    cfg.t = 60.0;
    cfg.Q = std::ceil(std::sqrt(cfg.N / cfg.K));
    SPlusMinus sp = s_plus_minus(f, cfg, false);
    cplx direct = s_of_n(f, cfg.N, cfg.t, cfg.V);
    double rel = std::abs(direct - (sp.s_plus + sp.s_minus)) / std::abs(direct);
    REQUIRE(rel <= 1e-2);
    REQUIRE(rel <= 1e-8);  // quadrature-limited in practice
}

TEST_CASE("frame decomposition at t = 0 is conjugate-balanced") {
    const CuspForm& f = test_form();
    DecompConfig cfg;
    cfg.N = 30.0;
    cfg.K = 5.0;
    cfg.t = 0.0;  // diagnostic evaluation
    cfg.Q = 3.0;
    SPlusMinus sp = s_plus_minus(f, cfg, false);
    cplx direct = s_of_n(f, cfg.N, 0.0, cfg.V);
    REQUIRE(direct.imag() == 0.0);
    // the two sign branches carry conjugate oscillations: their sum is real
    REQUIRE(std::abs((sp.s_plus + sp.s_minus).imag()) <= 1e-10);
    REQUIRE(std::abs(sp.s_plus + sp.s_minus - direct) <= 1e-8);
}

TEST_CASE("desk-scale caps are enforced") {
    DecompConfig cfg;
    cfg.N = 1000.0;
    REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);
    DecompConfig cfg2;
    cfg2.K = 300.0;
    cfg2.t = 200.0;
    REQUIRE_THROWS_AS(cfg2.validate(), std::invalid_argument);
}

TEST_CASE("poisson dual of the m-sum") {
    const CuspForm& f = test_form();
    DecompConfig cfg;
    cfg.N = 50.0;
    cfg.t = 200.0;
    cfg.K = 10.0;
    PoissonDual pd = poisson_dual_m_sum(f, cfg, 3, 1, 0.3, 0.0);
    REQUIRE(pd.residual <= 1e-3);
    REQUIRE(pd.residual <= 1e-9);  // quadrature-limited in practice

    // q = 1: congruence vacuous, dual runs over all |m| <= m_cut
    PoissonDual pd1 = poisson_dual_m_sum(f, cfg, 1, 1, 0.55, 3.0);
    REQUIRE(pd1.residual <= 1e-9);

    // doubling the cut moves the dual by less than 1e-6 |direct|
    PoissonDual pd2 = poisson_dual_m_sum(f, cfg, 3, 1, 0.3, 0.0, 2 * pd.m_cut);
    REQUIRE(std::abs(pd.dual - pd2.dual) <= 1e-6 * std::abs(pd.direct));

    REQUIRE_THROWS_AS(poisson_dual_m_sum(f, cfg, 9, 1, 0.3, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(poisson_dual_m_sum(f, cfg, 4, 2, 0.3, 0.0), std::invalid_argument);
}

TEST_CASE("complete character sum collapses to the congruence indicator") {
    // n = aq' - a'q lands on the modulus
    int64_t q = 5, qp = 7, a = 2, ap = 3;
    int64_t hit = ((a * qp - ap * q) % (q * qp) + q * qp) % (q * qp);
    REQUIRE(std::abs(character_sum(q, qp, a, ap, hit) - cplx(35.0, 0.0)) < 1e-9);
    REQUIRE(std::abs(character_sum(q, qp, a, ap, hit + 1)) < 1e-9);
    // exhaustive small grid
    for (int64_t qq = 1; qq <= 6; ++qq)
        for (int64_t pp = 1; pp <= 6; ++pp)
            for (int64_t n = 0; n < qq * pp; ++n) {
                cplx got = character_sum(qq, pp, 1, 2, n);
                double want = static_cast<double>(character_sum_closed(qq, pp, 1, 2, n));
                REQUIRE(std::abs(got - want) < 1e-9);
            }
}

TEST_CASE("unique inverse in the dissection window") {
    for (double Q : {1.5, 3.1622776601683795, 7.0})
        for (int64_t q = 1; q <= 12; ++q)
            for (int64_t m = -12; m <= 12; ++m) {
                if (m == 0 || gcd_i64(m, q) != 1) continue;
                int64_t a = unique_inverse_in_window(m, q, Q);
                REQUIRE(static_cast<double>(a) > Q);
                REQUIRE(static_cast<double>(a) <= Q + q);
                if (q > 1) REQUIRE((((a * m) % q) + q) % q == 1);
                // uniqueness: scan the window
                int count = 0;
                for (int64_t c = static_cast<int64_t>(std::floor(Q)) + 1;
                     c <= static_cast<int64_t>(std::floor(Q + q)); ++c)
                    if ((((c * m) % q) + q) % q == (q == 1 ? 0 : 1)) ++count;
                REQUIRE(count == 1);
            }
}

TEST_CASE("I** trivial bound, positive-m suppression, main-term support") {
    const CuspForm& f = test_form();
    DecompConfig cfg;  // N = 100, K = 10, t = 200
    IStarStar ref = i_star_star(f, cfg, 4, -1, 0.0, true);
    REQUIRE(std::abs(ref.value) <= 1.1);
    REQUIRE(ref.certificate <= 1e-8);
    REQUIRE(ref.a == 7);

    // calibration constant reproduces within the certificate scale
    cplx unit = i_one(cfg, 4, -1, 0.0, cplx(1.0, 0.0));
    cplx c4 = ref.value / unit;
    REQUIRE(std::abs(c4 - calib::I_ONE_C4) <= 1e-4 * std::abs(calib::I_ONE_C4));

    // budget comparison at two more grid points
    for (auto [q, m, tau] : std::vector<std::tuple<int64_t, int64_t, double>>{
             {3, -1, 5.0}, {2, -1, 15.0}}) {
        double C = q <= 2 ? 1.0 : 2.0;
        IStarStar is = i_star_star(f, cfg, q, m, tau);
        cplx i1 = i_one(cfg, q, m, tau, calib::I_ONE_C4);
        REQUIRE(std::abs(is.value - i1) <= calib::ISTAR_BUDGET_RATIO * error_budget(cfg, C, tau));
        REQUIRE(std::abs(is.value) <= 1.1);
    }

    // m > 0: the main term vanishes and the integral is error-sized
    IStarStar pos = i_star_star(f, cfg, 3, 2, 5.0);
    REQUIRE(std::abs(pos.value) <= calib::ISTAR_BUDGET_RATIO * error_budget(cfg, 2.0, 5.0));
    REQUIRE_THROWS_AS(i_one(cfg, 3, 2, 5.0, calib::I_ONE_C4), std::invalid_argument);

    // V support kills the main term at small q
    REQUIRE(i_one(cfg, 2, -1, 0.0, calib::I_ONE_C4) == cplx(0.0, 0.0));

    REQUIRE_THROWS_AS(i_star_star(f, cfg, 4, -2, 0.0), std::invalid_argument);
}

TEST_CASE("main-term x-integral is bounded by its support length") {
    DecompConfig cfg;
    // inner integral int_0^1 V(tau/2K - (t+tau/2)x/(K m a)) dx: the V-support
    // pullback has length K |m| a / (t + tau/2)
    int64_t q = 4, m = -1;
    double tau = 0.0;
    int64_t a = unique_inverse_in_window(m, q, cfg.q_value());
    double ts = cfg.t + 0.5 * tau;
    double len = cfg.K * std::abs(static_cast<double>(m)) * static_cast<double>(a) / ts;
    double xint = detail::integrate_smooth(
        [&](double x) {
            return cfg.V(0.5 * tau / cfg.K - ts * x / (cfg.K * static_cast<double>(m * a)));
        },
        0.0, 1.0, 1e-12);
    REQUIRE(xint > 0.0);
    REQUIRE(xint <= len * (1.0 + 1e-9));
}

TEST_CASE("error budget: plateau values and integrated form") {
    DecompConfig cfg;  // N = 100, K = 10, t = 200, eps = 0.02
    double C = 2.0;
    double t = cfg.t, K = cfg.K;
    double first = std::pow(t, cfg.epsilon) / (std::sqrt(t) * std::pow(K, 1.5));
    double second = std::sqrt(cfg.N / (cfg.q_value() * C)) / (std::sqrt(t) * std::pow(K, 2.5));
    REQUIRE(error_budget(cfg, C, 0.0) == Catch::Approx(first + second).epsilon(1e-14));
    // at tau = 20K the min-factor halves the first term
    REQUIRE(error_budget(cfg, C, 20.0 * K) ==
            Catch::Approx(0.5 * first + second).epsilon(1e-14));
    REQUIRE(error_budget(cfg, C, 40.0 * K) < error_budget(cfg, C, 20.0 * K));

    BudgetIntegralCheck chk = error_budget_integral(cfg, C);
    REQUIRE(chk.integral <= 2.0 * chk.bound);
}
