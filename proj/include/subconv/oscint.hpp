// oscint.hpp -- oscillatory integral engine: brute-force oracle quadrature of
// int g(x) e(f(x)) dx, both stationary-phase branches with explicit error
// shapes, the W-dagger transform W^(r,s) = int W(x) e(-rx) x^{s-1} dx with
// its leading-term expansion, the conductor-lowering kernel, and the 2D
// second-derivative bound.
#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>

#include "subconv/common.hpp"
#include "subconv/quadrature.hpp"
#include "subconv/windows.hpp"

namespace subconv {

// f^(i) <= C Theta_f/Omega_f^i (i = 2,3,4), g^(j) <= C/Omega_g^j, g(a)=g(b)=0.
// Callables return the k-th derivative at x (k = 0 is the value).
struct PhaseProfile {
    std::function<double(double, int)> phase;      // f, derivatives to order 4
    std::function<double(double, int)> amplitude;  // g, derivatives to order 2
    double a = 0.0, b = 1.0;
    double theta_f = 1.0;
    double omega_f = 1.0;
    double omega_g = 1.0;
    std::optional<double> lambda;  // min |f'| on [a,b] (non-stationary branch)
    std::optional<double> kappa;   // min distance of x0 to the endpoints

    // Largest ratio of sampled derivative to declared scale bound; the
    // recorded constant making the shape assumptions concrete.
    double scale_constant(int grid = 256) const {
        double c = 0.0;
        for (int i = 0; i <= grid; ++i) {
            double x = a + (b - a) * i / grid;
            for (int k = 2; k <= 4; ++k)
                c = std::max(c, std::abs(phase(x, k)) /
                                    (theta_f / std::pow(omega_f, k)));
            for (int k = 0; k <= 2; ++k)
                c = std::max(c, std::abs(amplitude(x, k)) * std::pow(omega_g, k));
        }
        return c;
    }
};

// int_a^b g(x) e(f(x)) dx by phase-resolving panels with doubling certificate.
inline cplx oracle_quadrature(const PhaseProfile& p, double tol = 1e-12) {
    QuadOptions opt;
    opt.tol = tol;
    auto freq = [&](double x) { return std::abs(p.phase(x, 1)); };
    return integrate_osc(
        [&](double x) { return p.amplitude(x, 0) * e_of(p.phase(x, 0)); }, p.a, p.b, freq, opt);
}

// Non-stationary bound (first branch):
// (Theta_f/(Omega_f^2 Lambda^3)) (1 + Omega_f/Omega_g
//                                   + (Omega_f/Omega_g)^2 Lambda Omega_f/Theta_f)
inline double first_branch_bound(const PhaseProfile& p) {
    if (!p.lambda) throw std::invalid_argument("first_branch_bound: Lambda not set");
    double L = *p.lambda;
    double r = p.omega_f / p.omega_g;
    return p.theta_f / (p.omega_f * p.omega_f * L * L * L) *
           (1.0 + r + r * r * L / (p.theta_f / p.omega_f));
}

struct StationaryExpansion {
    cplx main;
    double error_bound;
    double x0;
};

// Locates the sign change of f' by bisection (tolerance 1e-12).
inline double find_stationary_point(const PhaseProfile& p) {
    const int scan = 512;
    double lo = p.a, hi = p.b;
    double fl = p.phase(lo, 1);
    bool found = false;
    for (int i = 1; i <= scan; ++i) {
        double x = p.a + (p.b - p.a) * i / scan;
        double fx = p.phase(x, 1);
        if (fl < 0.0 && fx >= 0.0) {
            lo = p.a + (p.b - p.a) * (i - 1) / scan;
            hi = x;
            found = true;
            break;
        }
        fl = fx;
    }
    if (!found)
        throw std::domain_error("second_branch_expand: f' has no - to + sign change");
    while (hi - lo > 1e-12 * (1.0 + std::abs(hi))) {
        double mid = 0.5 * (lo + hi);
        if (p.phase(mid, 1) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Stationary expansion (second branch): main = g(x0) e(f(x0)+1/8)/sqrt(f''(x0)),
// error = Omega_f^4/(Theta_f^2 kappa^3) + Omega_f/Theta_f^{3/2}
//         + Omega_f^3/(Theta_f^{3/2} Omega_g^2).
inline StationaryExpansion second_branch_expand(const PhaseProfile& p) {
    double x0 = find_stationary_point(p);
    double fpp = p.phase(x0, 2);
    if (!(fpp > 0.0) || fpp < 0.5 * p.theta_f / (p.omega_f * p.omega_f))
        throw std::domain_error("second_branch_expand: f'' lower bound violated");
    double kappa = p.kappa ? *p.kappa : std::min(p.b - x0, x0 - p.a);
    StationaryExpansion out;
    out.x0 = x0;
    out.main = p.amplitude(x0, 0) * e_of(p.phase(x0, 0) + 0.125) / std::sqrt(fpp);
    double th32 = std::pow(p.theta_f, 1.5);
    out.error_bound = std::pow(p.omega_f, 4) / (p.theta_f * p.theta_f * kappa * kappa * kappa) +
                      p.omega_f / th32 +
                      std::pow(p.omega_f, 3) / (th32 * p.omega_g * p.omega_g);
    return out;
}

// --------------------------------------------------------------------------
// W-dagger transform
// --------------------------------------------------------------------------

// W^(r,s) = int_0^inf W(x) e(-rx) x^{s-1} dx, W supported in (0,inf).
inline cplx w_dagger(const Window& W, double r, cplx s, double tol = 1e-12) {
    if (W.support_lo <= 0.0)
        throw std::invalid_argument("w_dagger: window support must lie in (0,inf)");
    double sigma = s.real(), beta = s.imag();
    auto integrand = [&](double x) -> cplx {
        double w = W(x);
        if (w == 0.0) return {0.0, 0.0};
        double amp = w * std::pow(x, sigma - 1.0);
        double phase = -r * x + beta * std::log(x) / TWO_PI;
        return amp * e_of(phase);
    };
    auto freq = [&](double x) { return std::abs(-r + beta / (TWO_PI * x)); };
    QuadOptions opt;
    opt.tol = tol;
    return integrate_osc(integrand, W.support_lo, W.support_hi, freq, opt);
}

struct WDaggerMain {
    cplx main;
    double error_bound;  // min(|beta|^{-3/2}, |r|^{-3/2})
    double x0;           // stationary point beta/(2 pi r)
};

// Leading term of W^(r,s) at the stationary point x0 = beta/(2 pi r):
//   sqrt(2 pi) e(1/8)/sqrt(-beta) W(x0) x0^sigma (beta/(2 pi e r))^{i beta},
// principal square root, so |main| = sqrt(2 pi/|beta|) W(x0) x0^sigma.
inline WDaggerMain w_dagger_main(const Window& W, double r, cplx s) {
    if (r == 0.0) throw std::invalid_argument("w_dagger_main: r = 0, no stationary point");
    double sigma = s.real(), beta = s.imag();
    if (beta == 0.0) throw std::invalid_argument("w_dagger_main: beta = 0");
    WDaggerMain out;
    out.x0 = beta / (TWO_PI * r);
    out.error_bound = std::min(std::pow(std::abs(beta), -1.5), std::pow(std::abs(r), -1.5));
    if (out.x0 <= W.support_lo || out.x0 >= W.support_hi) {
        out.main = {0.0, 0.0};
        return out;
    }
    double wv = W(out.x0);
    // phase at x0: f(x0) = (beta/2pi) log(x0/e)
    cplx osc = std::exp(cplx(0.0, beta * std::log(out.x0 / std::exp(1.0))));
    cplx root = std::sqrt(cplx(-beta, 0.0));
    out.main = std::sqrt(TWO_PI) * e_of(0.125) / root * wv * std::pow(out.x0, sigma) * osc;
    return out;
}

// --------------------------------------------------------------------------
// Conductor-lowering kernel
// --------------------------------------------------------------------------

// (1/K) int (n/m)^{iv} V(v/K) dv = W^(-K log(n/m)/(2 pi), 1) over the window V.
inline cplx conductor_kernel(int64_t n, int64_t m, double K, const Window& V,
                             double tol = 1e-12) {
    if (n < 1 || m < 1) throw std::invalid_argument("conductor_kernel: n, m must be positive");
    double r = -K * std::log(static_cast<double>(n) / static_cast<double>(m)) / TWO_PI;
    return w_dagger(V, r, cplx(1.0, 0.0), tol);
}

// --------------------------------------------------------------------------
// Two-dimensional second-derivative bound
// --------------------------------------------------------------------------

struct TwoDPhaseProfile {
    // phase(x, y, i, j) = d^{i+j} f / dx^i dy^j  (i + j <= 2)
    std::function<double(double, double, int, int)> phase;
    std::function<double(double, double, int, int)> amplitude;
    double ax = 0.0, bx = 1.0, ay = 0.0, by = 1.0;
    double r1 = 1.0, r2 = 1.0;

    void check_grid(int n = 24) const {
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                double x = ax + (bx - ax) * i / n, y = ay + (by - ay) * j / n;
                double fxx = phase(x, y, 2, 0), fyy = phase(x, y, 0, 2),
                       fxy = phase(x, y, 1, 1);
                if (fxx < 0.999 * r1 * r1 || fyy < 0.999 * r2 * r2 ||
                    fxx * fyy - fxy * fxy < 0.999 * r1 * r1 * r2 * r2)
                    throw std::domain_error("TwoDPhaseProfile: Hessian condition violated");
            }
    }

    // var(g) = int int |d^2 g / dx dy|.  The integrand has kinks where the
    // mixed partial changes sign, so a composite midpoint grid (O(h^2) at
    // kinks) with one refinement comparison is used instead of panel GL.
    double total_variation(int grid = 512) const {
        auto pass = [&](int n) {
            double hx = (bx - ax) / n, hy = (by - ay) / n;
            NeumaierSum s;
            for (int i = 0; i < n; ++i) {
                double x = ax + (i + 0.5) * hx;
                for (int j = 0; j < n; ++j)
                    s.add(std::abs(amplitude(x, ay + (j + 0.5) * hy, 1, 1)));
            }
            return s.value() * hx * hy;
        };
        double coarse = pass(grid), fine = pass(2 * grid);
        if (std::abs(fine - coarse) > 1e-3 * (1.0 + std::abs(fine)))
            throw quadrature_error("total_variation: midpoint grid not converged");
        return fine;
    }
};

inline double second_derivative_bound_2d(const TwoDPhaseProfile& p) {
    p.check_grid();
    return p.total_variation() / (p.r1 * p.r2);
}

// Companion oracle for the 2D bound.
inline cplx oracle_quadrature_2d(const TwoDPhaseProfile& p, double tol = 1e-10) {
    auto fx = [&](double x) {
        double ymid = 0.5 * (p.ay + p.by);
        return std::abs(p.phase(x, ymid, 1, 0));
    };
    auto fy = [&](double y) {
        double xmid = 0.5 * (p.ax + p.bx);
        return std::abs(p.phase(xmid, y, 0, 1));
    };
    QuadOptions opt;
    opt.tol = tol;
    return integrate_osc_2d(
        [&](double x, double y) { return p.amplitude(x, y, 0, 0) * e_of(p.phase(x, y, 0, 0)); },
        p.ax, p.bx, p.ay, p.by, fx, fy, opt);
}

}  // namespace subconv
