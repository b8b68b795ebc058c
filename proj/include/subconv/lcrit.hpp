// lcrit.hpp -- critical-line evaluation: dyadic sums S(N), a smoothed
// approximate-functional-equation value of L(1/2+it, f), an independent
// slower oracle with a different smoothing family, and the convexity-ratio
// sweep.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "subconv/common.hpp"
#include "subconv/forms.hpp"
#include "subconv/gamma.hpp"
#include "subconv/windows.hpp"

namespace subconv {

// S(N) = sum_n lambda(n) n^{-it} V(n/N)
inline cplx s_of_n(const CuspForm& form, double N, double t, const Window& V,
                   int n_threads = 1) {
    int64_t lo = static_cast<int64_t>(std::ceil(N * V.support_lo));
    int64_t hi = static_cast<int64_t>(std::floor(N * V.support_hi));
    lo = std::max<int64_t>(lo, 1);
    if (hi > form.n_max) throw std::out_of_range("s_of_n: coefficient cache too short");
    if (hi < lo) return {0.0, 0.0};
    std::size_t count = static_cast<std::size_t>(hi - lo + 1);
    return parallel_sum_cplx(count, n_threads, [&](std::size_t i) -> cplx {
        int64_t n = lo + static_cast<int64_t>(i);
        double w = V(static_cast<double>(n) / N);
        if (w == 0.0) return {0.0, 0.0};
        return form.lambda(n) * w * std::exp(cplx(0.0, -t * std::log(static_cast<double>(n))));
    });
}

// --------------------------------------------------------------------------
// Smoothed approximate functional equation.
//
// With Lambda(s) = (2 pi)^{-s} Gamma(s + (k-1)/2) L(s) = Lambda(1-s) (k = 12)
// and an even entire G with G(0)=1 decaying on vertical lines,
//   L(s) = sum_n lambda(n) n^{-s} F1(n) + sum_n lambda(n) n^{s-1} F2(n),
//   F1(n) = (1/2pi) int (2pi)^{-u} e^{lgG(c+it+u)-lgG(c+it)} (n/X)^{-u} G(u)/u dtau,
//   F2(n) = (2pi)^{2it} (1/2pi) int (2pi)^{-u} e^{lgG(c-it+u)-lgG(c+it)} (nX)^{-u} G(u)/u dtau,
// over the line u = 2 + i tau, c = k/2.  The two sums balance near length
// |c + it|/(2 pi) * X^{+-1}.
// --------------------------------------------------------------------------

struct AfeOptions {
    double precision = 1e-8;
    double balance_x = 1.0;                  // relative length of the two sums
    std::function<cplx(cplx)> smoothing;     // G(u); default exp(u^2/4)
    double contour_height = 14.0;
    double panel_width = 0.22;
    int gl_order = 16;
};

namespace detail {

struct AfeNodes {
    std::vector<cplx> u;
    std::vector<cplx> w1, w2;  // full per-node prefactors for the two sums
};

inline AfeNodes afe_nodes(double t, int weight, const AfeOptions& opt) {
    AfeNodes nodes;
    const GaussLegendre& gl = gauss_legendre(opt.gl_order);
    double c = 0.5 * weight;
    cplx lg_ref = log_gamma(cplx(c, t));
    int panels = static_cast<int>(std::ceil(2.0 * opt.contour_height / opt.panel_width));
    auto G = opt.smoothing ? opt.smoothing
                           : [](cplx u) { return std::exp(0.25 * u * u); };
    for (int p = 0; p < panels; ++p) {
        double lo = -opt.contour_height + 2.0 * opt.contour_height * p / panels;
        double hi = -opt.contour_height + 2.0 * opt.contour_height * (p + 1) / panels;
        double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            double tau = m + h * gl.x[i];
            cplx u(2.0, tau);
            double wq = h * gl.w[i] / TWO_PI;
            cplx base = std::pow(cplx(TWO_PI, 0.0), -u) * G(u) / u;
            nodes.u.push_back(u);
            nodes.w1.push_back(wq * base * std::exp(log_gamma(cplx(c, t) + u) - lg_ref));
            nodes.w2.push_back(wq * base * std::exp(log_gamma(cplx(c, -t) + u) - lg_ref));
        }
    }
    return nodes;
}

inline cplx afe_weight(const std::vector<cplx>& u, const std::vector<cplx>& w, double y) {
    // sum_j w_j * y^{-u_j}
    double ly = std::log(y);
    CplxSum s;
    for (std::size_t j = 0; j < u.size(); ++j)
        s.add(w[j] * std::exp(-u[j] * ly));
    return s.value();
}

}  // namespace detail

// L(1/2 + it, f) by the smoothed approximate functional equation.
inline cplx l_value_afe(const CuspForm& form, double t, const AfeOptions& opt = {}) {
    if (std::abs(t) <= 2.0) throw std::invalid_argument("l_value_afe: need |t| > 2");
    detail::AfeNodes nodes = detail::afe_nodes(t, form.weight, opt);
    double X = opt.balance_x;
    cplx phase2 = std::exp(cplx(0.0, 2.0 * t * std::log(TWO_PI)));

    auto run_sum = [&](const std::vector<cplx>& w, double tsign, double xfactor) {
        CplxSum s;
        int tiny_run = 0;
        double threshold = opt.precision * 1e-4;
        int64_t n = 1;
        for (; n <= form.n_max; ++n) {
            cplx F = detail::afe_weight(nodes.u, w, static_cast<double>(n) * xfactor);
            cplx term = form.lambda(n) / std::sqrt(static_cast<double>(n)) *
                        std::exp(cplx(0.0, tsign * t * std::log(static_cast<double>(n)))) * F;
            s.add(term);
            tiny_run = std::abs(term) < threshold ? tiny_run + 1 : 0;
            if (tiny_run >= 40 && n > 8) return s.value();
        }
        throw std::length_error("l_value_afe: insufficient coefficients for this t");
    };

    cplx sum1 = run_sum(nodes.w1, -1.0, 1.0 / X);
    cplx sum2 = run_sum(nodes.w2, +1.0, X);
    return sum1 + phase2 * sum2;
}

inline cplx l_value_afe(const CuspForm& form, double t, double precision) {
    AfeOptions opt;
    opt.precision = precision;
    return l_value_afe(form, t, opt);
}

// Independent slow oracle: different smoothing family (cosh-weighted, wider
// Gaussian, slower cutoff), unbalanced lengths, tighter contour sampling.
inline cplx l_value_oracle(const CuspForm& form, double t) {
    if (std::abs(t) > 300.0) throw std::invalid_argument("l_value_oracle: |t| too large");
    AfeOptions opt;
    opt.precision = 1e-10;
    opt.balance_x = 1.7;
    opt.smoothing = [](cplx u) { return std::cosh(u) * std::exp(0.5 * u * u) / std::cosh(0.0); };
    opt.contour_height = 16.0;
    opt.panel_width = 0.15;
    return l_value_afe(form, t, opt);
}

// --------------------------------------------------------------------------
// Convexity-ratio sweep
// --------------------------------------------------------------------------

struct SweepPlan {
    std::vector<double> t_grid;
    double epsilon = 0.02;
    std::function<double(double, double)> K_rule;  // (t, N) -> K; default N^{2/3}
    Window V = make_bump(1.0, 2.0, true);

    double K_of(double t, double N) const {
        double K = K_rule ? K_rule(t, N) : std::pow(N, 2.0 / 3.0);
        return K;
    }
    void validate() const {
        for (double t : t_grid) {
            if (!(t > 2.0)) throw std::invalid_argument("SweepPlan: t must be > 2");
            for (double N = 1.0; N <= std::pow(t, 1.0 + epsilon); N *= 2.0) {
                double K = K_of(t, N);
                if (N >= 4.0 &&
                    (K < std::sqrt(N) - 1e-9 || K > std::pow(N, 1.0 - epsilon) + 1e-9))
                    throw std::invalid_argument("SweepPlan: K outside [sqrt(N), N^(1-eps)]");
                if (K >= t) throw std::invalid_argument("SweepPlan: need K < t");
            }
        }
    }
};

struct SweepRow {
    double t;
    cplx L;
    double convexity_ratio;  // |L| / t^{1/2}
    double sup_s_ratio;      // sup_N |S(N)| / N^{1/2} over dyadic N <= t^{1+eps}
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double fitted_exponent = 0.0;  // OLS slope of log|L| vs log t (recorded, not asserted)
};

inline SweepResult convexity_sweep(const CuspForm& form, const SweepPlan& plan,
                                   int n_threads = 1) {
    SweepResult out;
    std::vector<double> lx, ly;
    for (double t : plan.t_grid) {
        SweepRow row;
        row.t = t;
        row.L = l_value_afe(form, t, 1e-8);
        row.convexity_ratio = std::abs(row.L) / std::sqrt(t);
        row.sup_s_ratio = 0.0;
        for (double N = 1.0; N <= std::pow(t, 1.0 + plan.epsilon); N *= 2.0) {
            cplx S = s_of_n(form, N, t, plan.V, n_threads);
            row.sup_s_ratio = std::max(row.sup_s_ratio, std::abs(S) / std::sqrt(N));
        }
        out.rows.push_back(row);
        if (std::abs(row.L) > 0.0) {
            lx.push_back(std::log(t));
            ly.push_back(std::log(std::abs(row.L)));
        }
    }
    if (lx.size() >= 2) out.fitted_exponent = fit_line(lx, ly).slope;
    return out;
}

}  // namespace subconv
