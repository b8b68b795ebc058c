// voronoi.hpp -- two-sided numerical verification of the dual summation
// formula for additively twisted coefficient sums:
//   sum_n lambda(n) e(na/q) F(n)
//     = (2 pi i^k / q) sum_n lambda(n) e(-n abar/q) I_n,
//   I_n = int F(x) J_{k-1}(4 pi sqrt(nx)/q) dx.
// The dual integrals for a dyadic block of n share one panel grid sized for
// the worst frequency in the block, so the dual side costs one dot product
// per n.  The truncation estimate bounds dropped terms by block envelopes of
// |I_n| times exact divisor sums (|lambda(n)| <= d(n)).
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "subconv/bessel.hpp"
#include "subconv/common.hpp"
#include "subconv/deltasym.hpp"
#include "subconv/forms.hpp"
#include "subconv/gamma.hpp"
#include "subconv/quadrature.hpp"
#include "subconv/windows.hpp"

namespace subconv {

inline cplx i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// Left side: finite sum over the integer support of F.
inline cplx voronoi_lhs(const CuspForm& form, int64_t a, int64_t q, const Window& F) {
    if (q < 1 || gcd_i64(a, q) != 1) throw std::invalid_argument("voronoi_lhs: need gcd(a,q)=1");
    if (F.support_lo < 1.0 || F.support_hi > static_cast<double>(form.n_max))
        throw std::out_of_range("voronoi_lhs: coefficient cache too short for supp F");
    int64_t lo = static_cast<int64_t>(std::ceil(F.support_lo));
    int64_t hi = static_cast<int64_t>(std::floor(F.support_hi));
    CplxSum s;
    for (int64_t n = lo; n <= hi; ++n) {
        double w = F(static_cast<double>(n));
        if (w == 0.0) continue;
        double am = static_cast<double>(((a % q) + q) % q);
        s.add(form.lambda(n) * w * e_of(static_cast<double>(n % q) * am / q));
    }
    return s.value();
}

// I_n for a single n, panels sized to the Bessel oscillation rate
// sqrt(n/x)/q (cycles per unit x).
inline double voronoi_bessel_integral(const Window& F, int64_t n, int64_t q, int k,
                                      double tol = 1e-13) {
    double c = 4.0 * PI * std::sqrt(static_cast<double>(n)) / q;
    auto freq = [&](double x) { return std::sqrt(static_cast<double>(n) / x) / q; };
    QuadOptions opt;
    opt.tol = tol;
    return integrate_osc_real(
        [&](double x) {
            double w = F(x);
            return w == 0.0 ? 0.0 : w * bessel_j_prod(k - 1, c, std::sqrt(x));
        },
        F.support_lo, F.support_hi, freq, opt);
}

namespace detail {

// I_n for every n in [lo, hi), sharing one panel grid sized for n = hi.
inline std::vector<double> dual_integral_block(const Window& F, int64_t q, int k, int64_t lo,
                                               int64_t hi) {
    QuadOptions opt;
    opt.gl_order = 32;
    opt.cycles_per_panel = 5.0;
    auto freq = [&](double x) { return std::sqrt(static_cast<double>(hi) / x) / q; };
    std::vector<Panel> panels = plan_panels(F.support_lo, F.support_hi, freq, opt);

    struct Grid {
        std::vector<double> zbase, wF;
    };
    auto make_grid = [&](const std::vector<Panel>& ps) {
        Grid g;
        const GaussLegendre& gl = gauss_legendre(opt.gl_order);
        for (const Panel& p : ps) {
            double h = 0.5 * (p.hi - p.lo), m = 0.5 * (p.hi + p.lo);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                double x = m + h * gl.x[i];
                double w = F(x);
                if (w == 0.0) continue;
                g.zbase.push_back(4.0 * PI * std::sqrt(x) / q);
                g.wF.push_back(h * gl.w[i] * w);
            }
        }
        return g;
    };
    Grid grid = make_grid(panels);
    auto eval = [k](const Grid& g, int64_t n) {
        double rn = std::sqrt(static_cast<double>(n));
        NeumaierSum s;
        for (std::size_t i = 0; i < g.zbase.size(); ++i)
            s.add(g.wF[i] * bessel_j_prod(k - 1, g.zbase[i], rn));
        return s.value();
    };

    std::vector<double> out(static_cast<std::size_t>(hi - lo));
    for (int64_t n = lo; n < hi; ++n) out[static_cast<std::size_t>(n - lo)] = eval(grid, n);

    // refinement certificate at three sample n
    Grid fine = make_grid(halve_panels(panels));
    for (int64_t n : {lo, (lo + hi) / 2, hi - 1}) {
        double coarse = out[static_cast<std::size_t>(n - lo)];
        double refined = eval(fine, n);
        if (std::abs(refined - coarse) > 1e-12 * (1.0 + std::abs(refined)))
            throw quadrature_error("dual_integral_block: refinement certificate failed");
    }
    return out;
}

// sum_{n>M} d(n) n^{-s} <= (s/(s-1)) M^{1-s} [2(1 + ln sqrt(M)) + s/(s-1)],
// from the divisor hyperbola split at sqrt(M).
inline double divisor_sum_tail(double M, double s) {
    double c = s / (s - 1.0);
    return c * std::pow(M, 1.0 - s) * (2.0 * (1.0 + 0.5 * std::log(M)) + c);
}

}  // namespace detail

// --------------------------------------------------------------------------
// Analytic truncation bound for the dual integrals.
//
// With G(u) = 2u F(u^2) and c = 2 pi sqrt(n)/q, repeated exact integration
// by parts against d/du[(2cu)^{m+1} J_{m+1}(2cu)] = 2c (2cu)^{m+1} J_m(2cu)
// gives, after j steps with H_i = H_{i-1}' - (nu+i) H_{i-1}/u and H_0 = G,
//   I_n = (-2c)^{-j} int H_j(u) J_{nu+j}(2cu) du            (exact),
//   |I_n| <= (q/(4 pi))^j n^{-j/2} ||H_j||_1 * env(J_{nu+j}),
// where env is the large-argument Bessel envelope 1.3 sqrt(2/(pi z)) once
// z = 2 c u_min is past the transition region, and 1 otherwise.  The norms
// grow like (j!)^2, so the bound is minimized over j.
// --------------------------------------------------------------------------
inline constexpr int DUAL_TAIL_MAX_PARTS = 16;

struct DualTailBound {
    std::array<double, DUAL_TAIL_MAX_PARTS + 1> h_norm{};  // int |H_j|, j = 6..16
    double u_min = 0.0;
    int nu = 11;
    int64_t q = 1;

    double env_factor(double z1, int order) const {
        double mu = 4.0 * static_cast<double>(order) * order;
        if (z1 >= std::max(1000.0, mu / 2.0)) return 1.3 * std::sqrt(2.0 / (PI * z1));
        return 1.0;
    }

    // |I_n| bound at a single n (minimum over the parts order).
    double per_n(double n) const {
        double z1 = 4.0 * PI * u_min * std::sqrt(n) / q;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 6; j <= DUAL_TAIL_MAX_PARTS; j += 2) {
            double b = std::pow(static_cast<double>(q) / (4.0 * PI), j) *
                       std::pow(n, -0.5 * j) * h_norm[j] * env_factor(z1, nu + j);
            best = std::min(best, b);
        }
        return best;
    }

    // (2 pi / q) sum_{n > M} d(n) |I_n|, using |lambda(n)| <= d(n).
    double sum_beyond(double M) const {
        double z1M = 4.0 * PI * u_min * std::sqrt(M) / q;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 6; j <= DUAL_TAIL_MAX_PARTS; j += 2) {
            double Kj = (TWO_PI / q) * std::pow(static_cast<double>(q) / (4.0 * PI), j) *
                        h_norm[j];
            double mu = 4.0 * static_cast<double>(nu + j) * (nu + j);
            double b;
            if (z1M >= std::max(1000.0, mu / 2.0)) {
                // envelope 1.3 sqrt(2/(pi z1(n))) = E n^{-1/4} for all n > M
                double E = 1.3 * std::sqrt(2.0 * q / (4.0 * PI * PI * u_min));
                b = Kj * E * detail::divisor_sum_tail(M, 0.5 * j + 0.25);
            } else {
                b = Kj * detail::divisor_sum_tail(M, 0.5 * j);
            }
            best = std::min(best, b);
        }
        return best;
    }
};

namespace detail {

inline std::vector<int32_t> divisor_sieve(int64_t lo, int64_t hi) {
    std::vector<int32_t> d(static_cast<std::size_t>(hi - lo), 0);
    for (int64_t k = 1; k < hi; ++k) {
        int64_t first = ((lo + k - 1) / k) * k;
        for (int64_t m = first; m < hi; m += k) ++d[static_cast<std::size_t>(m - lo)];
    }
    return d;
}

}  // namespace detail

inline DualTailBound make_dual_tail_bound(const Window& F, int64_t q, int k) {
    constexpr int J = DUAL_TAIL_MAX_PARTS;
    using JetT = Jet<J>;
    DualTailBound tb;
    tb.nu = k - 1;
    tb.q = q;
    tb.u_min = std::sqrt(F.support_lo);
    double u_max = std::sqrt(F.support_hi);

    // Laurent tables a_j[k][p] with H_j = sum_k (sum_p a_j[k][p] u^-p) G^(k)
    using Table = std::vector<std::vector<double>>;  // [k][p]
    std::vector<Table> tables(J + 1, Table(J + 1, std::vector<double>(J + 2, 0.0)));
    tables[0][0][0] = 1.0;
    for (int j = 1; j <= J; ++j) {
        const Table& prev = tables[j - 1];
        Table& cur = tables[j];
        double cj = tb.nu + j;
        for (int kk = 0; kk < j; ++kk)
            for (int p = 0; p <= J; ++p) {
                double a = prev[kk][p];
                if (a == 0.0) continue;
                cur[kk + 1][p] += a;            // shift to G^(k+1)
                cur[kk][p + 1] += -p * a;       // d/du u^-p
                cur[kk][p + 1] += -cj * a;      // -(nu+j)/u
            }
    }

    auto h_abs = [&](int j, const JetT& g, double u) {
        double s = 0.0;
        for (int kk = 0; kk <= j; ++kk) {
            double lau = 0.0, up = 1.0;
            for (int p = 0; p <= J + 1; ++p) {
                lau += tables[j][kk][p] * up;
                up /= u;
            }
            s += lau * g.deriv(kk);
        }
        return std::abs(s);
    };
    auto midpoint = [&](int n, std::array<double, J + 1>& norms) {
        double h = (u_max - tb.u_min) / n;
        std::array<NeumaierSum, J + 1> acc{};
        for (int i = 0; i < n; ++i) {
            double u = tb.u_min + (i + 0.5) * h;
            JetT uj = JetT::variable(u);
            JetT g = 2.0 * uj * window_jet<J>(F, uj * uj);
            for (int j = 6; j <= J; j += 2) acc[j].add(h_abs(j, g, u));
        }
        for (int j = 6; j <= J; j += 2) norms[j] = acc[j].value() * h;
    };
    std::array<double, J + 1> coarse{}, fine{};
    midpoint(8192, coarse);
    midpoint(16384, fine);
    for (int j = 6; j <= J; j += 2) {
        if (std::abs(fine[j] - coarse[j]) > 2e-3 * (1.0 + std::abs(fine[j])))
            throw quadrature_error("make_dual_tail_bound: norm grid not converged");
        tb.h_norm[j] = 1.05 * fine[j];
    }
    return tb;
}

// Dual-side integral table plus truncation bound; independent of the residue
// a, so one table serves every twist at fixed (q, F).
struct DualTable {
    int64_t q = 1;
    int weight = 12;
    std::vector<double> I;  // I[n-1], n = 1..n_sum
    int64_t n_sum = 0;
    double tail_estimate = 0.0;
    double quad_tol = 0.0;
};

// Tail estimate for sum_{n > M} |lambda(n) I_n| * (2 pi / q): octave by
// octave, the per-term envelope min(1.5 * max sampled |I_n|, analytic parts
// bound) is multiplied by the exact sum of |lambda(n)| over the octave
// (divisor-bound fallback past the cache); once the analytic bound alone is
// below target the remaining range closes out with sum_beyond.
inline double sampled_tail_estimate(const CuspForm& form, const Window& F, int64_t q,
                                    int64_t M, const DualTailBound& tb,
                                    double close_target) {
    int k = form.weight;
    double total = 0.0;
    int64_t lo = M + 1;
    for (int oct = 0; oct < 14; ++oct) {
        double analytic_rest = tb.sum_beyond(static_cast<double>(lo - 1));
        if (analytic_rest <= close_target || oct == 13) return total + analytic_rest;
        int64_t hi = 2 * lo;
        double ienv = 0.0;
        for (int i = 0; i < 24; ++i) {
            int64_t m = lo + (hi - 1 - lo) * i / 23;
            ienv = std::max(ienv, std::abs(voronoi_bessel_integral(F, m, q, k, 1e-13)));
        }
        double per_term = std::min(1.5 * ienv, tb.per_n(static_cast<double>(lo)));
        double weight_sum = 0.0;
        if (hi - 1 <= form.n_max) {
            for (int64_t n = lo; n < hi; ++n) weight_sum += std::abs(form.lambda(n));
        } else {
            std::vector<int32_t> d = detail::divisor_sieve(lo, hi);
            for (int32_t v : d) weight_sum += v;
        }
        total += (TWO_PI / q) * per_term * weight_sum;
        lo = hi;
    }
    return total;  // unreachable
}

inline DualTable build_dual_table(const CuspForm& form, int64_t q, const Window& F,
                                  double tail_target = 5e-9) {
    DualTable tab;
    tab.q = q;
    tab.weight = form.weight;
    tab.quad_tol = 1e-12;
    DualTailBound tb = make_dual_tail_bound(F, q, form.weight);

    // extend dyadically until terms are negligible and the tail estimate
    // past the cut is below target
    double peak = 0.0;
    for (int64_t lo = 1, hi = 64;; lo = hi, hi *= 2) {
        if (hi - 1 > form.n_max)
            throw std::length_error("build_dual_table: coefficient cache too short");
        std::vector<double> block = detail::dual_integral_block(F, q, form.weight, lo, hi);
        tab.I.insert(tab.I.end(), block.begin(), block.end());
        double block_max = 0.0;
        for (int64_t n = lo; n < hi; ++n) {
            double t = std::abs(form.lambda(n) * block[static_cast<std::size_t>(n - lo)]);
            peak = std::max(peak, t);
            if (n >= lo + (hi - lo) / 2) block_max = std::max(block_max, t);
        }
        tab.n_sum = static_cast<int64_t>(tab.I.size());
        if (lo >= 64 && block_max < 1e-12 * (1.0 + peak)) {
            tab.tail_estimate =
                sampled_tail_estimate(form, F, q, tab.n_sum, tb, 0.2 * tail_target);
            if (tab.tail_estimate <= tail_target) return tab;
        }
    }
}

struct DualSum {
    cplx value;
    double tail_estimate = 0.0;
    int64_t n_cut = 0;
    double quad_tol = 0.0;
};

inline DualSum dual_sum_from_table(const CuspForm& form, int64_t a, int64_t q,
                                   const DualTable& tab, int64_t n_cut = 0) {
    if (gcd_i64(a, q) != 1) throw std::invalid_argument("dual_sum_from_table: gcd(a,q)=1");
    int64_t abar = mod_inverse(a, q);
    int64_t limit = n_cut == 0 ? tab.n_sum : std::min(n_cut, tab.n_sum);
    CplxSum s;
    for (int64_t n = 1; n <= limit; ++n)
        s.add(form.lambda(n) *
              e_of(-static_cast<double>(n % q) * static_cast<double>(abar) / q) *
              tab.I[static_cast<std::size_t>(n - 1)]);
    DualSum out;
    out.value = (TWO_PI / q) * i_power(form.weight) * s.value();
    out.tail_estimate = tab.tail_estimate;
    out.n_cut = limit;
    out.quad_tol = tab.quad_tol;
    return out;
}

inline DualSum voronoi_rhs(const CuspForm& form, int64_t a, int64_t q, const Window& F,
                           int64_t n_cut = 0) {
    return dual_sum_from_table(form, a, q, build_dual_table(form, q, F), n_cut);
}

struct VoronoiReport {
    cplx lhs, rhs;
    double abs_residual = 0.0, rel_residual = 0.0;
    double tail_estimate = 0.0, quad_budget = 0.0;
    int64_t n_cut = 0;
};

inline VoronoiReport make_voronoi_report(const CuspForm& form, int64_t a, int64_t q,
                                         const Window& F, const DualTable& tab) {
    VoronoiReport r;
    r.lhs = voronoi_lhs(form, a, q, F);
    DualSum d = dual_sum_from_table(form, a, q, tab);
    r.rhs = d.value;
    r.n_cut = d.n_cut;
    r.tail_estimate = d.tail_estimate;
    r.quad_budget = d.quad_tol * static_cast<double>(d.n_cut);
    r.abs_residual = std::abs(r.lhs - r.rhs);
    r.rel_residual = r.abs_residual / std::max(1e-300, std::abs(r.lhs));
    return r;
}

inline VoronoiReport voronoi_check(const CuspForm& form, int64_t a, int64_t q,
                                   const Window& F) {
    return make_voronoi_report(form, a, q, F, build_dual_table(form, q, F));
}

}  // namespace subconv
