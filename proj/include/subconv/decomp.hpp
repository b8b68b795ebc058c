// decomp.hpp -- desk-scale instantiation of the structural identities behind
// the dyadic sums S(N): the split S(N) = S+ + S- over circle-method frames
// with the conductor-lowering v-integral, the Poisson-dual m-sum, the
// complete character sum mod qq', and the I** = I1 + I2 decomposition with
// its B(C, tau) error budget.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "subconv/common.hpp"
#include "subconv/deltasym.hpp"
#include "subconv/forms.hpp"
#include "subconv/lcrit.hpp"
#include "subconv/oscint.hpp"
#include "subconv/quadrature.hpp"
#include "subconv/windows.hpp"

namespace subconv {

struct DecompConfig {
    double N = 100.0;
    double K = 10.0;
    double t = 200.0;
    double Q = 0.0;  // 0 -> (N/K)^{1/2}
    double epsilon = 0.02;
    double quad_tol = 1e-9;
    int n_threads = 1;

    // desk-scale caps; overridable but logged by the CLI when raised
    double cap_N = 500.0;
    double cap_Q = 12.0;
    int64_t cap_poisson_q = 5;

    Window V = make_bump(1.0, 2.0, true);         // normalized n/v weight
    Window U = make_plateau(0.5, 1.0, 2.0, 2.5);  // m weight, = 1 on [1,2]

    double q_value() const { return Q > 0.0 ? Q : std::sqrt(N / K); }

    void validate() const {
        if (N > cap_N) throw std::invalid_argument("DecompConfig: N above desk-scale cap");
        if (q_value() > cap_Q) throw std::invalid_argument("DecompConfig: Q above cap");
        if (t != 0.0 && !(K < t)) throw std::invalid_argument("DecompConfig: need K < t");
    }
};

// --------------------------------------------------------------------------
// S(N) = S+ + S-: quadruple evaluation over frames, with the x-integral on
// [0,1] and the v-integral against V(v/K) done by phase-resolving panels and
// the finite n, m sums over the window supports.
// --------------------------------------------------------------------------

struct SPlusMinus {
    cplx s_plus, s_minus;
    double certificate = 0.0;  // change under one panel doubling
};

namespace detail {

struct NodeSet {
    std::vector<double> x, wx;
};

inline NodeSet flatten(const std::vector<Panel>& panels, int order) {
    const GaussLegendre& gl = gauss_legendre(order);
    NodeSet ns;
    ns.x.reserve(panels.size() * gl.x.size());
    ns.wx.reserve(panels.size() * gl.x.size());
    for (const Panel& p : panels) {
        double h = 0.5 * (p.hi - p.lo), m = 0.5 * (p.hi + p.lo);
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            ns.x.push_back(m + h * gl.x[i]);
            ns.wx.push_back(h * gl.w[i]);
        }
    }
    return ns;
}

// One sign branch of the frame sum for a fixed panel resolution.
inline cplx s_branch(const CuspForm& form, const DecompConfig& cfg, int sign,
                     const std::vector<CircleFrame>& fr, const NodeSet& xs,
                     const NodeSet& vs) {
    double N = cfg.N, K = cfg.K, t = cfg.t;
    int64_t n_lo = static_cast<int64_t>(std::ceil(N * cfg.V.support_lo));
    int64_t n_hi = static_cast<int64_t>(std::floor(N * cfg.V.support_hi));
    int64_t m_lo = static_cast<int64_t>(std::ceil(N * cfg.U.support_lo));
    int64_t m_hi = static_cast<int64_t>(std::floor(N * cfg.U.support_hi));
    if (n_hi > form.n_max || m_hi > form.n_max)
        throw std::out_of_range("s_plus_minus: coefficient cache too short");

    std::size_t nn = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::size_t nm = static_cast<std::size_t>(m_hi - m_lo + 1);
    std::vector<double> log_n(nn), log_m(nm), wV(nn), wU(nm);
    for (std::size_t i = 0; i < nn; ++i) {
        int64_t n = n_lo + static_cast<int64_t>(i);
        log_n[i] = std::log(static_cast<double>(n));
        wV[i] = cfg.V(static_cast<double>(n) / N);
    }
    for (std::size_t i = 0; i < nm; ++i) {
        int64_t m = m_lo + static_cast<int64_t>(i);
        log_m[i] = std::log(static_cast<double>(m));
        wU[i] = cfg.U(static_cast<double>(m) / N);
    }

    // v-tables shared across frames and x
    std::vector<cplx> An(vs.x.size() * nn), Am(vs.x.size() * nm);
    for (std::size_t v = 0; v < vs.x.size(); ++v) {
        for (std::size_t i = 0; i < nn; ++i)
            An[v * nn + i] = std::exp(cplx(0.0, vs.x[v] * log_n[i]));
        for (std::size_t i = 0; i < nm; ++i)
            Am[v * nm + i] = std::exp(cplx(0.0, -(t + vs.x[v]) * log_m[i]));
    }

    CplxSum total;
    for (const CircleFrame& f : fr) {
        double aq = static_cast<double>(f.a) * static_cast<double>(f.q);
        std::vector<cplx> cn(nn), cm(nm);
        for (std::size_t i = 0; i < nn; ++i) {
            int64_t n = n_lo + static_cast<int64_t>(i);
            cn[i] = form.lambda(n) * wV[i] *
                    e_of(sign * static_cast<double>((n % f.q) * f.a_bar) / f.q);
        }
        for (std::size_t i = 0; i < nm; ++i) {
            int64_t m = m_lo + static_cast<int64_t>(i);
            cm[i] = wU[i] * e_of(-sign * static_cast<double>((m % f.q) * f.a_bar) / f.q);
        }
        // x-chunked, fixed-order combine
        auto parts = parallel_chunks<cplx>(
            xs.x.size(), cfg.n_threads,
            [&](std::size_t lo, std::size_t hi) {
                CplxSum acc;
                std::vector<cplx> bn(nn), bm(nm);
                for (std::size_t xi = lo; xi < hi; ++xi) {
                    double x = xs.x[xi];
                    for (std::size_t i = 0; i < nn; ++i) {
                        int64_t n = n_lo + static_cast<int64_t>(i);
                        bn[i] = e_of(-sign * static_cast<double>(n) * x / aq);
                    }
                    for (std::size_t i = 0; i < nm; ++i) {
                        int64_t m = m_lo + static_cast<int64_t>(i);
                        bm[i] = e_of(sign * static_cast<double>(m) * x / aq);
                    }
                    CplxSum xacc;
                    for (std::size_t v = 0; v < vs.x.size(); ++v) {
                        double wv = vs.wx[v] * cfg.V(vs.x[v] / K);
                        if (wv == 0.0) continue;
                        cplx sn(0.0, 0.0), sm(0.0, 0.0);
                        const cplx* an = &An[v * nn];
                        const cplx* am = &Am[v * nm];
                        for (std::size_t i = 0; i < nn; ++i) sn += cn[i] * an[i] * bn[i];
                        for (std::size_t i = 0; i < nm; ++i) sm += cm[i] * am[i] * bm[i];
                        xacc.add(wv * sn * sm);
                    }
                    acc.add(xs.wx[xi] * xacc.value());
                }
                return acc.value();
            },
            64);
        CplxSum frame_sum;
        for (cplx p : parts) frame_sum.add(p);
        total.add(frame_sum.value() / aq);
    }
    return total.value() / K;
}

}  // namespace detail

inline SPlusMinus s_plus_minus(const CuspForm& form, const DecompConfig& cfg,
                               bool certify = true) {
    cfg.validate();
    double Q = cfg.q_value();
    std::vector<CircleFrame> fr = frames(Q);
    double aq_min = (std::floor(Q) + 1.0);  // q = 1 frame has the smallest aq
    double max_span = cfg.N * (cfg.V.support_hi - cfg.U.support_lo);

    QuadOptions opt;
    auto xfreq = [&](double) { return max_span / aq_min; };
    auto vfreq = [&](double) {
        return std::log(cfg.V.support_hi / cfg.U.support_lo) / TWO_PI;
    };
    std::vector<Panel> px = plan_panels(0.0, 1.0, xfreq, opt);
    std::vector<Panel> pv =
        plan_panels(cfg.K * cfg.V.support_lo, cfg.K * cfg.V.support_hi, vfreq, opt);

    detail::NodeSet xs = detail::flatten(px, opt.gl_order);
    detail::NodeSet vs = detail::flatten(pv, opt.gl_order);
    SPlusMinus out;
    out.s_plus = detail::s_branch(form, cfg, +1, fr, xs, vs);
    out.s_minus = detail::s_branch(form, cfg, -1, fr, xs, vs);
    if (certify) {
        detail::NodeSet xs2 = detail::flatten(halve_panels(px), opt.gl_order);
        detail::NodeSet vs2 = detail::flatten(halve_panels(pv), opt.gl_order);
        cplx p2 = detail::s_branch(form, cfg, +1, fr, xs2, vs2);
        cplx m2 = detail::s_branch(form, cfg, -1, fr, xs2, vs2);
        out.certificate = std::abs(p2 - out.s_plus) + std::abs(m2 - out.s_minus);
        out.s_plus = p2;
        out.s_minus = m2;
    }
    return out;
}

// --------------------------------------------------------------------------
// Poisson dual of the m-sum
// --------------------------------------------------------------------------

struct PoissonDual {
    cplx direct, dual;
    double residual = 0.0;
    int64_t m_cut = 0;
};

inline PoissonDual poisson_dual_m_sum(const CuspForm& /*unused*/, const DecompConfig& cfg,
                                      int64_t q, int64_t a, double x, double v,
                                      int64_t m_cut = 0) {
    if (q < 1 || q > cfg.cap_poisson_q)
        throw std::invalid_argument("poisson_dual_m_sum: q outside desk cap");
    if (gcd_i64(a, q) != 1) throw std::invalid_argument("poisson_dual_m_sum: gcd(a,q) != 1");
    double N = cfg.N, t = cfg.t;
    int64_t abar = mod_inverse(a, q);
    double aq = static_cast<double>(a) * static_cast<double>(q);

    PoissonDual out;
    {
        int64_t m_lo = static_cast<int64_t>(std::ceil(N * cfg.U.support_lo));
        int64_t m_hi = static_cast<int64_t>(std::floor(N * cfg.U.support_hi));
        CplxSum s;
        for (int64_t m = m_lo; m <= m_hi; ++m) {
            double w = cfg.U(static_cast<double>(m) / N);
            if (w == 0.0) continue;
            double md = static_cast<double>(m);
            cplx osc = std::exp(cplx(0.0, -(t + v) * std::log(md)));
            s.add(w * osc *
                  e_of(-static_cast<double>((m % q) * abar) / q + md * x / aq));
        }
        out.direct = s.value();
    }
    if (m_cut == 0) {
        double base = static_cast<double>(q) * (t + std::abs(v) + 1.0) / N *
                      std::pow(t, cfg.epsilon);
        m_cut = 2 * static_cast<int64_t>(std::ceil(base)) + 8;
    }
    out.m_cut = m_cut;
    {
        CplxSum s;
        cplx nfac = N * std::exp(cplx(0.0, -(t + v) * std::log(N)));
        // dual variable runs over m == abar (mod q), |m| <= m_cut
        int64_t j_lo = static_cast<int64_t>(std::floor((-static_cast<double>(m_cut) - abar) / q));
        int64_t j_hi = static_cast<int64_t>(std::ceil((static_cast<double>(m_cut) - abar) / q));
        for (int64_t j = j_lo; j <= j_hi; ++j) {
            int64_t m = abar + j * q;
            if (std::abs(m) > m_cut) continue;
            double r = N * (static_cast<double>(m) * a - x) / aq;
            s.add(w_dagger(cfg.U, r, cplx(1.0, -(t + v)), cfg.quad_tol));
        }
        out.dual = nfac * s.value();
    }
    out.residual = std::abs(out.direct - out.dual) / std::max(1e-300, std::abs(out.direct));
    return out;
}

// --------------------------------------------------------------------------
// Complete character sum mod qq'
// --------------------------------------------------------------------------

// sum_{beta mod qq'} e(beta (a'q - aq' + n) / (qq')); equals qq' when
// n == aq' - a'q (mod qq') and 0 otherwise.
inline cplx character_sum(int64_t q, int64_t q_prime, int64_t a, int64_t a_prime, int64_t n) {
    int64_t mod = q * q_prime;
    if (mod < 1 || mod > 100000000)
        throw std::invalid_argument("character_sum: modulus out of range");
    int64_t r = ((a_prime * q - a * q_prime + n) % mod + mod) % mod;
    CplxSum s;
    for (int64_t beta = 0; beta < mod; ++beta)
        s.add(e_of(static_cast<double>((beta % mod) * (r % mod) % mod) / mod));
    return s.value();
}

inline int64_t character_sum_closed(int64_t q, int64_t q_prime, int64_t a, int64_t a_prime,
                                    int64_t n) {
    int64_t mod = q * q_prime;
    int64_t r = ((a * q_prime - a_prime * q - n) % mod + mod) % mod;
    return r == 0 ? mod : 0;
}

// --------------------------------------------------------------------------
// I**(q, m, tau) and its main-term I1
// --------------------------------------------------------------------------

// Unique a in (Q, Q+q] with a m == 1 (mod q).
inline int64_t unique_inverse_in_window(int64_t m, int64_t q, double Q) {
    int64_t inv = mod_inverse(m, q);
    int64_t a0 = static_cast<int64_t>(std::floor(Q)) + 1;
    int64_t shift = ((inv - a0) % q + q) % q;
    return a0 + shift;
}

struct IStarStar {
    cplx value;
    int64_t a = 0;
    double certificate = -1.0;
};

namespace detail {

// Inner transform int W(u) u^{sigma-1} e(-r u) u^{i(beta0 + s v)} du sampled
// on an equispaced v-grid by incremental rotations: each node advances by
// exp(i s dv log u) per v-step.
struct DaggerSweep {
    std::vector<cplx> cur, step;

    DaggerSweep(const Window& W, double r, double sigma, double beta0, double s, double v0,
                double dv, double beta_abs_max, int halvings) {
        QuadOptions opt;
        opt.gl_order = 32;
        opt.cycles_per_panel = 5.0;
        auto freq = [&](double u) { return std::abs(r) + beta_abs_max / (TWO_PI * u); };
        std::vector<Panel> panels = plan_panels(W.support_lo, W.support_hi, freq, opt);
        for (int h = 0; h < halvings; ++h) panels = halve_panels(panels);
        const GaussLegendre& gl = gauss_legendre(opt.gl_order);
        for (const Panel& p : panels) {
            double h = 0.5 * (p.hi - p.lo), mid = 0.5 * (p.hi + p.lo);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                double u = mid + h * gl.x[i];
                double w = W(u);
                if (w == 0.0) continue;
                double lu = std::log(u);
                cplx val = (h * gl.w[i]) * w * std::pow(u, sigma - 1.0) * e_of(-r * u) *
                           std::exp(cplx(0.0, (beta0 + s * v0) * lu));
                cur.push_back(val);
                step.push_back(std::exp(cplx(0.0, s * dv * lu)));
            }
        }
    }

    // value at the current v-node, then advance to the next
    cplx value_and_advance() {
        CplxSum s;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            s.add(cur[i]);
            cur[i] *= step[i];
        }
        return s.value();
    }
};

inline cplx i_star_star_pass(const CuspForm&, const DecompConfig& cfg, int64_t q, int64_t m,
                             double tau, int64_t a, int halvings) {
    double N = cfg.N, K = cfg.K, t = cfg.t;
    double aq = static_cast<double>(a) * static_cast<double>(q);
    double v_lo = cfg.V.support_lo, v_hi = cfg.V.support_hi;

    // The integrand in x is a superposition of e(-r(x) y) with |dr/dx| = N/aq
    // and y in the transform supports, so its x-bandwidth is bounded by
    // (N/aq)(y_U + y_V) cycles.
    double xband = (N / aq) * (cfg.U.support_hi + cfg.V.support_hi);
    QuadOptions opt;
    std::vector<Panel> px = plan_panels(0.0, 1.0, [&](double) { return xband; }, opt);
    for (int h = 0; h < halvings; ++h) px = halve_panels(px);
    NodeSet xs = flatten(px, opt.gl_order);

    // Equispaced midpoint grid in v: the integrand is smooth with all
    // derivatives vanishing at the support edges, so midpoint converges
    // super-algebraically; node count covers the v-bandwidth
    // K (|log| bounds) + |tau|/2 log-range with wide margin.
    double vband =
        (K * (std::abs(std::log(cfg.U.support_hi)) + std::abs(std::log(cfg.U.support_lo)) +
              std::abs(std::log(cfg.V.support_hi)) + 1.0)) /
        TWO_PI;
    int nv = 16 * std::max(4, static_cast<int>(std::ceil(vband))) << halvings;
    double dv = (v_hi - v_lo) / nv;

    double beta_u_max = t + K * v_hi;
    double beta_v_max = 0.5 * std::abs(tau) + K * v_hi;

    auto parts = parallel_chunks<cplx>(
        xs.x.size(), cfg.n_threads,
        [&](std::size_t lo, std::size_t hi) {
            CplxSum acc;
            for (std::size_t xi = lo; xi < hi; ++xi) {
                double x = xs.x[xi];
                double r_u = N * (static_cast<double>(m * a) - x) / aq;
                double r_v = N * x / aq;
                double v0 = v_lo + 0.5 * dv;
                DaggerSweep sweep_u(cfg.U, r_u, 1.0, -t, -K, v0, dv, beta_u_max, halvings);
                DaggerSweep sweep_v(cfg.V, r_v, 0.5, -0.5 * tau, K, v0, dv, beta_v_max,
                                    halvings);
                CplxSum xacc;
                for (int j = 0; j < nv; ++j) {
                    double v = v0 + j * dv;
                    double wv = cfg.V(v);
                    cplx ud = sweep_u.value_and_advance();
                    cplx vd = sweep_v.value_and_advance();
                    if (wv != 0.0) xacc.add(wv * ud * vd);
                }
                acc.add((xs.wx[xi] * dv) * xacc.value());
            }
            return acc.value();
        },
        64);
    CplxSum total;
    for (cplx p : parts) total.add(p);
    return total.value();
}

}  // namespace detail

// I**(q,m,tau) = int_0^1 int V(v) U^(N(ma-x)/(aq), 1-i(t+Kv))
//                            V^(Nx/(aq), 1/2 - i tau/2 + i K v) dv dx
inline IStarStar i_star_star(const CuspForm& form, const DecompConfig& cfg, int64_t q,
                             int64_t m, double tau, bool certify = false) {
    if (gcd_i64(m, q) != 1) throw std::invalid_argument("i_star_star: gcd(m,q) != 1");
    IStarStar out;
    out.a = unique_inverse_in_window(m, q, cfg.q_value());
    out.value = detail::i_star_star_pass(form, cfg, q, m, tau, out.a, 0);
    if (certify) {
        cplx refined = detail::i_star_star_pass(form, cfg, q, m, tau, out.a, 1);
        out.certificate = std::abs(refined - out.value);
        out.value = refined;
    }
    return out;
}

// Main term I1(q,m,tau); c4 is a calibration constant fitted once against
// I** at a reference point and then frozen.
inline cplx i_one(const DecompConfig& cfg, int64_t q, int64_t m, double tau, cplx c4) {
    if (m >= 0) throw std::invalid_argument("i_one: main term requires m < 0");
    double N = cfg.N, K = cfg.K, t = cfg.t;
    int64_t a = unique_inverse_in_window(m, q, cfg.q_value());
    double ts = t + 0.5 * tau;
    double varg = -ts * static_cast<double>(q) / (TWO_PI * N * static_cast<double>(m));
    double wv = cfg.V(varg);
    if (wv == 0.0) return {0.0, 0.0};
    double base = varg / std::exp(1.0);  // -(t+tau/2) q / (2 pi e N m)
    cplx power = std::pow(base, 1.5) * std::exp(cplx(0.0, -ts * std::log(base)));
    double xint = detail::integrate_smooth(
        [&](double x) {
            return cfg.V(0.5 * tau / K - ts * x / (K * static_cast<double>(m * a)));
        },
        0.0, 1.0, 1e-12);
    return c4 / (std::sqrt(ts) * K) * power * wv * xint;
}

// --------------------------------------------------------------------------
// Error budget B(C, tau)
// --------------------------------------------------------------------------

// B(C,tau) = t^eps/(t^{1/2} K^{3/2}) min{1, 10K/|tau|}
//            + (1/(t^{1/2} K^{5/2})) (N/(QC))^{1/2}
inline double error_budget(const DecompConfig& cfg, double C, double tau) {
    double t = cfg.t, K = cfg.K, N = cfg.N, Q = cfg.q_value();
    double first = std::pow(t, cfg.epsilon) / (std::sqrt(t) * std::pow(K, 1.5)) *
                   std::min(1.0, 10.0 * K / std::max(1e-300, std::abs(tau)));
    double second = std::sqrt(N / (Q * C)) / (std::sqrt(t) * std::pow(K, 2.5));
    return first + second;
}

struct BudgetIntegralCheck {
    double integral;  // numeric int_{|tau| <= N t^eps / (QC)} B(C,tau) dtau
    double bound;     // 2 (K/(t^{1/2} K^{3/2}) + (N/(QC))^{3/2} / (t^{1/2} K^{5/2}))
};

inline BudgetIntegralCheck error_budget_integral(const DecompConfig& cfg, double C) {
    double t = cfg.t, K = cfg.K, N = cfg.N, Q = cfg.q_value();
    double tau_max = N * std::pow(t, cfg.epsilon) / (Q * C);
    BudgetIntegralCheck out;
    // piecewise smooth: kink at |tau| = 10K
    double split = std::min(tau_max, 10.0 * K);
    auto B = [&](double tau) { return error_budget(cfg, C, tau); };
    double I = detail::integrate_smooth(B, 0.0, split, 1e-12);
    if (tau_max > split) I += detail::integrate_smooth(B, split, tau_max, 1e-12);
    out.integral = 2.0 * I;
    out.bound = 2.0 * (K / (std::sqrt(t) * std::pow(K, 1.5)) +
                       std::pow(N / (Q * C), 1.5) / (std::sqrt(t) * std::pow(K, 2.5)));
    return out;
}

}  // namespace subconv
