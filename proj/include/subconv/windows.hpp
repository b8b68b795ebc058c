// windows.hpp -- smooth compactly supported weight functions: bumps, plateau
// windows, and the dyadic partition of unity.  Values and derivatives up to
// order 4 come from exact Taylor-jet evaluation of the defining expressions.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "subconv/common.hpp"
#include "subconv/jet.hpp"

namespace subconv {

namespace detail {

// Composite Gauss-Legendre with panel doubling; for smooth non-oscillatory
// integrands only.
template <typename Fn>
double integrate_smooth(const Fn& f, double a, double b, double tol = 1e-13) {
    const GaussLegendre& gl = gauss_legendre(32);
    auto pass = [&](int panels) {
        NeumaierSum s;
        double h = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            double lo = a + p * h;
            for (std::size_t i = 0; i < gl.x.size(); ++i)
                s.add(0.5 * h * gl.w[i] * f(lo + 0.5 * h * (gl.x[i] + 1.0)));
        }
        return s.value();
    };
    int panels = 8;
    double prev = pass(panels);
    for (int iter = 0; iter < 12; ++iter) {
        panels *= 2;
        double cur = pass(panels);
        if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

// exp(-1/y) for y > 0, zero otherwise.  Guard keeps the jet recurrences away
// from 1/y overflow where the value has already underflowed to zero.
template <int N>
Jet<N> cutoff_exp(const Jet<N>& y) {
    if (y.value() < 1e-8) return Jet<N>{};
    return exp(-reciprocal(y));
}

// Monotone C^inf ramp r(y): 0 for y<=0, 1 for y>=1, r(y)+r(1-y)=1.
template <int N>
Jet<N> ramp_jet(const Jet<N>& y) {
    if (y.value() <= 1e-12) return Jet<N>{};
    if (y.value() >= 1.0 - 1e-12) return Jet<N>::constant(1.0);
    Jet<N> t1 = cutoff_exp(y);
    Jet<N> t2 = cutoff_exp(1.0 - y);
    return t1 / (t1 + t2);
}

// Bump profile exp(-1/(1-u^2)) on [mid-half, mid+half], any jet order.
template <int N>
Jet<N> bump_profile(const Jet<N>& x, double mid, double half) {
    double xv = x.value();
    if (xv <= mid - half || xv >= mid + half) return Jet<N>{};
    Jet<N> u = (x - mid) / half;
    Jet<N> w = 1.0 - u * u;
    if (w.value() < 1e-8) return Jet<N>{};
    return exp(-reciprocal(w));
}

// Plateau profile with complementary ramps, any jet order.
template <int N>
Jet<N> plateau_profile(const Jet<N>& x, double a, double b, double c, double d) {
    double xv = x.value();
    if (xv <= a || xv >= d) return Jet<N>{};
    if (xv >= b && xv <= c) return Jet<N>::constant(1.0);
    if (xv < b) return ramp_jet((x - a) / (b - a));
    return ramp_jet((d - x) / (d - c));
}

}  // namespace detail

struct Window {
    enum class Kind { bump, plateau, dyadic_piece };

    Kind kind = Kind::bump;
    double support_lo = 0.0, support_hi = 1.0;
    std::optional<std::pair<double, double>> plateau_range;
    double label = 0.0;       // dyadic index J; 0 otherwise
    double norm_scale = 1.0;  // multiplicative normalization applied

    Jet4 jet(double x) const { return eval_(x); }
    double operator()(double x) const { return eval_(x).value(); }
    double deriv(double x, int j) const { return eval_(x).deriv(j); }

    // Recorded constants: D_j = sup |W^(j)| and sup |x^l W^(l)| over support.
    double deriv_bound(int j) const { return dbound_[j]; }
    double scaled_deriv_bound(int l) const { return xlbound_[l]; }

    // Profile descriptor for jet-transparent evaluation at any order (used by
    // the high-order integration-by-parts tail bounds).
    enum class Profile { none, bump, plateau };
    Profile profile_kind = Profile::none;
    std::array<double, 4> profile_params{};

    std::function<Jet4(double)> eval_;
    std::array<double, 5> dbound_{}, xlbound_{};

    void record_bounds() {
        const int samples = 1024;
        for (int j = 0; j <= 4; ++j) dbound_[j] = xlbound_[j] = 0.0;
        for (int i = 0; i <= samples; ++i) {
            double x = support_lo + (support_hi - support_lo) * i / samples;
            Jet4 v = eval_(x);
            double xl = 1.0;
            for (int j = 0; j <= 4; ++j) {
                dbound_[j] = std::max(dbound_[j], std::abs(v.deriv(j)));
                xlbound_[j] = std::max(xlbound_[j], std::abs(xl * v.deriv(j)));
                xl *= x;
            }
        }
    }
};

// C^inf bump exp(-1/(1-u^2)) rescaled from [-1,1] to [a,b]; optionally scaled
// to unit integral.
inline Window make_bump(double a, double b, bool normalized) {
    if (!(a < b)) throw std::invalid_argument("make_bump: degenerate interval");
    Window w;
    w.kind = Window::Kind::bump;
    w.support_lo = a;
    w.support_hi = b;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double scale = 1.0;
    if (normalized) {
        double integral = detail::integrate_smooth(
            [&](double x) { return detail::bump_profile(Jet4::variable(x), mid, half).value(); },
            a, b, 1e-14);
        scale = 1.0 / integral;
    }
    w.norm_scale = scale;
    w.profile_kind = Window::Profile::bump;
    w.profile_params = {mid, half, 0.0, 0.0};
    w.eval_ = [mid, half, scale](double x) {
        return detail::bump_profile(Jet4::variable(x), mid, half) * scale;
    };
    w.record_bounds();
    return w;
}

// Smooth window equal to 1 exactly on [b,c], supported on [a,d], with
// complementary ramps (up(y) + up(1-y) = 1) so adjacent plateau windows tile.
inline Window make_plateau(double a, double b, double c, double d) {
    if (!(a < b && b < c && c < d)) throw std::invalid_argument("make_plateau: unordered knots");
    Window w;
    w.kind = Window::Kind::plateau;
    w.support_lo = a;
    w.support_hi = d;
    w.plateau_range = {b, c};
    w.profile_kind = Window::Profile::plateau;
    w.profile_params = {a, b, c, d};
    w.eval_ = [a, b, c, d](double x) {
        return detail::plateau_profile(Jet4::variable(x), a, b, c, d);
    };
    w.record_bounds();
    return w;
}

// Dyadic partition of unity on [-X, X]: a central window supported in [-1,1]
// plus plateau-difference pieces at J = +-2^(k-1).  Radii: r_k = 2^k with
// plateau 3*2^k/4 below the top level; the top plateau covers [-X, X].  The
// telescoping structure makes the sum identically 1 up to roundoff.
inline std::vector<Window> partition_of_unity(double X) {
    if (!(X >= 1.0)) throw std::invalid_argument("partition_of_unity: range_bound < 1");
    int K = std::max(1, static_cast<int>(std::ceil(std::log2(X))));
    // Top plateau must strictly contain the next support radius down (X = 1
    // would otherwise collapse the last ramp to zero width).
    double top_plateau = std::max(X, 1.125 * std::pow(2.0, K - 1));
    auto plateau_radius = [&](int k) { return k == K ? top_plateau : 0.75 * std::pow(2.0, k); };
    auto support_radius = [&](int k) {
        return k == K ? top_plateau * 4.0 / 3.0 : std::pow(2.0, k);
    };

    std::vector<Window> parts;
    Window w0 = make_plateau(-support_radius(0), -plateau_radius(0), plateau_radius(0),
                             support_radius(0));
    w0.kind = Window::Kind::dyadic_piece;
    w0.label = 0.0;
    parts.push_back(std::move(w0));

    for (int k = 1; k <= K; ++k) {
        double p0 = plateau_radius(k - 1), r0 = support_radius(k - 1);
        double p1 = plateau_radius(k), r1 = support_radius(k);
        double J = std::pow(2.0, k - 1);
        Window pos = make_plateau(p0, r0, p1, r1);
        pos.kind = Window::Kind::dyadic_piece;
        pos.label = J;
        Window neg = make_plateau(-r1, -p1, -r0, -p0);
        neg.kind = Window::Kind::dyadic_piece;
        neg.label = -J;
        parts.push_back(std::move(pos));
        parts.push_back(std::move(neg));
    }
    return parts;
}

inline double window_integral(const Window& w, double tol = 1e-13) {
    return detail::integrate_smooth([&](double x) { return w(x); }, w.support_lo, w.support_hi,
                                    tol);
}

// Jet-transparent window evaluation at arbitrary order.
template <int N>
Jet<N> window_jet(const Window& w, const Jet<N>& x) {
    switch (w.profile_kind) {
        case Window::Profile::bump:
            return detail::bump_profile(x, w.profile_params[0], w.profile_params[1]) *
                   w.norm_scale;
        case Window::Profile::plateau:
            return detail::plateau_profile(x, w.profile_params[0], w.profile_params[1],
                                           w.profile_params[2], w.profile_params[3]);
        default:
            throw std::logic_error("window_jet: window has no profile descriptor");
    }
}

}  // namespace subconv
