// jet.hpp -- truncated Taylor arithmetic, used to evaluate window functions
// together with their derivatives exactly.  Order 4 covers the phase/weight
// derivative checks; order 8 feeds the high-order integration-by-parts tail
// bounds.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace subconv {

// Taylor coefficients c[k] = f^(k)(x0)/k! for k = 0..N.
template <int N>
struct Jet {
    static constexpr int ORDER = N;
    std::array<double, N + 1> c{};

    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    static Jet variable(double v) {
        Jet j;
        j.c[0] = v;
        j.c[1] = 1.0;
        return j;
    }

    double value() const { return c[0]; }
    double deriv(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }

    Jet operator-() const {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = -c[k];
        return r;
    }
    friend Jet operator+(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] + b.c[k];
        return r;
    }
    friend Jet operator-(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] - b.c[k];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
            r.c[k] = s;
        }
        return r;
    }
    friend Jet operator+(const Jet& a, double s) { return a + constant(s); }
    friend Jet operator+(double s, const Jet& a) { return a + constant(s); }
    friend Jet operator-(const Jet& a, double s) { return a - constant(s); }
    friend Jet operator-(double s, const Jet& a) { return constant(s) - a; }
    friend Jet operator*(const Jet& a, double s) {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = a.c[k] * s;
        return r;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
};

// 1/a by power-series inversion; a.c[0] must be nonzero.
template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
    if (a.c[0] == 0.0) throw std::domain_error("jet reciprocal at zero");
    Jet<N> r;
    r.c[0] = 1.0 / a.c[0];
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -s / a.c[0];
    }
    return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
    return a * reciprocal(b);
}
template <int N>
Jet<N> operator/(double s, const Jet<N>& b) {
    return reciprocal(b) * s;
}

// exp(a) via (exp a)' = a' exp a.
template <int N>
Jet<N> exp(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
        r.c[k] = s / k;
    }
    return r;
}

// log(a), a.c[0] > 0.
template <int N>
Jet<N> log(const Jet<N>& a) {
    if (a.c[0] <= 0.0) throw std::domain_error("jet log of non-positive value");
    Jet<N> r;
    r.c[0] = std::log(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = k * a.c[k];
        for (int j = 1; j < k; ++j) s -= j * r.c[j] * a.c[k - j];
        r.c[k] = s / (k * a.c[0]);
    }
    return r;
}

// a^p for real p, a.c[0] > 0.
template <int N>
Jet<N> pow(const Jet<N>& a, double p) {
    return exp(log(a) * p);
}

using Jet4 = Jet<4>;
using Jet8 = Jet<8>;

}  // namespace subconv
