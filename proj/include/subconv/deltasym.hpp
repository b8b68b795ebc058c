// deltasym.hpp -- Kloosterman-style circle method: exact expansion of the
// indicator delta(n=0) over frames (q, a, a_bar) with 1 <= q <= Q < a <= Q+q,
// gcd(a,q) = 1.  The x-integral over [0,1] is evaluated in closed form, so
// the identity holds to rounding.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "subconv/common.hpp"

namespace subconv {

// Unique b in [0, q) with a*b == 1 (mod q); b = 0 for q = 1.
inline int64_t mod_inverse(int64_t a, int64_t q) {
    if (q <= 0) throw std::invalid_argument("mod_inverse: modulus must be positive");
    if (q == 1) return 0;
    int64_t a0 = ((a % q) + q) % q;
    if (gcd_i64(a0, q) != 1) throw std::invalid_argument("mod_inverse: arguments not coprime");
    // extended Euclid
    int64_t r0 = q, r1 = a0, s0 = 0, s1 = 1;
    while (r1 != 0) {
        int64_t k = r0 / r1;
        int64_t r2 = r0 - k * r1;
        int64_t s2 = s0 - k * s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    return ((s0 % q) + q) % q;
}

struct CircleFrame {
    int64_t q;      // modulus, 1 <= q <= Q
    int64_t a;      // residue, Q < a <= Q+q, gcd(a,q) = 1
    int64_t a_bar;  // inverse of a mod q (0 when q = 1)
};

// Enumerates frames in fixed (q ascending, a ascending) order.
inline std::vector<CircleFrame> frames(double Q) {
    if (!(Q >= 1.0)) throw std::invalid_argument("frames: Q must be >= 1");
    std::vector<CircleFrame> out;
    int64_t qmax = static_cast<int64_t>(std::floor(Q));
    for (int64_t q = 1; q <= qmax; ++q) {
        int64_t a_lo = static_cast<int64_t>(std::floor(Q)) + 1;  // smallest integer > Q
        int64_t a_hi = static_cast<int64_t>(std::floor(Q + q));  // largest integer <= Q+q
        for (int64_t a = a_lo; a <= a_hi; ++a) {
            if (gcd_i64(a, q) != 1) continue;
            out.push_back({q, a, mod_inverse(a, q)});
        }
    }
    return out;
}

// Closed form of X(n, aq) = int_0^1 e(-n x/(aq)) dx.
inline cplx delta_x_integral(int64_t n, double aq) {
    if (n == 0) return {1.0, 0.0};
    double c = static_cast<double>(n) / aq;
    // (1 - e(-c)) / (2 pi i c)
    cplx num = 1.0 - e_of(-c);
    cplx den(0.0, TWO_PI * c);
    return num / den;
}

// delta_eval(n, Q) = 2 Re sum_frames e(n a_bar/q)/(aq) * X(n, aq); equals
// [n == 0] up to rounding for every Q >= 1.
inline double delta_eval(int64_t n, double Q, const std::vector<CircleFrame>& fr) {
    CplxSum acc;
    for (const CircleFrame& f : fr) {
        double aq = static_cast<double>(f.a) * static_cast<double>(f.q);
        cplx term = e_of(static_cast<double>(n) * static_cast<double>(f.a_bar) /
                         static_cast<double>(f.q)) *
                    delta_x_integral(n, aq) / aq;
        acc.add(term);
    }
    return 2.0 * acc.value().real();
}

inline double delta_eval(int64_t n, double Q) { return delta_eval(n, Q, frames(Q)); }

// 2 sum_frames 1/(aq); the n = 0 specialization, identically 1.
inline double weight_sum(double Q, int n_threads = 1) {
    std::vector<CircleFrame> fr = frames(Q);
    auto parts = parallel_chunks<double>(fr.size(), n_threads,
                                         [&](std::size_t lo, std::size_t hi) {
                                             NeumaierSum s;
                                             for (std::size_t i = lo; i < hi; ++i)
                                                 s.add(1.0 / (static_cast<double>(fr[i].a) *
                                                              static_cast<double>(fr[i].q)));
                                             return s.value();
                                         });
    NeumaierSum total;
    for (double p : parts) total.add(p);
    return 2.0 * total.value();
}

}  // namespace subconv
