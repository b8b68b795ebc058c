// gamma.hpp -- complex log-gamma (Stirling series with argument shifting and
// reflection) and the gamma-factor ratio entering the dual summation formula.
#pragma once

#include <complex>
#include <stdexcept>

#include "subconv/common.hpp"

namespace subconv {

namespace detail {

// B_{2n} / (2n (2n-1)) for the Stirling tail.
inline constexpr double STIRLING_COEF[] = {
    8.3333333333333333333e-02,   // 1/12
    -2.7777777777777777778e-03,  // -1/360
    7.9365079365079365079e-04,   // 1/1260
    -5.9523809523809523810e-04,  // -1/1680
    8.4175084175084175084e-04,   // 1/1188
    -1.9175269175269175269e-03,  // -691/360360
    6.4102564102564102564e-03,   // 1/156
    -2.9550653594771241830e-02,  // -3617/122400
    1.7964437236883057316e-01,   // 43867/244188
    -1.3924322169059011164e+00,  // -174611/125400
};

inline cplx log_gamma_stirling(cplx z) {
    cplx lz = std::log(z);
    cplx s = (z - 0.5) * lz - z + 0.5 * std::log(TWO_PI);
    cplx zi = 1.0 / z, z2 = zi * zi, p = zi;
    for (double c : STIRLING_COEF) {
        s += c * p;
        p *= z2;
    }
    return s;
}

}  // namespace detail

// Principal-branch log Gamma, accurate to ~1e-14 relative away from the poles.
inline cplx log_gamma(cplx z) {
    if (z.real() < 0.5) {
        // reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1-z),
        // with log sin evaluated in overflow-safe form for large |Im z|.
        cplx log_sin;
        double y = z.imag();
        if (std::abs(y) > 30.0) {
            // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i); keep the dominant
            // exponential outside the log.
            cplx ipz = cplx(0.0, PI) * z;
            if (y > 0)
                log_sin = -ipz - std::log(cplx(0.0, 2.0)) + std::log(1.0 - std::exp(2.0 * ipz));
            else
                log_sin = ipz - std::log(cplx(0.0, -2.0)) + std::log(1.0 - std::exp(-2.0 * ipz));
        } else {
            cplx s = std::sin(PI * z);
            if (s == cplx(0.0, 0.0)) throw std::domain_error("log_gamma: pole");
            log_sin = std::log(s);
        }
        return std::log(PI) - log_sin - log_gamma(1.0 - z);
    }
    // shift until the Stirling series is accurate
    cplx shift(0.0, 0.0);
    cplx w = z;
    while (std::abs(w) < 12.0) {
        shift += std::log(w);
        w += 1.0;
    }
    return detail::log_gamma_stirling(w) - shift;
}

inline cplx complex_gamma(cplx z) { return std::exp(log_gamma(z)); }

// gamma_ratio(s, k) = Gamma(s/2 + (k-1)/2) / Gamma(1 - s/2 + (k-1)/2),
// pole-free for Re(s) > 1 - k.  Errors out within 1e-8 of a numerator pole.
inline cplx gamma_ratio(cplx s, int k) {
    cplx znum = 0.5 * s + 0.5 * (k - 1);
    cplx zden = 1.0 - 0.5 * s + 0.5 * (k - 1);
    auto near_pole = [](cplx z) {
        if (std::abs(z.imag()) > 1e-8) return false;
        double r = z.real();
        return r < 0.5 && std::abs(r - std::round(r)) < 1e-8 && std::round(r) <= 0.0;
    };
    if (near_pole(znum) || near_pole(zden))
        throw std::domain_error("gamma_ratio: argument within 1e-8 of a pole");
    return std::exp(log_gamma(znum) - log_gamma(zden));
}

// Slowly-varying residue of gamma_ratio(1 + i tau) after removing the
// Stirling phase (|tau|/2e)^{i tau}; unimodular, with tau * Phi'(tau)
// bounded.
inline cplx gamma_phi(double tau, int k) {
    if (tau == 0.0) throw std::domain_error("gamma_phi: tau = 0");
    cplx g = gamma_ratio(cplx(1.0, tau), k);
    double at = std::abs(tau);
    // (|tau|/2e)^{-i tau}
    cplx twist = std::exp(cplx(0.0, -tau * std::log(at / (2.0 * std::exp(1.0)))));
    return g * twist;
}

}  // namespace subconv
