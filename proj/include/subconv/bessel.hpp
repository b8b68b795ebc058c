// bessel.hpp -- J_nu for integer order: ascending series at small argument,
// Miller's downward recurrence in the midrange, Hankel asymptotics beyond.
// Branch switch points chosen so adjacent methods overlap to ~1e-12.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "subconv/common.hpp"

namespace subconv {

namespace detail {

inline double bessel_j_series(int nu, double x) {
    // sum_j (-1)^j (x/2)^{nu+2j} / (j! (nu+j)!)
    double xh = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= nu; ++i) term *= xh / i;  // (x/2)^nu / nu!
    double sum = term;
    for (int j = 1; j < 200; ++j) {
        term *= -(xh * xh) / (static_cast<double>(j) * (nu + j));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

inline double bessel_j_miller(int nu, double x) {
    // downward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalized with
    // J_0 + 2 sum J_{2k} = 1
    int start = static_cast<int>(x + 12.0 * std::cbrt(x) + nu + 24);
    if (start % 2) ++start;
    double jp = 0.0, jc = 1e-300, target = 0.0;
    NeumaierSum norm;
    for (int n = start; n > 0; --n) {
        double jm = (2.0 * n / x) * jc - jp;
        jp = jc;
        jc = jm;
        if ((n - 1) % 2 == 0) norm.add(jc);  // accumulates J_0 + J_2 + J_4 + ...
        if (n - 1 == nu) target = jc;
        if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
            jp /= 1e250;
            jc /= 1e250;
            target /= 1e250;
            NeumaierSum rescaled;
            rescaled.add(norm.value() / 1e250);
            norm = rescaled;
        }
    }
    double scale = 2.0 * norm.value() - jc;  // J_0 counted twice in the loop
    return target / scale;
}

// chi is passed in long double: at large argument the phase x - (nu/2+1/4)pi
// must be formed in extended precision or the reduced angle loses ~x*eps.
inline double bessel_j_hankel(int nu, double x, long double chi) {
    // J_nu(x) = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)]
    double mu = 4.0 * static_cast<double>(nu) * nu;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    double prev = 1e308;
    for (int j = 1; j <= 40; ++j) {
        term *= (mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j * x);
        if (std::abs(term) >= prev) break;  // past the optimal truncation
        prev = std::abs(term);
        if (j % 2 == 1)
            q += (((j - 1) / 2) % 2 == 0 ? term : -term);
        else
            p += ((j / 2) % 2 == 0 ? term : -term);
        if (std::abs(term) < 1e-18) break;
    }
    return std::sqrt(2.0 / (PI * x)) *
           (p * static_cast<double>(std::cos(chi)) - q * static_cast<double>(std::sin(chi)));
}

inline double bessel_j_hankel(int nu, double x) {
    long double chi = static_cast<long double>(x) -
                      (0.5L * nu + 0.25L) * 3.14159265358979323846264338327950288L;
    return bessel_j_hankel(nu, x, chi);
}

}  // namespace detail

// Switch points: series below, Miller in the midrange, Hankel beyond.
inline double bessel_j_series_cut(int nu) { return 12.0; }
inline double bessel_j_hankel_cut(int nu) {
    return std::max(160.0, 4.0 * static_cast<double>(nu) * nu / 3.0);
}

inline double bessel_j(int nu, double x) {
    if (nu < 0) throw std::invalid_argument("bessel_j: negative order");
    if (!(x > 0.0)) throw std::invalid_argument("bessel_j: x must be positive");
    if (x <= bessel_j_series_cut(nu)) return detail::bessel_j_series(nu, x);
    if (x < bessel_j_hankel_cut(nu)) return detail::bessel_j_miller(nu, x);
    return detail::bessel_j_hankel(nu, x);
}

// J_nu(a*b) with the oscillation phase a*b carried in extended precision, so
// values near the roundoff floor of large-argument evaluations stay honest.
inline double bessel_j_prod(int nu, double a, double b) {
    double x = a * b;
    if (x < bessel_j_hankel_cut(nu)) return bessel_j(nu, x);
    long double chi = static_cast<long double>(a) * static_cast<long double>(b) -
                      (0.5L * nu + 0.25L) * 3.14159265358979323846264338327950288L;
    return detail::bessel_j_hankel(nu, x, chi);
}

}  // namespace subconv
