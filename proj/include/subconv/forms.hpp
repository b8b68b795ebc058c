// forms.hpp -- Hecke eigenvalues of the weight-12 level-1 cusp form.  The
// unnormalized coefficients tau(n) are generated by exact integer polynomial
// arithmetic: the Euler product prod (1-q^n) is expanded by the pentagonal
// number theorem, cubed, and the cube is raised to the 8th power, giving the
// 24th power with ~sqrt(n_max) nonzero multiplier terms per pass.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "subconv/common.hpp"

namespace subconv {

namespace detail {

// prod_{n>=1} (1 - q^n) mod q^len as a dense +-1/0 vector (pentagonal numbers).
inline std::vector<int64_t> euler_product(std::size_t len) {
    std::vector<int64_t> e(len, 0);
    e[0] = 1;
    for (int64_t k = 1;; ++k) {
        int64_t g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
        int64_t sign = (k % 2 == 0) ? 1 : -1;
        if (g1 >= static_cast<int64_t>(len) && g2 >= static_cast<int64_t>(len)) break;
        if (g1 < static_cast<int64_t>(len)) e[g1] = sign;
        if (g2 < static_cast<int64_t>(len)) e[g2] = sign;
    }
    return e;
}

struct SparseTerm {
    int64_t expo;
    int64_t coeff;
};

// In-place multiply of a dense series by a sparse polynomial whose constant
// term is 1 (descending index keeps lower coefficients untouched).
inline void mul_sparse_inplace(std::vector<int128>& d, const std::vector<SparseTerm>& terms) {
    int64_t len = static_cast<int64_t>(d.size());
    for (int64_t i = len - 1; i >= 0; --i) {
        int128 acc = d[i];  // constant term of the multiplier
        for (const SparseTerm& t : terms) {
            if (t.expo == 0) continue;
            if (t.expo > i) break;
            acc += static_cast<int128>(t.coeff) * d[i - t.expo];
        }
        d[i] = acc;
    }
}

}  // namespace detail

// tau(1..n_max) from the q-expansion of q * prod(1-q^n)^24.
inline std::vector<int128> generate_tau(int64_t n_max, int64_t memory_budget_mb = 512) {
    if (n_max < 1) throw std::invalid_argument("generate_tau: n_max must be >= 1");
    int64_t bytes = (n_max + 1) * static_cast<int64_t>(sizeof(int128)) * 3;
    if (bytes > memory_budget_mb * 1024 * 1024)
        throw std::length_error("generate_tau: n_max exceeds memory budget");

    std::size_t len = static_cast<std::size_t>(n_max);  // degrees 0 .. n_max-1
    std::vector<int64_t> e1 = detail::euler_product(len);

    // cube = (prod(1-q^n))^3 via two sparse passes over the pentagonal series
    std::vector<detail::SparseTerm> e1s;
    for (std::size_t i = 0; i < len; ++i)
        if (e1[i] != 0) e1s.push_back({static_cast<int64_t>(i), e1[i]});
    std::vector<int128> cube(len, 0);
    for (std::size_t i = 0; i < len; ++i) cube[i] = e1[i];
    detail::mul_sparse_inplace(cube, e1s);
    detail::mul_sparse_inplace(cube, e1s);

    std::vector<detail::SparseTerm> cubes;
    for (std::size_t i = 0; i < len; ++i)
        if (cube[i] != 0)
            cubes.push_back({static_cast<int64_t>(i), static_cast<int64_t>(cube[i])});

    // (cube)^8 by seven more sparse passes
    std::vector<int128> d = cube;
    for (int pass = 0; pass < 7; ++pass) detail::mul_sparse_inplace(d, cubes);

    std::vector<int128> tau(static_cast<std::size_t>(n_max) + 1, 0);
    for (int64_t n = 1; n <= n_max; ++n) tau[n] = d[n - 1];  // shift by the leading q
    return tau;
}

struct CuspForm {
    int weight = 12;
    std::vector<int128> tau_cache;  // tau_cache[n], n = 1..n_max; index 0 unused
    int64_t n_max = 0;

    int128 tau(int64_t n) const {
        if (n < 1 || n > n_max) throw std::out_of_range("CuspForm::tau: n out of range");
        return tau_cache[n];
    }

    // lambda(n) = tau(n) / n^((k-1)/2)
    double lambda(int64_t n) const {
        int128 t = tau(n);
        return static_cast<double>(t) / std::pow(static_cast<double>(n), 0.5 * (weight - 1));
    }
};

inline CuspForm make_delta_form(int64_t n_max) {
    CuspForm f;
    f.weight = 12;
    f.n_max = n_max;
    f.tau_cache = generate_tau(n_max);
    return f;
}

// sum_{n<=x} lambda(n)^2
inline double rankin_average(const CuspForm& f, int64_t x) {
    if (x < 1 || x > f.n_max) throw std::out_of_range("rankin_average: x out of range");
    NeumaierSum s;
    for (int64_t n = 1; n <= x; ++n) {
        double l = f.lambda(n);
        s.add(l * l);
    }
    return s.value();
}

// --------------------------------------------------------------------------
// Coefficient cache persistence: header "weight=12 n_max=<N>", then one
// signed integer per line.
// --------------------------------------------------------------------------
inline void save_coefficients(const CuspForm& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_coefficients: cannot open " + path);
    out << "weight=" << f.weight << " n_max=" << f.n_max << "\n";
    for (int64_t n = 1; n <= f.n_max; ++n) out << int128_to_string(f.tau_cache[n]) << "\n";
}

inline CuspForm load_coefficients(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_coefficients: cannot open " + path);
    std::string header;
    std::getline(in, header);
    CuspForm f;
    if (std::sscanf(header.c_str(), "weight=%d n_max=%lld", &f.weight,
                    reinterpret_cast<long long*>(&f.n_max)) != 2)
        throw std::runtime_error("load_coefficients: bad header: " + header);
    f.tau_cache.assign(static_cast<std::size_t>(f.n_max) + 1, 0);
    std::string line;
    for (int64_t n = 1; n <= f.n_max; ++n) {
        if (!std::getline(in, line))
            throw std::runtime_error("load_coefficients: truncated file");
        f.tau_cache[n] = int128_from_string(line);
    }
    return f;
}

}  // namespace subconv
