// common.hpp -- shared numeric utilities: compensated summation, fixed-chunk
// deterministic parallel reduction, Gauss-Legendre node tables, 128-bit
// integer helpers, small regression helper.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace subconv {

using cplx = std::complex<double>;
using int128 = __int128_t;

inline constexpr double PI = 3.14159265358979323846264338327950288;
inline constexpr double TWO_PI = 2.0 * PI;
inline constexpr const char* ARTIFACT_VERSION = "0.1.0";

// e(x) = exp(2*pi*i*x)
inline cplx e_of(double x) {
    double a = TWO_PI * x;
    return {std::cos(a), std::sin(a)};
}

// ---------------------------------------------------------------------------
// Neumaier compensated accumulation.  Sums are run in a fixed order so results
// are bit-reproducible regardless of the thread count used upstream.
// ---------------------------------------------------------------------------
struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct CplxSum {
    NeumaierSum re, im;
    void add(cplx z) { re.add(z.real()); im.add(z.imag()); }
    cplx value() const { return {re.value(), im.value()}; }
};

// ---------------------------------------------------------------------------
// Fixed-chunk parallel map/reduce.  The range is split into a fixed number of
// chunks (independent of worker count); chunk results are combined in index
// order, so the reduction is deterministic for any --threads value.
// ---------------------------------------------------------------------------
inline int default_thread_count() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

template <typename T, typename ChunkFn>
std::vector<T> parallel_chunks(std::size_t n_items, int n_threads, const ChunkFn& fn,
                               std::size_t n_chunks = 64) {
    if (n_items == 0) return {};
    n_chunks = std::min(n_chunks, n_items);
    std::vector<T> results(n_chunks);
    auto worker = [&](std::size_t chunk) {
        std::size_t lo = chunk * n_items / n_chunks;
        std::size_t hi = (chunk + 1) * n_items / n_chunks;
        results[chunk] = fn(lo, hi);
    };
    if (n_threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) worker(c);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mu;
        auto drain = [&]() {
            for (;;) {
                std::size_t c;
                {
                    std::lock_guard<std::mutex> lk(mu);
                    if (next >= n_chunks) return;
                    c = next++;
                }
                worker(c);
            }
        };
        int nt = std::min<std::size_t>(n_threads, n_chunks);
        pool.reserve(nt);
        for (int i = 0; i < nt; ++i) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }
    return results;
}

// Deterministic compensated sum of fn(i) over [0, n); combine order fixed.
template <typename TermFn>
cplx parallel_sum_cplx(std::size_t n, int n_threads, const TermFn& fn) {
    auto parts = parallel_chunks<cplx>(n, n_threads, [&](std::size_t lo, std::size_t hi) {
        CplxSum acc;
        for (std::size_t i = lo; i < hi; ++i) acc.add(fn(i));
        return acc.value();
    });
    CplxSum total;
    for (cplx p : parts) total.add(p);
    return total.value();
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [-1,1], computed by Newton iteration and cached.
// ---------------------------------------------------------------------------
struct GaussLegendre {
    std::vector<double> x, w;
};

inline const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::vector<GaussLegendre> cache(65);
    std::lock_guard<std::mutex> lk(mu);
    if (n < 1 || n > 64) throw std::invalid_argument("gauss_legendre: order out of range");
    GaussLegendre& gl = cache[n];
    if (!gl.x.empty()) return gl;
    gl.x.resize(n);
    gl.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        gl.x[i] = -x;
        gl.x[n - 1 - i] = x;
        gl.w[i] = gl.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return gl;
}

// ---------------------------------------------------------------------------
// 128-bit integer <-> string
// ---------------------------------------------------------------------------
inline std::string int128_to_string(int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    std::string s;
    while (u) {
        s += static_cast<char>('0' + static_cast<int>(u % 10));
        u /= 10;
    }
    if (neg) s += '-';
    std::reverse(s.begin(), s.end());
    return s;
}

inline int128 int128_from_string(const std::string& s) {
    int128 v = 0;
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    if (i == s.size()) throw std::invalid_argument("int128_from_string: empty");
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("int128_from_string: bad digit");
        v = v * 10 + (s[i] - '0');
    }
    return neg ? -v : v;
}

// OLS slope of y against x.
struct LinearFit {
    double slope = 0.0, intercept = 0.0;
    int n = 0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    f.n = static_cast<int>(x.size());
    if (f.n < 2 || x.size() != y.size()) throw std::invalid_argument("fit_line: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < f.n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double d = f.n * sxx - sx * sx;
    f.slope = (f.n * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / f.n;
    return f;
}

inline int64_t gcd_i64(int64_t a, int64_t b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace subconv
