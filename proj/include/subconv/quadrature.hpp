// quadrature.hpp -- oscillation-aware panel quadrature.  Panels are sized so
// each holds a bounded number of phase cycles, integrated by fixed-order
// Gauss-Legendre, and certified by refinement doubling.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "subconv/common.hpp"

namespace subconv {

struct quadrature_error : std::runtime_error {
    explicit quadrature_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadOptions {
    double tol = 1e-12;           // doubling self-consistency target (mixed abs/rel)
    int gl_order = 16;            // nodes per panel
    double cycles_per_panel = 1.0;
    int max_doublings = 9;
    std::size_t max_panels = 1u << 20;
};

struct Panel {
    double lo, hi;
};

namespace detail {

template <typename FreqFn>
void split_panels(double lo, double hi, const FreqFn& freq, double cycles_per_panel,
                  std::size_t max_panels, std::vector<Panel>& out) {
    double w = hi - lo;
    double f = std::max({freq(lo + 0.25 * w), freq(lo + 0.5 * w), freq(lo + 0.75 * w)});
    bool small_enough = w * (f + 1e-300) <= cycles_per_panel || w < 1e-12 * (1.0 + std::abs(lo));
    if (small_enough || out.size() >= max_panels) {
        if (out.size() >= max_panels) throw quadrature_error("panel budget exceeded");
        out.push_back({lo, hi});
        return;
    }
    split_panels(lo, lo + 0.5 * w, freq, cycles_per_panel, max_panels, out);
    split_panels(lo + 0.5 * w, hi, freq, cycles_per_panel, max_panels, out);
}

}  // namespace detail

template <typename FreqFn>
std::vector<Panel> plan_panels(double a, double b, const FreqFn& freq, const QuadOptions& opt) {
    std::vector<Panel> panels;
    // Seed with a few uniform cells so narrow features away from the midpoint
    // are seen by the frequency probe.
    const int seed = 8;
    for (int i = 0; i < seed; ++i) {
        double lo = a + (b - a) * i / seed;
        double hi = a + (b - a) * (i + 1) / seed;
        detail::split_panels(lo, hi, freq, opt.cycles_per_panel, opt.max_panels, panels);
    }
    return panels;
}

inline std::vector<Panel> halve_panels(const std::vector<Panel>& panels) {
    std::vector<Panel> out;
    out.reserve(2 * panels.size());
    for (const Panel& p : panels) {
        double m = 0.5 * (p.lo + p.hi);
        out.push_back({p.lo, m});
        out.push_back({m, p.hi});
    }
    return out;
}

template <typename Fn>
cplx integrate_on_panels(const Fn& f, const std::vector<Panel>& panels, int order) {
    const GaussLegendre& gl = gauss_legendre(order);
    CplxSum acc;
    for (const Panel& p : panels) {
        double h = 0.5 * (p.hi - p.lo), m = 0.5 * (p.hi + p.lo);
        for (std::size_t i = 0; i < gl.x.size(); ++i)
            acc.add((h * gl.w[i]) * cplx(f(m + h * gl.x[i])));
    }
    return acc.value();
}

// Integrate f over [a,b].  freq(x) estimates the local oscillation rate in
// cycles per unit length; the doubling pass is the convergence certificate.
template <typename Fn, typename FreqFn>
cplx integrate_osc(const Fn& f, double a, double b, const FreqFn& freq, QuadOptions opt = {}) {
    if (!(a < b)) return {0.0, 0.0};
    std::vector<Panel> panels = plan_panels(a, b, freq, opt);
    cplx prev = integrate_on_panels(f, panels, opt.gl_order);
    for (int d = 0; d < opt.max_doublings; ++d) {
        if (2 * panels.size() > opt.max_panels) throw quadrature_error("panel budget exceeded");
        panels = halve_panels(panels);
        cplx cur = integrate_on_panels(f, panels, opt.gl_order);
        if (std::abs(cur - prev) <= opt.tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw quadrature_error("refinement doubling did not converge");
}

template <typename Fn, typename FreqFn>
double integrate_osc_real(const Fn& f, double a, double b, const FreqFn& freq,
                          QuadOptions opt = {}) {
    return integrate_osc([&](double x) { return cplx(f(x), 0.0); }, a, b, freq, opt).real();
}

// 2D tensor-panel version; freq_x / freq_y bound the oscillation rate along
// each axis (already maximized over the other variable by the caller).
template <typename Fn, typename FreqX, typename FreqY>
cplx integrate_osc_2d(const Fn& f, double ax, double bx, double ay, double by,
                      const FreqX& freq_x, const FreqY& freq_y, QuadOptions opt = {}) {
    if (!(ax < bx && ay < by)) return {0.0, 0.0};
    std::vector<Panel> px = plan_panels(ax, bx, freq_x, opt);
    std::vector<Panel> py = plan_panels(ay, by, freq_y, opt);
    const GaussLegendre& gl = gauss_legendre(opt.gl_order);
    auto pass = [&](const std::vector<Panel>& pxs, const std::vector<Panel>& pys) {
        CplxSum acc;
        for (const Panel& qx : pxs) {
            double hx = 0.5 * (qx.hi - qx.lo), mx = 0.5 * (qx.hi + qx.lo);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                double x = mx + hx * gl.x[i];
                CplxSum row;
                for (const Panel& qy : pys) {
                    double hy = 0.5 * (qy.hi - qy.lo), my = 0.5 * (qy.hi + qy.lo);
                    for (std::size_t j = 0; j < gl.x.size(); ++j) {
                        double y = my + hy * gl.x[j];
                        row.add((hy * gl.w[j]) * f(x, y));
                    }
                }
                acc.add((hx * gl.w[i]) * row.value());
            }
        }
        return acc.value();
    };
    cplx prev = pass(px, py);
    for (int d = 0; d < opt.max_doublings; ++d) {
        if (4 * px.size() * py.size() * gl.x.size() * gl.x.size() > 4e9)
            throw quadrature_error("2d panel budget exceeded");
        px = halve_panels(px);
        py = halve_panels(py);
        cplx cur = pass(px, py);
        if (std::abs(cur - prev) <= opt.tol * (1.0 + std::abs(cur))) return cur;
        prev = cur;
    }
    throw quadrature_error("2d refinement doubling did not converge");
}

}  // namespace subconv
