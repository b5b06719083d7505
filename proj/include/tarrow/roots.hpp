// roots.hpp — zeros of analytic functions in a rectangle.
//
// Argument-principle counting on box boundaries, recursive subdivision until
// each box holds at most one zero, then Newton refinement.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "tarrow/common.hpp"

namespace tarrow::roots {

struct Box {
    double re_min;
    double re_max;
    double im_min;
    double im_max;

    bool contains(cplx z, double slack = 0.0) const {
        const double sx = slack * (re_max - re_min);
        const double sy = slack * (im_max - im_min);
        return z.real() >= re_min - sx && z.real() <= re_max + sx && z.imag() >= im_min - sy &&
               z.imag() <= im_max + sy;
    }
    double diameter() const { return std::hypot(re_max - re_min, im_max - im_min); }
    cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
};

struct Options {
    std::size_t edge_samples = 64;
    int max_edge_depth = 60;
    double min_box = 1e-9;
    double newton_tol = 1e-10;
    int newton_iterations = 100;
};

using Fn = std::function<cplx(cplx)>;

namespace detail {

class EdgeFailure : public std::exception {};

inline double phase_step(cplx from, cplx to) { return std::arg(to / from); }

// Accumulated phase change of g along [a, b].
inline double edge_phase(const Fn& g, cplx a, cplx b, cplx ga, cplx gb, int depth, const Options& opt) {
    const cplx m = 0.5 * (a + b);
    const cplx gm = g(m);
    if (gm == cplx(0.0) || !std::isfinite(gm.real()) || !std::isfinite(gm.imag())) throw EdgeFailure();
    const double whole = phase_step(ga, gb);
    const double left = phase_step(ga, gm);
    const double right = phase_step(gm, gb);
    if (std::abs(whole) < 0.5 && std::abs(left + right - whole) < 1e-9) return whole;
    if (depth >= opt.max_edge_depth) throw EdgeFailure();
    return edge_phase(g, a, m, ga, gm, depth + 1, opt) + edge_phase(g, m, b, gm, gb, depth + 1, opt);
}

} // namespace detail

// Winding number of g around the boundary of `box`, i.e. the zero count of an
// entire g inside it. Throws EdgeFailure when a zero sits on the boundary.
inline int winding_number(const Fn& g, const Box& box, const Options& opt = {}) {
    const cplx corners[4] = {{box.re_min, box.im_min}, {box.re_max, box.im_min},
                             {box.re_max, box.im_max}, {box.re_min, box.im_max}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e];
        const cplx b = corners[(e + 1) % 4];
        cplx prev = a;
        cplx gprev = g(prev);
        if (gprev == cplx(0.0)) throw detail::EdgeFailure();
        for (std::size_t s = 1; s <= opt.edge_samples; ++s) {
            const cplx next = a + (b - a) * (static_cast<double>(s) / static_cast<double>(opt.edge_samples));
            const cplx gnext = g(next);
            if (gnext == cplx(0.0)) throw detail::EdgeFailure();
            total += detail::edge_phase(g, prev, next, gprev, gnext, 0, opt);
            prev = next;
            gprev = gnext;
        }
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

struct Search {
    std::vector<cplx> zeros;
    int winding = 0;
};

namespace detail {

inline bool newton(const Fn& f, const Fn& df, cplx& z, const Options& opt) {
    for (int it = 0; it < opt.newton_iterations; ++it) {
        const cplx d = df(z);
        if (d == cplx(0.0)) return false;
        const cplx step = f(z) / d;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (std::abs(step) <= 1e-3 * opt.newton_tol * std::max(1.0, std::abs(z))) return true;
    }
    // Accept a final step at the requested tolerance.
    const cplx d = df(z);
    return d != cplx(0.0) && std::abs(f(z) / d) <= opt.newton_tol;
}

inline void search_box(const Fn& f, const Fn& df, const Fn& g, const Box& box, int count, const Options& opt,
                       std::vector<cplx>& out) {
    if (count <= 0) return;
    if (count == 1 || box.diameter() < opt.min_box) {
        const cplx starts[5] = {box.center(), {box.re_min + 0.25 * (box.re_max - box.re_min), box.center().imag()},
                                {box.re_min + 0.75 * (box.re_max - box.re_min), box.center().imag()},
                                {box.center().real(), box.im_min + 0.25 * (box.im_max - box.im_min)},
                                {box.center().real(), box.im_min + 0.75 * (box.im_max - box.im_min)}};
        for (cplx z : starts) {
            if (newton(f, df, z, opt) && box.contains(z, 1e-6)) {
                for (int c = 0; c < count; ++c) out.push_back(z);
                return;
            }
        }
        if (box.diameter() < opt.min_box) {
            throw Error(ErrorCode::RootCountMismatch, "Newton refinement failed inside a minimal box");
        }
    }
    // Split the longer side slightly off-centre so symmetric zeros avoid the cut.
    const double fractions[4] = {0.5123, 0.4731, 0.5379, 0.4469};
    const bool vertical_cut = (box.re_max - box.re_min) >= (box.im_max - box.im_min);
    for (double frac : fractions) {
        Box a = box;
        Box b = box;
        if (vertical_cut) {
            const double cut = box.re_min + frac * (box.re_max - box.re_min);
            a.re_max = cut;
            b.re_min = cut;
        } else {
            const double cut = box.im_min + frac * (box.im_max - box.im_min);
            a.im_max = cut;
            b.im_min = cut;
        }
        try {
            const int ca = winding_number(g, a, opt);
            const int cb = winding_number(g, b, opt);
            if (ca < 0 || cb < 0 || ca + cb != count) continue;
            search_box(f, df, g, a, ca, opt, out);
            search_box(f, df, g, b, cb, opt, out);
            return;
        } catch (const EdgeFailure&) {
            continue;
        }
    }
    throw Error(ErrorCode::RootCountMismatch, "could not split a search box consistently");
}

} // namespace detail

// Zeros of f inside `box`. `g` must be entire in the box with the same zeros
// as f (f times a polynomial clearing its poles); df is f'.
inline Search find_zeros(const Fn& f, const Fn& df, const Fn& g, const Box& box, const Options& opt = {}) {
    require(box.re_max > box.re_min && box.im_max > box.im_min, "search box must have positive extent");
    Search result;
    try {
        result.winding = winding_number(g, box, opt);
    } catch (const detail::EdgeFailure&) {
        throw Error(ErrorCode::InvalidArgument, "a zero or pole lies on the search-box boundary");
    }
    detail::search_box(f, df, g, box, result.winding, opt, result.zeros);
    if (static_cast<int>(result.zeros.size()) != result.winding) {
        throw Error(ErrorCode::RootCountMismatch, "refinement found " + std::to_string(result.zeros.size()) +
                                                      " zeros, winding number is " + std::to_string(result.winding));
    }
    return result;
}

} // namespace tarrow::roots
