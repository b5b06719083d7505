// quadrature.hpp — adaptive Gauss-Kronrod wrappers and near-singular resolvent integrals.

#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <queue>
#include <vector>

#include "tarrow/common.hpp"

namespace tarrow::quad {

struct Result {
    cplx value{};
    double error = 0.0;
};

inline constexpr std::size_t kMaxIntervals = 4000;

namespace detail {

struct Piece {
    double lo;
    double hi;
    cplx value;
    double error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

// Globally adaptive 15/31-point Gauss-Kronrod on a finite interval: bisect the
// piece with the largest error until the total error meets either tolerance.
template <class G>
Result adaptive(G&& g, double a, double b, double rel_tol, double abs_tol) {
    using boost::math::quadrature::gauss_kronrod;
    auto rule = [&](double lo, double hi) {
        double err = 0.0;
        const cplx v = gauss_kronrod<double, 31>::integrate(g, lo, hi, 0, 0.0, &err);
        // Boost reports the non-adaptive error on the reference interval [-1, 1].
        return Piece{lo, hi, v, err * 0.5 * (hi - lo)};
    };
    std::priority_queue<Piece> queue;
    Piece first = rule(a, b);
    cplx total = first.value;
    double total_err = first.error;
    queue.push(first);
    while (queue.size() < kMaxIntervals && total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        const Piece worst = queue.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) break;
        queue.pop();
        const Piece left = rule(worst.lo, mid);
        const Piece right = rule(mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    total_err = 0.0;
    while (!queue.empty()) {
        total += queue.top().value;
        total_err += queue.top().error;
        queue.pop();
    }
    return {total, total_err};
}

} // namespace detail

// int_a^b f, either limit may be infinite. Stops once the error estimate is
// below max(abs_tol, rel_tol * |value|).
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-13, double abs_tol = 0.0) {
    auto g = [&](double x) -> cplx { return cplx(f(x)); };
    if (a == b) return {};
    if (std::isinf(a) && std::isinf(b)) {
        const Result l = integrate(f, a, 0.0, rel_tol, 0.5 * abs_tol);
        const Result r = integrate(f, 0.0, b, rel_tol, 0.5 * abs_tol);
        return {l.value + r.value, l.error + r.error};
    }
    if (std::isinf(b)) {
        auto m = [&](double u) -> cplx {
            const double x = a + u / (1.0 - u);
            return std::isfinite(x) ? g(x) / ((1.0 - u) * (1.0 - u)) : cplx(0.0);
        };
        return detail::adaptive(m, 0.0, 1.0, rel_tol, abs_tol);
    }
    if (std::isinf(a)) {
        auto m = [&](double u) -> cplx {
            const double x = b - u / (1.0 - u);
            return std::isfinite(x) ? g(x) / ((1.0 - u) * (1.0 - u)) : cplx(0.0);
        };
        return detail::adaptive(m, 0.0, 1.0, rel_tol, abs_tol);
    }
    return detail::adaptive(g, a, b, rel_tol, abs_tol);
}

// int over breakpoints[0]..breakpoints.back(), piecewise.
template <class F>
Result integrate_pieces(F&& f, const std::vector<double>& breakpoints, double rel_tol = 1e-13,
                        double abs_tol = 0.0) {
    Result total;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) continue;
        const Result r = integrate(f, breakpoints[i], breakpoints[i + 1], rel_tol, abs_tol);
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

// Throws unless the value is finite and error <= max(abs_tol, rel_tol * |value|).
inline void check(const Result& r, double abs_tol, const char* what, double rel_tol = 0.0) {
    const double limit = std::max(abs_tol, rel_tol * std::abs(r.value));
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()) || !(r.error <= limit)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, ": error estimate %.3g exceeds %.3g", r.error, limit);
        throw Error(ErrorCode::QuadratureFailure, std::string(what) + buf);
    }
}

// int_lo^hi h(W)/(W - s) dW for Im s != 0 with h analytic near the real axis.
// The pole is subtracted at s itself so the remaining integrand stays smooth
// however small Im s is.
template <class H>
Result pole_subtracted(H&& h, cplx s, double lo, double hi, std::vector<double> breaks = {},
                       double rel_tol = 1e-13) {
    require(s.imag() != 0.0, "pole_subtracted needs an off-axis pole");
    const cplx hs = h(s);
    auto smooth = [&](double w) -> cplx { return (h(cplx(w, 0.0)) - hs) / (cplx(w, 0.0) - s); };
    breaks.push_back(lo);
    breaks.push_back(hi);
    if (s.real() > lo && s.real() < hi) breaks.push_back(s.real());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return b < lo || b > hi; }),
                 breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    Result r = integrate_pieces(smooth, breaks, rel_tol);
    r.value += hs * (std::log(cplx(hi, 0.0) - s) - std::log(cplx(lo, 0.0) - s));
    return r;
}

// int_{-inf}^{inf} h(W)/(z - W) dW for Im z != 0, with h a bump centred at
// `center` of width `width` (decaying at least like 1/W).
template <class H>
Result resolvent(H&& h, cplx z, double center, double width) {
    require(width > 0.0, "resolvent needs a positive bump width");
    const double lo = std::min(center, z.real()) - 40.0 * width;
    const double hi = std::max(center, z.real()) + 40.0 * width;
    std::vector<double> breaks{center - 40.0 * width, center - 4.0 * width, center, center + 4.0 * width,
                               center + 40.0 * width};
    Result r = pole_subtracted(h, z, lo, hi, breaks);
    r.value = -r.value;
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto direct = [&](double w) -> cplx { return h(cplx(w, 0.0)) / (z - w); };
    const Result left = integrate(direct, -inf, lo);
    const Result right = integrate(direct, hi, inf);
    r.value += left.value + right.value;
    r.error += left.error + right.error;
    return r;
}

} // namespace tarrow::quad
