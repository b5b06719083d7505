// window.hpp — finite observation time as an IR cutoff.
//
// A window c(t) (c(0) = 1) multiplies the observed coordinate; in frequency it
// smears each normal-mode line with c(omega). This header provides the
// apparent spectral function, peak counting, the windowed resolvent response,
// and the apparent source inferred from a windowed observation.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/fourier.hpp"
#include "tarrow/green.hpp"
#include "tarrow/oracle.hpp"
#include "tarrow/quadrature.hpp"

namespace tarrow::window {

// c(t) = exp(-t^2 / 2T^2),  c(omega) = sqrt(2 pi) T exp(-omega^2 T^2 / 2)
struct GaussianTime {
    double T;
};

// c(t) = exp(-eta |t|),  c(omega) = 2 eta / (omega^2 + eta^2),  eta = 2 pi / T
struct LorentzianFreq {
    double eta;
    static LorentzianFreq from_time(double T) { return {kTwoPi / T}; }
};

struct Window {
    std::variant<GaussianTime, LorentzianFreq> shape;

    void validate() const {
        if (const auto* g = std::get_if<GaussianTime>(&shape)) {
            require(std::isfinite(g->T) && g->T > 0.0, "window T must be positive");
        } else {
            const double eta = std::get<LorentzianFreq>(shape).eta;
            require(std::isfinite(eta) && eta > 0.0, "window eta must be positive");
        }
    }

    double time(double t) const {
        if (const auto* g = std::get_if<GaussianTime>(&shape)) return std::exp(-t * t / (2.0 * g->T * g->T));
        return std::exp(-std::get<LorentzianFreq>(shape).eta * std::abs(t));
    }

    cplx frequency(cplx w) const {
        if (const auto* g = std::get_if<GaussianTime>(&shape)) {
            return std::sqrt(kTwoPi) * g->T * std::exp(-w * w * (g->T * g->T) / 2.0);
        }
        const double eta = std::get<LorentzianFreq>(shape).eta;
        return 2.0 * eta / (w * w + eta * eta);
    }
    double frequency(double w) const { return frequency(cplx(w, 0.0)).real(); }

    // Frequency width of the smearing kernel.
    double width() const {
        if (const auto* g = std::get_if<GaussianTime>(&shape)) return 1.0 / g->T;
        return std::get<LorentzianFreq>(shape).eta;
    }
};

// Line weights a_{kj}^2 / (2 m w_j) of the observed coordinate k.
inline std::vector<SpectralAtom> exact_spectral_weight(const oracle::NormalModes& modes, std::size_t k) {
    require(k < modes.size(), "observed index out of range");
    std::vector<SpectralAtom> atoms;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double a = modes.transform(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        const double w = modes.frequencies[j];
        atoms.push_back({w, a * a / (2.0 * modes.mass * w)});
    }
    return atoms;
}

// rho_app(Omega) = (1/2pi) sum_j c(Omega - w_j) a_{kj}^2 / (2 m w_j)
inline std::vector<double> apparent_spectral_function(const oracle::NormalModes& modes, std::size_t k,
                                                      const Window& win, const std::vector<double>& omegas) {
    win.validate();
    const auto atoms = exact_spectral_weight(modes, k);
    std::vector<double> out(omegas.size(), 0.0);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        double acc = 0.0;
        for (const auto& atom : atoms) acc += win.frequency(omegas[i] - atom.omega) * atom.weight;
        out[i] = acc / kTwoPi;
    }
    return out;
}

// int dOmega rho_app(Omega), evaluated line by line by quadrature.
inline quad::Result apparent_weight_integral(const oracle::NormalModes& modes, std::size_t k, const Window& win) {
    win.validate();
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double s = win.width();
    quad::Result total;
    for (const auto& atom : exact_spectral_weight(modes, k)) {
        auto f = [&](double w) { return win.frequency(w - atom.omega) * atom.weight / kTwoPi; };
        const double c = atom.omega;
        const std::vector<double> inner{c - 40.0 * s, c - 4.0 * s, c, c + 4.0 * s, c + 40.0 * s};
        const auto mid = quad::integrate_pieces(f, inner);
        const auto left = quad::integrate(f, -inf, inner.front());
        const auto right = quad::integrate(f, inner.back(), inf);
        total.value += mid.value + left.value + right.value;
        total.error += mid.error + left.error + right.error;
    }
    return total;
}

// Local maxima whose prominence (height above the higher of the two minima
// separating it from higher ground, or from the series ends) reaches the threshold.
// Returns the index of each counted peak (plateau midpoints).
inline std::vector<std::size_t> resolved_peak_indices(const std::vector<double>& y, double min_prominence) {
    std::vector<std::size_t> out;
    const std::size_t n = y.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(y[i] > y[i - 1])) {
            ++i;
            continue;
        }
        std::size_t r = i;
        while (r + 1 < n && y[r + 1] == y[i]) ++r;
        if (r + 1 >= n || !(y[r + 1] < y[i])) {
            i = r + 1;
            continue;
        }
        const double h = y[i];
        double left_min = h;
        for (std::size_t a = i; a-- > 0;) {
            if (y[a] > h) break;
            left_min = std::min(left_min, y[a]);
        }
        double right_min = h;
        for (std::size_t b = r + 1; b < n; ++b) {
            if (y[b] > h) break;
            right_min = std::min(right_min, y[b]);
        }
        if (h - std::max(left_min, right_min) >= min_prominence) out.push_back((i + r) / 2);
        i = r + 1;
    }
    return out;
}

inline std::size_t count_resolved_peaks(const std::vector<double>& y, double min_prominence) {
    return resolved_peak_indices(y, min_prominence).size();
}

// x_obs(omega) = -j_k int dOmega rho_app(Omega) / (omega + i eps - Omega)
inline std::vector<cplx> observed_mode_response(const oracle::NormalModes& modes, std::size_t k, const Window& win,
                                                const DeltaKick& kick, const std::vector<double>& omegas,
                                                double epsilon = 1e-6) {
    win.validate();
    require(epsilon > 0.0, "observed_mode_response needs eps > 0");
    std::vector<cplx> out(omegas.size(), 0.0);
    if (kick.j0 == 0.0) return out;
    const auto atoms = exact_spectral_weight(modes, k);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const cplx z(omegas[i], epsilon);
        cplx acc = 0.0;
        for (const auto& atom : atoms) {
            auto h = [&](cplx w) { return win.frequency(w - atom.omega) * (atom.weight / kTwoPi); };
            const auto r = quad::resolvent(h, z, atom.omega, win.width());
            quad::check(r, 1e-8 * std::max(1.0, std::abs(r.value)), "observed_mode_response");
            acc += r.value;
        }
        out[i] = -kick.j0 * acc;
    }
    return out;
}

// --- apparent source ----------------------------------------------------------

// Poles of D hugging the real axis, subtracted before window convolutions.
inline std::vector<green::Pole> near_axis_poles(const green::GreenFunction& gf, double reach, double depth) {
    const roots::Box box{-reach * 1.0137, reach * 0.9871, -depth * 1.0213, depth * 0.9787};
    return green::find_poles(gf, box);
}

namespace detail {

// Subtracting near-axis poles from D leaves rounding noise of order
// 1e-16 |D|^2 |Im p| next to each pole; tighter targets only burn evaluations.
inline constexpr double kWindowRelTol = 1e-10;

// int domega'/2pi c(omega - omega') [scale D(omega') - offset], with the
// near-axis poles of D handled by subtraction.
inline quad::Result windowed_propagator(const green::GreenFunction& gf, const std::vector<green::Pole>& poles,
                                        const Window& win, double omega, cplx scale = 1.0, cplx offset = 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double s = win.width();
    auto c = [&](cplx w) { return win.frequency(cplx(omega, 0.0) - w); };
    auto smooth = [&](double w) {
        cplx d = gf(cplx(w, 0.0));
        for (const auto& p : poles) d -= p.residue / (w - p.pole);
        return c(cplx(w, 0.0)) * (scale * d - offset);
    };
    double lo = omega - 40.0 * s;
    double hi = omega + 40.0 * s;
    std::vector<double> breaks{omega - 4.0 * s, omega, omega + 4.0 * s};
    for (const auto& p : poles) {
        lo = std::min(lo, p.pole.real() - 1.0);
        hi = std::max(hi, p.pole.real() + 1.0);
        breaks.push_back(p.pole.real());
    }
    breaks.push_back(lo);
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    quad::Result r = quad::integrate_pieces(smooth, breaks, kWindowRelTol);
    const auto left = quad::integrate(smooth, -inf, lo, kWindowRelTol);
    const auto right = quad::integrate(smooth, hi, inf, kWindowRelTol);
    r.value += left.value + right.value;
    r.error += left.error + right.error;
    for (const auto& p : poles) {
        // residue * int c(omega - w)/(w - p) over the real line
        const auto mid = quad::pole_subtracted(c, p.pole, lo, hi, breaks, kWindowRelTol);
        auto direct = [&](double w) { return c(cplx(w, 0.0)) / (w - p.pole); };
        const auto l2 = quad::integrate(direct, -inf, lo, kWindowRelTol);
        const auto r2 = quad::integrate(direct, hi, inf, kWindowRelTol);
        r.value += scale * p.residue * (mid.value + l2.value + r2.value);
        r.error += std::abs(scale * p.residue) * (mid.error + l2.error + r2.error);
    }
    r.value /= kTwoPi;
    r.error /= kTwoPi;
    return r;
}

} // namespace detail

struct ApparentSource {
    FrequencyGrid grid;
    ComplexSeries x_obs;      // windowed observation in frequency
    ComplexSeries j_obs;      // -D^{-1}(omega) x_obs(omega)
    double route_mismatch;    // max |route1 - route2| / max |j_obs| over the checked nodes
    std::size_t checked;      // nodes where the quadrature route was evaluated
    double atom;              // weight of the delta(t - t0) term
};

// Windowed observation of the response to a kick, window centred on the kick:
//   x_obs(omega) = -j0 int domega'/2pi c(omega - omega') D(omega').
// Lorentzian: closing the contour on the window pole gives -j0 D(omega +- i eta)
// (upper sign for the forward arrow). Gaussian: quadrature at every node.
inline ComplexSeries observed_response(const green::GreenFunction& gf, const Window& win, const DeltaKick& kick,
                                       const FrequencyGrid& grid, const std::vector<green::Pole>& poles = {}) {
    win.validate();
    ComplexSeries x(grid);
    if (kick.j0 == 0.0) return x;
    if (const auto* l = std::get_if<LorentzianFreq>(&win.shape)) {
        const double shift = gf.epsilon() >= 0.0 ? l->eta : -l->eta;
        for (std::size_t k = 0; k < grid.size(); ++k) x[k] = -kick.j0 * gf(cplx(grid[k], shift));
        return x;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto r = detail::windowed_propagator(gf, poles, win, grid[k]);
        quad::check(r, 1e-8 * std::max(1.0, std::abs(r.value)), "observed_response");
        x[k] = -kick.j0 * r.value;
    }
    return x;
}

namespace detail {

// Evenly spread nodes plus the two nodes bracketing each pole's real part.
inline std::vector<std::size_t> check_nodes(const FrequencyGrid& grid, const std::vector<green::Pole>& poles,
                                            std::size_t spread) {
    std::vector<std::size_t> nodes;
    const std::size_t n = grid.size();
    for (std::size_t i = 0; i < spread; ++i) nodes.push_back(1 + (i * (n - 2)) / std::max<std::size_t>(1, spread - 1));
    for (const auto& p : poles) {
        const double u = (p.pole.real() - grid[0]) / grid.d_omega();
        if (u < 0.0 || u > static_cast<double>(n - 2)) continue;
        const auto lo = static_cast<std::size_t>(std::floor(u));
        nodes.push_back(lo);
        nodes.push_back(lo + 1);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

} // namespace detail

// j_obs(omega) = -D^{-1}(omega) x_obs(omega) at every node. As a self-check the
// same quantity is integrated separately on a subset of nodes,
//   j0 [c(t=0) + int domega'/2pi c(omega-omega') (D(omega')/D(omega) - 1)],
// and the two must agree to 1e-8 relative to max |j_obs|.
inline ApparentSource apparent_source(const ComplexSeries& x_obs, const green::GreenFunction& gf, const Window& win,
                                      const DeltaKick& kick, const std::vector<green::Pole>& poles,
                                      std::size_t spread_checks = 16) {
    win.validate();
    const auto& grid = std::get<FrequencyGrid>(x_obs.grid);
    ComplexSeries j(grid);
    double scale = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx w(grid[k], 0.0);
        if (std::abs(gf(w)) < 1e-12) {
            throw Error(ErrorCode::DivisionNearZero, "|D(omega)| < 1e-12 at omega = " + std::to_string(grid[k]));
        }
        j[k] = -gf.inverse(w) * x_obs[k];
        scale = std::max(scale, std::abs(j[k]));
    }
    const auto nodes = detail::check_nodes(grid, poles, spread_checks);
    double worst = 0.0;
    for (std::size_t k : nodes) {
        cplx other = 0.0;
        if (kick.j0 != 0.0) {
            const auto r = detail::windowed_propagator(gf, poles, win, grid[k], gf.inverse(cplx(grid[k], 0.0)), 1.0);
            other = kick.j0 * (win.time(0.0) + r.value);
        }
        worst = std::max(worst, std::abs(j[k] - other));
    }
    const double mismatch = scale > 0.0 ? worst / scale : worst;
    if (mismatch > 1e-8) {
        throw Error(ErrorCode::QuadratureFailure,
                    "apparent-source routes disagree by " + std::to_string(mismatch) + " (relative)");
    }
    return {grid, x_obs, j, mismatch, nodes.size(), kick.j0 * win.time(0.0)};
}

// Frequency grid for the time transform of a Lorentzian-windowed apparent
// source: lattice period at least 16/eta so wrap-around stays below e^{-16}.
// omega_max is halved (down to omega_min) while the node count exceeds max_nodes.
inline FrequencyGrid acausal_grid(double eta, double omega_max, double omega_min = 4.0,
                                  std::size_t max_nodes = std::size_t{1} << 22) {
    require(eta > 0.0 && omega_max > 0.0, "acausal_grid needs eta, omega_max > 0");
    for (double w = omega_max;; w *= 0.5) {
        const double needed = 16.0 * w / (kPi * eta);
        std::size_t n = 1024;
        while (static_cast<double>(n) < needed) n <<= 1;
        if (n <= max_nodes || w * 0.5 < omega_min) {
            require(n <= (std::size_t{1} << 24), "acausal grid would exceed 2^24 nodes");
            return FrequencyGrid(w, n);
        }
    }
}

// Smooth (non-delta) part of the apparent source in time on `out` (times
// relative to the kick). The 1/omega tail is removed with A/(omega + i kappa),
// whose transform -i A theta(t) e^{-kappa t} is added back exactly.
inline std::vector<cplx> apparent_source_time(const ApparentSource& src, const TimeGrid& out, double kappa) {
    require(kappa > 0.0, "tail rate must be positive");
    const auto& grid = src.grid;
    const std::size_t n = grid.size();
    std::vector<cplx> smooth(n);
    for (std::size_t k = 0; k < n; ++k) smooth[k] = src.j_obs[k] - src.atom;
    // A = lim omega j_s(omega); symmetric averages cancel the 1/omega^2 term,
    // Richardson over two radii removes the 1/omega^3 one.
    auto tail = [&](std::size_t lo, std::size_t hi) { return 0.5 * (grid[lo] * smooth[lo] + grid[hi] * smooth[hi]); };
    const cplx a = (4.0 * tail(1, n - 1) - tail(n / 4, 3 * n / 4)) / 3.0;
    for (std::size_t k = 0; k < n; ++k) smooth[k] -= a / (grid[k] + cplx(0.0, kappa));
    const auto lattice = fourier::to_time_lattice(grid, smooth);
    const double period = static_cast<double>(n) * grid.conjugate_dt();
    std::vector<cplx> result(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = out[i];
        require(std::abs(t) < 0.5 * period, "output time exceeds half the transform period");
        cplx v = fourier::interpolate_periodic(lattice, grid.conjugate_dt(), t);
        if (t > 0.0) v += cplx(0.0, -1.0) * a * std::exp(-kappa * t);
        else if (t == 0.0) v += 0.5 * cplx(0.0, -1.0) * a;
        result[i] = v;
    }
    return result;
}

struct PoleApparentSource {
    double atom;                 // j0, the delta(t) weight
    std::vector<cplx> smooth;    // -j0 (2pi/T) exp(-i w_p t - 2pi|t|/T)
};

inline PoleApparentSource pole_apparent_source(cplx omega_p, double eta, double j0, const TimeGrid& grid) {
    require(eta > 0.0, "eta must be positive");
    PoleApparentSource out{j0, std::vector<cplx>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        out.smooth[i] = -j0 * eta * std::exp(cplx(0.0, -1.0) * omega_p * t - eta * std::abs(t));
    }
    return out;
}

// int_{-inf}^{0-} |f| dt by the trapezoid rule over the sampled t < 0 part.
// A sample at t = 0 holds the jump midpoint, so the last segment uses its left end.
inline double negative_time_mass(const TimeGrid& grid, const std::vector<cplx>& f) {
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i];
        const double b = grid[i + 1];
        if (a >= 0.0) break;
        if (b < 0.0) mass += 0.5 * (std::abs(f[i]) + std::abs(f[i + 1])) * (b - a);
        else mass += std::abs(f[i]) * (0.0 - a);
    }
    return mass;
}

// --- condensation-point model -------------------------------------------------------

// N modes at w_j = 1 + 1/j observed through the uniform row a_{kj} = 1/sqrt(N).
inline oracle::NormalModes condensation_modes(std::size_t n = 20, double mass = 1.0) {
    require(n >= 1, "need at least one mode");
    std::vector<double> freqs;
    for (std::size_t j = n; j >= 1; --j) freqs.push_back(1.0 + 1.0 / static_cast<double>(j));
    const std::vector<double> row(n, 1.0 / std::sqrt(static_cast<double>(n)));
    return oracle::NormalModes::with_observed_row(freqs, row, mass, 0);
}

struct SpectrumCurve {
    double T;
    std::vector<double> omega;
    std::vector<double> rho;
};

// Gaussian-window apparent spectrum on [lo, hi], step min(1e-4, 1/(4T)), at most max_points.
inline SpectrumCurve gaussian_spectrum(const oracle::NormalModes& modes, double T, double lo = 0.9, double hi = 2.1,
                                       std::size_t max_points = 2'000'000) {
    require(T > 0.0 && hi > lo, "need T > 0 and a non-empty interval");
    double step = std::min(1e-4, 1.0 / (4.0 * T));
    auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    if (count > max_points) {
        count = max_points;
        step = (hi - lo) / static_cast<double>(count - 1);
    }
    SpectrumCurve c{T, std::vector<double>(count), {}};
    for (std::size_t i = 0; i < count; ++i) c.omega[i] = lo + step * static_cast<double>(i);
    c.rho = apparent_spectral_function(modes, 0, Window{GaussianTime{T}}, c.omega);
    return c;
}

// Peaks at prominence >= fraction * max(rho).
inline std::vector<std::size_t> curve_peaks(const SpectrumCurve& c, double fraction = 0.01) {
    return resolved_peak_indices(c.rho, fraction * *std::max_element(c.rho.begin(), c.rho.end()));
}

// True when the highest counted peak in [lo, hi] is at least `ratio` times every other one there.
inline bool single_dominant_feature(const SpectrumCurve& c, double lo, double hi, double fraction = 0.01,
                                    double ratio = 2.0) {
    std::vector<double> heights;
    for (std::size_t i : curve_peaks(c, fraction)) {
        if (c.omega[i] >= lo && c.omega[i] <= hi) heights.push_back(c.rho[i]);
    }
    if (heights.empty()) return false;
    std::sort(heights.rbegin(), heights.rend());
    return heights.size() == 1 || heights[0] >= ratio * heights[1];
}

} // namespace tarrow::window
