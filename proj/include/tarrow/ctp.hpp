// ctp.hpp — closed time path doublets, the 2x2 propagator algebra and decoherence.
//
// Block layout (rows/columns ordered +, -):
//   D = ( D^n + i Dbar,  -D^f + i Dbar ;  D^f + i Dbar,  -D^n + i Dbar )
//   K = ( K^n + i Kbar1,  K^f - i Kbar2 ; -K^f - i Kbar2, -K^n + i Kbar1 )
// so D^{++} - D^{+-} = D^n + D^f = D^r and D^{++} - D^{-+} = D^n - D^f = D^a.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/fourier.hpp"
#include "tarrow/green.hpp"
#include "tarrow/model.hpp"
#include "tarrow/oracle.hpp"

namespace tarrow::ctp {

// --- doublet trajectories ------------------------------------------------------

struct CtpTrajectory {
    TimeGrid grid; // [0, t_f]
    std::vector<double> x_plus;
    std::vector<double> x_minus;
    // Bath doublets (n_modes x n_samples), present when lifted from a full trajectory.
    std::optional<Eigen::MatrixXd> y_plus;
    std::optional<Eigen::MatrixXd> y_minus;

    double closure_residual() const {
        double r = std::abs(x_plus.back() - x_minus.back());
        if (y_plus && y_minus) {
            const auto last = y_plus->cols() - 1;
            r = std::max(r, (y_plus->col(last) - y_minus->col(last)).cwiseAbs().maxCoeff());
        }
        return r;
    }
};

// x+(t) = xt(t), x-(t) = xt(2 t_f - t) for xt sampled on [0, 2 t_f].
inline CtpTrajectory lift_trajectory(const oracle::Trajectory& xt) {
    const auto& g = xt.grid;
    const std::size_t n = g.size();
    if (std::abs(g.t_start()) > 1e-12 * std::max(1.0, g.t_end())) {
        throw Error(ErrorCode::GridNotFoldable, "trajectory must start at t = 0");
    }
    if (n < 3 || n % 2 == 0) {
        throw Error(ErrorCode::GridNotFoldable, "need an odd sample count so t_f is a grid point");
    }
    require(xt.x.size() == n, "trajectory length must match its grid");
    const std::size_t half = (n - 1) / 2;
    CtpTrajectory out{TimeGrid(0.0, g[half], half + 1), std::vector<double>(half + 1),
                      std::vector<double>(half + 1), std::nullopt, std::nullopt};
    for (std::size_t i = 0; i <= half; ++i) {
        out.x_plus[i] = xt.x[i];
        out.x_minus[i] = xt.x[n - 1 - i];
    }
    if (xt.y) {
        const auto rows = xt.y->rows();
        Eigen::MatrixXd yp(rows, static_cast<Eigen::Index>(half + 1));
        Eigen::MatrixXd ym(rows, static_cast<Eigen::Index>(half + 1));
        for (std::size_t i = 0; i <= half; ++i) {
            yp.col(static_cast<Eigen::Index>(i)) = xt.y->col(static_cast<Eigen::Index>(i));
            ym.col(static_cast<Eigen::Index>(i)) = xt.y->col(static_cast<Eigen::Index>(n - 1 - i));
        }
        out.y_plus = std::move(yp);
        out.y_minus = std::move(ym);
    }
    return out;
}

inline CtpTrajectory tau_exchange(const CtpTrajectory& t) {
    return {t.grid, t.x_minus, t.x_plus, t.y_minus, t.y_plus};
}

struct PhysicalDecoherence {
    std::vector<double> x; // (x+ + x-)/2
    std::vector<double> y; // x+ - x-
};

inline PhysicalDecoherence split_physical_decoherence(const CtpTrajectory& t) {
    PhysicalDecoherence out{std::vector<double>(t.x_plus.size()), std::vector<double>(t.x_plus.size())};
    for (std::size_t i = 0; i < t.x_plus.size(); ++i) {
        out.x[i] = 0.5 * (t.x_plus[i] + t.x_minus[i]);
        out.y[i] = t.x_plus[i] - t.x_minus[i];
    }
    return out;
}

// x+- = x +- y/2
inline CtpTrajectory join_physical_decoherence(const TimeGrid& grid, const PhysicalDecoherence& pd) {
    require(pd.x.size() == grid.size() && pd.y.size() == grid.size(), "series must match the grid");
    CtpTrajectory out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size()), std::nullopt,
                      std::nullopt};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.x_plus[i] = pd.x[i] + 0.5 * pd.y[i];
        out.x_minus[i] = pd.x[i] - 0.5 * pd.y[i];
    }
    return out;
}

// --- action -----------------------------------------------------------------------

struct PairedSource {
    std::vector<double> j_plus;
    std::vector<double> j_minus;

    // j^{+-} = +-j
    static PairedSource physical(const std::vector<double>& j) {
        PairedSource s{j, j};
        for (auto& v : s.j_minus) v = -v;
        return s;
    }
};

namespace detail {

// Centred differences inside, second-order one-sided at the ends.
inline std::vector<double> velocity(const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    std::vector<double> v(n, 0.0);
    if (n == 2) {
        v[0] = v[1] = (x[1] - x[0]) / dt;
        return v;
    }
    v[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
    v[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    return v;
}

inline double trapezoid(const std::vector<double>& f, double dt) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += (i == 0 || i + 1 == f.size() ? 0.5 : 1.0) * f[i];
    return s * dt;
}

// Real Lagrangian density sampled on the grid for one branch.
inline std::vector<double> lagrangian(const SystemSpec& system, const DiscreteBath* bath, const std::vector<double>& x,
                                      const Eigen::MatrixXd* y, double dt) {
    const double m = system.mass;
    const auto vx = velocity(x, dt);
    std::vector<double> l(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        l[i] = 0.5 * m * vx[i] * vx[i] - 0.5 * m * system.omega0 * system.omega0 * x[i] * x[i];
    }
    if (bath && y) {
        for (std::size_t n = 0; n < bath->modes.size(); ++n) {
            const auto& mode = bath->modes[n];
            std::vector<double> yn(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                yn[i] = (*y)(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
            }
            const auto vy = velocity(yn, dt);
            for (std::size_t i = 0; i < x.size(); ++i) {
                l[i] += 0.5 * m * vy[i] * vy[i] - 0.5 * m * mode.omega * mode.omega * yn[i] * yn[i] +
                        mode.g * x[i] * yn[i];
            }
        }
    }
    return l;
}

} // namespace detail

// S = int [L_CTP(x+) - conj(L_CTP(x-)) + j+ x+ + j- x-] dt with L_CTP = L + i (m eps/2) x^2.
// Bath coordinates enter only when the trajectory carries bath doublets.
inline cplx ctp_action(const SystemSpec& system, const std::optional<DiscreteBath>& bath, const CtpTrajectory& traj,
                       double epsilon, const std::optional<PairedSource>& source = std::nullopt) {
    system.validate();
    const std::size_t n = traj.grid.size();
    require(traj.x_plus.size() == n && traj.x_minus.size() == n, "doublet length must match the grid");
    const double dt = traj.grid.dt();
    const DiscreteBath* b = bath ? &*bath : nullptr;
    if (b) {
        b->validate();
        require(traj.y_plus && traj.y_minus, "a bath action needs bath doublets in the trajectory");
        require(static_cast<std::size_t>(traj.y_plus->rows()) == b->modes.size(), "bath doublet size mismatch");
    }
    const auto lp = detail::lagrangian(system, b, traj.x_plus, b ? &*traj.y_plus : nullptr, dt);
    const auto lm = detail::lagrangian(system, b, traj.x_minus, b ? &*traj.y_minus : nullptr, dt);
    const double half_me = 0.5 * system.mass * epsilon;
    std::vector<cplx> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx lcp(lp[i], half_me * traj.x_plus[i] * traj.x_plus[i]);
        const cplx lcm(lm[i], half_me * traj.x_minus[i] * traj.x_minus[i]);
        integrand[i] = lcp - std::conj(lcm);
        if (source) integrand[i] += source->j_plus[i] * traj.x_plus[i] + source->j_minus[i] * traj.x_minus[i];
    }
    if (source) {
        require(source->j_plus.size() == n && source->j_minus.size() == n, "source length must match the grid");
    }
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (i == 0 || i + 1 == n ? 0.5 : 1.0) * integrand[i];
    return s * dt;
}

// --- 2x2 propagator blocks ---------------------------------------------------------

// The four entries D^{++}, D^{+-}, D^{-+}, D^{--} sampled on a common grid.
struct RawBlocks {
    AnyGrid grid;
    std::vector<cplx> pp;
    std::vector<cplx> pm;
    std::vector<cplx> mp;
    std::vector<cplx> mm;
};

// max |D^{++} - D^{+-} - D^{-+} + D^{--}|
inline double check_consistency(const RawBlocks& b) {
    const std::size_t n = grid_size(b.grid);
    require(b.pp.size() == n && b.pm.size() == n && b.mp.size() == n && b.mm.size() == n,
            "blocks must share the grid");
    double r = 0.0;
    for (std::size_t k = 0; k < n; ++k) r = std::max(r, std::abs(b.pp[k] - b.pm[k] - b.mp[k] + b.mm[k]));
    return r;
}

enum class Parity { Even, Odd };

// max |f(-s) - (+-) f(s)| over mirrored nodes (lag or frequency).
inline double parity_residual(const ComplexSeries& f, Parity p) {
    const double sign = p == Parity::Even ? 1.0 : -1.0;
    double r = 0.0;
    if (const auto* lag = std::get_if<LagGrid>(&f.grid)) {
        for (std::size_t k = 0; k < f.size(); ++k) r = std::max(r, std::abs(f[lag->mirror(k)] - sign * f[k]));
    } else if (const auto* fg = std::get_if<FrequencyGrid>(&f.grid)) {
        for (std::size_t k = 1; k < f.size(); ++k) r = std::max(r, std::abs(f[fg->mirror(k)] - sign * f[k]));
    } else {
        throw Error(ErrorCode::InvalidArgument, "parity needs a lag or frequency grid");
    }
    return r;
}

// Reduced block: three functions after D^{++} - D^{+-} = D^{-+} - D^{--}.
struct CtpBlock {
    ComplexSeries d_n;
    ComplexSeries d_f;
    ComplexSeries d_bar;

    const AnyGrid& grid() const noexcept { return d_n.grid; }
    std::size_t size() const noexcept { return d_n.size(); }

    RawBlocks raw() const {
        const cplx i(0.0, 1.0);
        RawBlocks b{grid(), std::vector<cplx>(size()), std::vector<cplx>(size()), std::vector<cplx>(size()),
                    std::vector<cplx>(size())};
        for (std::size_t k = 0; k < size(); ++k) {
            b.pp[k] = d_n[k] + i * d_bar[k];
            b.pm[k] = -d_f[k] + i * d_bar[k];
            b.mp[k] = d_f[k] + i * d_bar[k];
            b.mm[k] = -d_n[k] + i * d_bar[k];
        }
        return b;
    }
    std::vector<cplx> retarded() const {
        std::vector<cplx> r(size());
        for (std::size_t k = 0; k < size(); ++k) r[k] = d_n[k] + d_f[k];
        return r;
    }
    std::vector<cplx> advanced() const {
        std::vector<cplx> a(size());
        for (std::size_t k = 0; k < size(); ++k) a[k] = d_n[k] - d_f[k];
        return a;
    }
};

inline CtpBlock assemble_ctp(ComplexSeries d_n, ComplexSeries d_f, ComplexSeries d_bar) {
    require(same_grid(d_n, d_f) && same_grid(d_n, d_bar), "d_n, d_f and d_bar must share a grid");
    auto check = [](const ComplexSeries& s, Parity p, const char* name) {
        const double scale = std::max(1.0, max_abs(s.values));
        const double r = parity_residual(s, p);
        if (r > 1e-8 * scale) {
            throw Error(ErrorCode::ParityViolation,
                        std::string(name) + " parity residual " + std::to_string(r) + " exceeds 1e-8");
        }
    };
    check(d_n, Parity::Even, "d_n");
    check(d_f, Parity::Odd, "d_f");
    check(d_bar, Parity::Even, "d_bar");
    return {std::move(d_n), std::move(d_f), std::move(d_bar)};
}

struct Reduction {
    CtpBlock block;
    double consistency_residual; // check_consistency of the input
    double dbar_mismatch;        // max |Dbar1 - Dbar2|
};

// D^n = (D^{++} - D^{--})/2, D^f = (D^{-+} - D^{+-})/2, Dbar = mean of
// Dbar1 = (D^{++} + D^{--})/2i and Dbar2 = (D^{-+} + D^{+-})/2i.
inline Reduction reduce(const RawBlocks& b) {
    const double consistency = check_consistency(b);
    const std::size_t n = grid_size(b.grid);
    ComplexSeries dn(b.grid), df(b.grid), dbar(b.grid);
    const cplx two_i(0.0, 2.0);
    double mismatch = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        dn[k] = 0.5 * (b.pp[k] - b.mm[k]);
        df[k] = 0.5 * (b.mp[k] - b.pm[k]);
        const cplx bar1 = (b.pp[k] + b.mm[k]) / two_i;
        const cplx bar2 = (b.mp[k] + b.pm[k]) / two_i;
        mismatch = std::max(mismatch, std::abs(bar1 - bar2));
        dbar[k] = 0.5 * (bar1 + bar2);
    }
    return {CtpBlock{dn, df, dbar}, consistency, mismatch};
}

// Classical block on a lag grid: D^n, D^f from the retarded kernel, Dbar = 0.
inline CtpBlock classical_ctp_block(const green::GreenFunction& gf, const LagGrid& lags,
                                    const green::KernelOptions& opt = {}) {
    const green::RetardedKernel kernel(gf, opt);
    auto nf = green::near_far_kernels(kernel, lags);
    return assemble_ctp(std::move(nf.d_n), std::move(nf.d_f), ComplexSeries(lags));
}

// --- quantum harmonic oscillator ---------------------------------------------------

// Ground-state <x(tau) x(0)> = (hbar/2 m w0) e^{-i w0 tau}, damped by e^{-eps|tau|}.
inline cplx ground_state_correlator(const SystemSpec& system, double hbar, double epsilon, double tau) {
    const double a = hbar / (2.0 * system.mass * system.omega0);
    return a * std::exp(cplx(-epsilon * std::abs(tau), -system.omega0 * tau));
}

// D^{++} = -i<T x x'>, D^{+-} = -i<x' x>, D^{-+} = -i<x x'>, D^{--} = -i<T* x x'>.
inline RawBlocks quantum_raw_blocks(const SystemSpec& system, double hbar, double epsilon, const LagGrid& lags) {
    system.validate();
    require(hbar > 0.0, "hbar must be positive");
    require(epsilon >= 0.0, "epsilon must be non-negative");
    const std::size_t n = lags.size();
    const cplx mi(0.0, -1.0);
    RawBlocks b{lags, std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const double tau = lags[k];
        const cplx fwd = ground_state_correlator(system, hbar, epsilon, tau);  // <x(t) x(t')>
        const cplx bwd = ground_state_correlator(system, hbar, epsilon, -tau); // <x(t') x(t)>
        const cplx t_ordered = tau >= 0.0 ? fwd : bwd;
        const cplx anti_ordered = tau >= 0.0 ? bwd : fwd;
        b.pp[k] = mi * t_ordered;
        b.pm[k] = mi * bwd;
        b.mp[k] = mi * fwd;
        b.mm[k] = mi * anti_ordered;
    }
    return b;
}

inline CtpBlock quantum_ctp_propagator(const SystemSpec& system, double hbar, double epsilon, const LagGrid& lags) {
    auto r = reduce(quantum_raw_blocks(system, hbar, epsilon, lags));
    return assemble_ctp(std::move(r.block.d_n), std::move(r.block.d_f), std::move(r.block.d_bar));
}

// The same block in frequency, in closed form:
//   D^r = hbar / (m[(w + i eps)^2 - w0^2]),  D^n = Re D^r,  D^f = i Im D^r,
//   Dbar = -(hbar/2 m w0) [eps/((w - w0)^2 + eps^2) + eps/((w + w0)^2 + eps^2)].
inline CtpBlock quantum_ctp_spectrum(const SystemSpec& system, double hbar, double epsilon, const FrequencyGrid& grid) {
    system.validate();
    require(hbar > 0.0 && epsilon > 0.0, "hbar and epsilon must be positive");
    const double m = system.mass;
    const double w0 = system.omega0;
    const double a = hbar / (2.0 * m * w0);
    ComplexSeries dn(grid), df(grid), dbar(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k];
        const cplx z(w, epsilon);
        const cplx dr = hbar / (m * ((z - w0) * (z + w0)));
        dn[k] = dr.real();
        df[k] = cplx(0.0, dr.imag());
        dbar[k] = -a * (epsilon / ((w - w0) * (w - w0) + epsilon * epsilon) +
                        epsilon / ((w + w0) * (w + w0) + epsilon * epsilon));
    }
    return {dn, df, dbar};
}

// --- physical response -------------------------------------------------------------

struct Doublet {
    std::vector<cplx> x_plus;
    std::vector<cplx> x_minus;
};

// x^s(t) = -sum_{s'} int_0^{t_f} dt' D^{ss'}(t - t') s' j(t') with j^{+-} = +-j.
// The lag grid spacing must equal the time step and cover every t - t'.
inline Doublet physical_response(const RawBlocks& blocks, const SourceProfile& source, const TimeGrid& grid) {
    const double residual = check_consistency(blocks);
    if (residual > 1e-8) {
        throw Error(ErrorCode::InconsistentBlock, "consistency residual " + std::to_string(residual) + " exceeds 1e-8");
    }
    const auto* lags = std::get_if<LagGrid>(&blocks.grid);
    require(lags != nullptr, "physical_response needs blocks on a lag grid");
    const double dt = grid.dt();
    if (std::abs(lags->dt() - dt) > 1e-12 * dt) {
        throw Error(ErrorCode::GridMismatch, "lag spacing must equal the time step");
    }
    const std::size_t n = grid.size();
    if (lags->half() + 1 < n) throw Error(ErrorCode::GridMismatch, "lag grid shorter than the time window");
    source.validate();

    // r = D^{++} - D^{+-} drives x+, a = D^{-+} - D^{--} drives x-.
    auto lag_index = [&](long long d) { return static_cast<std::size_t>(static_cast<long long>(lags->half()) + d); };
    Doublet out{std::vector<cplx>(n, 0.0), std::vector<cplx>(n, 0.0)};
    auto add = [&](std::size_t s_src, double weight) {
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t k = lag_index(static_cast<long long>(s) - static_cast<long long>(s_src));
            out.x_plus[s] -= weight * (blocks.pp[k] - blocks.pm[k]);
            out.x_minus[s] -= weight * (blocks.mp[k] - blocks.mm[k]);
        }
    };
    if (source.is_kicks()) {
        for (const auto& kick : source.kicks()) {
            if (kick.j0 == 0.0) continue;
            const double u = (kick.t0 - grid.t_start()) / dt;
            const double idx = std::round(u);
            if (std::abs(u - idx) > 1e-9 || idx < 0.0 || idx > static_cast<double>(n - 1)) {
                throw Error(ErrorCode::GridMismatch, "kick time must fall on the time grid");
            }
            add(static_cast<std::size_t>(idx), kick.j0);
        }
        return out;
    }
    for (std::size_t s = 0; s < n; ++s) {
        const double w = (s == 0 || s + 1 == n) ? 0.5 : 1.0;
        const double j = source.sampled_value(grid[s]);
        if (j != 0.0) add(s, w * dt * j);
    }
    return out;
}

inline Doublet physical_response(const CtpBlock& block, const SourceProfile& source, const TimeGrid& grid) {
    return physical_response(block.raw(), source, grid);
}

// --- kernel -------------------------------------------------------------------------

struct CtpKernel {
    ComplexSeries k_n;
    ComplexSeries k_f;
    ComplexSeries k_bar;
    double kbar_mismatch; // max |Kbar1 - Kbar2| found during inversion

    std::vector<cplx> retarded() const {
        std::vector<cplx> r(k_n.size());
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = k_n[k] + k_f[k];
        return r;
    }
    std::vector<cplx> advanced() const {
        std::vector<cplx> r(k_n.size());
        for (std::size_t k = 0; k < r.size(); ++k) r[k] = k_n[k] - k_f[k];
        return r;
    }
    RawBlocks raw() const {
        const cplx i(0.0, 1.0);
        const std::size_t n = k_n.size();
        RawBlocks b{k_n.grid, std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
        for (std::size_t k = 0; k < n; ++k) {
            b.pp[k] = k_n[k] + i * k_bar[k];
            b.pm[k] = k_f[k] - i * k_bar[k];
            b.mp[k] = -k_f[k] - i * k_bar[k];
            b.mm[k] = -k_n[k] + i * k_bar[k];
        }
        return b;
    }
};

namespace detail {

inline void invert2(cplx a, cplx b, cplx c, cplx d, cplx& ia, cplx& ib, cplx& ic, cplx& id) {
    const cplx det = a * d - b * c;
    if (std::abs(det) == 0.0) throw Error(ErrorCode::DivisionNearZero, "singular 2x2 block");
    ia = d / det;
    ib = -b / det;
    ic = -c / det;
    id = a / det;
}

inline RawBlocks invert(const RawBlocks& in) {
    const std::size_t n = grid_size(in.grid);
    RawBlocks out{in.grid, std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t k = 0; k < n; ++k) invert2(in.pp[k], in.pm[k], in.mp[k], in.mm[k], out.pp[k], out.pm[k], out.mp[k], out.mm[k]);
    return out;
}

} // namespace detail

// K = D^{-1} node by node on a frequency grid.
inline CtpKernel invert_block(const CtpBlock& block) {
    require(std::holds_alternative<FrequencyGrid>(block.grid()), "kernel inversion works on a frequency grid");
    const auto k = detail::invert(block.raw());
    const std::size_t n = block.size();
    ComplexSeries kn(block.grid()), kf(block.grid()), kbar(block.grid());
    const cplx two_i(0.0, 2.0);
    double mismatch = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        kn[s] = 0.5 * (k.pp[s] - k.mm[s]);
        kf[s] = 0.5 * (k.pm[s] - k.mp[s]);
        const cplx bar1 = (k.pp[s] + k.mm[s]) / two_i;
        const cplx bar2 = -(k.pm[s] + k.mp[s]) / two_i;
        mismatch = std::max(mismatch, std::abs(bar1 - bar2));
        kbar[s] = 0.5 * (bar1 + bar2);
    }
    return {kn, kf, kbar, mismatch};
}

// D = K^{-1}, materialized as raw blocks.
inline RawBlocks invert_kernel(const CtpKernel& kernel) { return detail::invert(kernel.raw()); }

// max over the four entries of |a - b|.
inline double block_distance(const RawBlocks& a, const RawBlocks& b) {
    double r = 0.0;
    for (std::size_t k = 0; k < a.pp.size(); ++k) {
        r = std::max({r, std::abs(a.pp[k] - b.pp[k]), std::abs(a.pm[k] - b.pm[k]), std::abs(a.mp[k] - b.mp[k]),
                      std::abs(a.mm[k] - b.mm[k])});
    }
    return r;
}

// --- decoherence -----------------------------------------------------------------------

// Discretized quadratic form: Q_ij = Kbar(t_i - t_j) dt^2, from Kbar(omega) samples
// on a frequency grid whose conjugate step equals the time step.
inline Eigen::MatrixXd kbar_matrix(const CtpKernel& kernel, const TimeGrid& grid) {
    const auto* fg = std::get_if<FrequencyGrid>(&kernel.k_bar.grid);
    require(fg != nullptr, "Kbar must be sampled on a frequency grid");
    const double dt = grid.dt();
    if (std::abs(fg->conjugate_dt() - dt) > 1e-12 * dt) {
        throw Error(ErrorCode::GridMismatch, "time step must equal pi/omega_max of the kernel grid");
    }
    require(grid.size() <= fg->size() / 2, "time window exceeds half the kernel lattice");
    const auto lattice = fourier::to_time_lattice(*fg, kernel.k_bar.values);
    const std::size_t n = grid.size();
    const auto period = static_cast<long long>(lattice.size());
    Eigen::MatrixXd q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const long long d = static_cast<long long>(i) - static_cast<long long>(j);
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                lattice[static_cast<std::size_t>(((d % period) + period) % period)].real() * dt * dt;
        }
    }
    return 0.5 * (q + q.transpose());
}

// Classical default m eps delta(t - t'): Q = m eps dt I.
inline Eigen::MatrixXd classical_kbar_matrix(const SystemSpec& system, double epsilon, const TimeGrid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    return Eigen::MatrixXd::Identity(n, n) * (system.mass * epsilon * grid.dt());
}

// exp(-y^T Q y / 2 hbar) for a symmetric positive semidefinite Q.
inline double decoherence_weight(const Eigen::MatrixXd& q, const std::vector<double>& y, double hbar) {
    require(hbar > 0.0, "hbar must be positive");
    require(q.rows() == q.cols() && static_cast<std::size_t>(q.rows()) == y.size(), "kernel and y sizes differ");
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw Error(ErrorCode::NotPSD, "kernel is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    const double lowest = es.eigenvalues().minCoeff();
    if (lowest < -1e-10) throw Error(ErrorCode::NotPSD, "kernel eigenvalue " + std::to_string(lowest) + " < -1e-10");
    const Eigen::Map<const Eigen::VectorXd> v(y.data(), static_cast<Eigen::Index>(y.size()));
    const double form = std::max(0.0, v.dot(q * v));
    return std::exp(-form / (2.0 * hbar));
}

} // namespace tarrow::ctp
