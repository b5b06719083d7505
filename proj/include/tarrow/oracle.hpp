// oracle.hpp — time-domain ground truth for the coupled system + bath.
//
// Two exact routes: a velocity-Verlet integrator of the full Newton equations
// and the closed-form normal-mode superposition for kick sources. Bath modes
// start at rest, y_n(0) = dy_n/dt(0) = 0.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/model.hpp"

namespace tarrow::oracle {

struct Trajectory {
    TimeGrid grid;
    std::vector<double> x;
    std::optional<Eigen::MatrixXd> y; // n_modes x n_samples
};

// Eigenfrequencies (ascending) and orthogonal transform; column j of `transform`
// holds the physical components of normal mode j, x_n = sum_j a_{nj} xt_j.
struct NormalModes {
    std::vector<double> frequencies;
    Eigen::MatrixXd transform;
    double mass = 1.0;

    std::size_t size() const noexcept { return frequencies.size(); }

    // Normal modes whose transform has the prescribed row for coordinate `k`.
    // The rest of the orthogonal matrix is a Householder completion.
    static NormalModes with_observed_row(std::vector<double> freqs, const std::vector<double>& row,
                                         double mass, std::size_t k = 0) {
        const auto n = static_cast<Eigen::Index>(freqs.size());
        require(n >= 1 && row.size() == freqs.size(), "row and frequency list must match");
        require(static_cast<Eigen::Index>(k) < n, "observed index out of range");
        require(std::is_sorted(freqs.begin(), freqs.end()), "frequencies must be ascending");
        for (double w : freqs) require(w > 0.0, "normal-mode frequencies must be positive");
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(row.data(), n);
        require(std::abs(u.norm() - 1.0) < 1e-12, "observed row must be a unit vector");
        Eigen::VectorXd v = u;
        v(static_cast<Eigen::Index>(k)) -= 1.0;
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
        const double vv = v.squaredNorm();
        if (vv > 1e-300) h -= 2.0 * v * v.transpose() / vv;
        return {std::move(freqs), h, mass};
    }
};

inline Eigen::MatrixXd stiffness_matrix(const SystemSpec& system, const DiscreteBath& bath) {
    const auto n = static_cast<Eigen::Index>(bath.modes.size());
    const double m = system.mass;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + 1, n + 1);
    k(0, 0) = m * system.omega0 * system.omega0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& mode = bath.modes[static_cast<std::size_t>(i)];
        k(i + 1, i + 1) = m * mode.omega * mode.omega;
        k(0, i + 1) = -mode.g;
        k(i + 1, 0) = -mode.g;
    }
    return k;
}

inline NormalModes diagonalize(const SystemSpec& system, const DiscreteBath& bath) {
    system.validate();
    bath.validate();
    const Eigen::MatrixXd k = stiffness_matrix(system, bath);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k / system.mass);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NotPositiveDefinite, "eigensolver failed");
    const Eigen::VectorXd w2 = es.eigenvalues();
    if (w2.minCoeff() <= 0.0) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "stiffness matrix has a non-positive eigenvalue; sum_n g_n^2/(m omega_n^2) < m omega0^2 violated");
    }
    NormalModes out;
    out.mass = system.mass;
    out.transform = es.eigenvectors();
    out.frequencies.resize(static_cast<std::size_t>(w2.size()));
    for (Eigen::Index j = 0; j < w2.size(); ++j) out.frequencies[static_cast<std::size_t>(j)] = std::sqrt(w2(j));
    return out;
}

// Rebuilds a system + star bath whose coordinate 0 is the observed coordinate
// `k` of the given normal modes. Bath coordinates are rotated so that the bath
// block of the stiffness matrix is diagonal.
inline std::pair<SystemSpec, DiscreteBath> star_from_modes(const NormalModes& modes, std::size_t k = 0) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    require(n >= 2, "need at least two normal modes to form a system and a bath");
    const double m = modes.mass;
    Eigen::VectorXd w2(n);
    for (Eigen::Index j = 0; j < n; ++j) w2(j) = modes.frequencies[static_cast<std::size_t>(j)] * modes.frequencies[static_cast<std::size_t>(j)];
    Eigen::MatrixXd kmat = modes.transform * (m * w2).asDiagonal() * modes.transform.transpose();

    std::vector<Eigen::Index> order;
    order.push_back(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < n; ++i) if (i != static_cast<Eigen::Index>(k)) order.push_back(i);
    Eigen::MatrixXd perm(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) perm(a, b) = kmat(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);

    const Eigen::MatrixXd bath_block = perm.bottomRightCorner(n - 1, n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bath_block);
    const Eigen::VectorXd coupling = es.eigenvectors().transpose() * perm.block(1, 0, n - 1, 1);

    SystemSpec system{m, std::sqrt(perm(0, 0) / m)};
    DiscreteBath bath;
    for (Eigen::Index i = 0; i < n - 1; ++i) {
        require(es.eigenvalues()(i) > 0.0, "bath block is not positive definite");
        bath.modes.push_back({std::sqrt(es.eigenvalues()(i) / m), -coupling(i)});
    }
    return {system, bath};
}

struct PhaseState {
    double x = 0.0;
    double vx = 0.0;
    std::vector<double> y;
    std::vector<double> vy;

    static PhaseState at_rest(std::size_t n_modes) {
        return {0.0, 0.0, std::vector<double>(n_modes, 0.0), std::vector<double>(n_modes, 0.0)};
    }
};

inline double total_energy(const SystemSpec& system, const DiscreteBath& bath, const PhaseState& s) {
    const double m = system.mass;
    double e = 0.5 * m * s.vx * s.vx + 0.5 * m * system.omega0 * system.omega0 * s.x * s.x;
    for (std::size_t n = 0; n < bath.modes.size(); ++n) {
        const auto& mode = bath.modes[n];
        e += 0.5 * m * s.vy[n] * s.vy[n] + 0.5 * m * mode.omega * mode.omega * s.y[n] * s.y[n];
        e -= mode.g * s.x * s.y[n];
    }
    return e;
}

namespace detail {

inline void accelerations(const SystemSpec& system, const DiscreteBath& bath, const PhaseState& s,
                          double force, double& ax, std::vector<double>& ay) {
    const double m = system.mass;
    double fx = -m * system.omega0 * system.omega0 * s.x + force;
    for (std::size_t n = 0; n < bath.modes.size(); ++n) {
        const auto& mode = bath.modes[n];
        fx += mode.g * s.y[n];
        ay[n] = (-m * mode.omega * mode.omega * s.y[n] + mode.g * s.x) / m;
    }
    ax = fx / m;
}

inline double max_normal_frequency(const SystemSpec& system, const DiscreteBath& bath) {
    const Eigen::MatrixXd k = stiffness_matrix(system, bath);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k / system.mass, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace detail

// Advances `state` by n_steps velocity-Verlet steps of size h starting at t_start.
// `force(t)` is the smooth external force; kicks are handled by the caller.
template <class Force>
void verlet_steps(const SystemSpec& system, const DiscreteBath& bath, PhaseState& state, double t_start,
                  double h, std::size_t n_steps, Force&& force) {
    const std::size_t nb = bath.modes.size();
    std::vector<double> ay(nb);
    double ax = 0.0;
    detail::accelerations(system, bath, state, force(t_start), ax, ay);
    for (std::size_t s = 0; s < n_steps; ++s) {
        const double t_next = t_start + static_cast<double>(s + 1) * h;
        state.vx += 0.5 * h * ax;
        state.x += h * state.vx;
        for (std::size_t n = 0; n < nb; ++n) {
            state.vy[n] += 0.5 * h * ay[n];
            state.y[n] += h * state.vy[n];
        }
        detail::accelerations(system, bath, state, force(t_next), ax, ay);
        state.vx += 0.5 * h * ax;
        for (std::size_t n = 0; n < nb; ++n) state.vy[n] += 0.5 * h * ay[n];
    }
}

struct EvolveOptions {
    std::size_t substeps = 1;      // integrator steps per output sample
    double x0 = 0.0;               // system initial data override
    double v0 = 0.0;
    bool record_bath = false;
};

inline Trajectory evolve_full(const SystemSpec& system, const DiscreteBath& bath, const SourceProfile& source,
                              const TimeGrid& grid, const EvolveOptions& opts = {}) {
    system.validate();
    bath.validate();
    require(grid.t_start() == 0.0, "evolve_full expects the grid to start at t = 0");
    require(opts.substeps >= 1, "substeps must be >= 1");
    source.validate(grid);

    const double h = grid.dt() / static_cast<double>(opts.substeps);
    const double w_max = detail::max_normal_frequency(system, bath);
    if (h * w_max > 0.1) {
        throw Error(ErrorCode::StepTooLarge, "dt*max(normal frequency) = " + std::to_string(h * w_max) + " > 0.1");
    }

    const std::size_t nb = bath.modes.size();
    const std::size_t total_steps = (grid.size() - 1) * opts.substeps;

    // Kick momentum per internal step index.
    std::vector<std::pair<std::size_t, double>> kicks;
    for (const auto& k : source.kicks()) {
        const auto idx = static_cast<std::size_t>(std::llround(k.t0 / h));
        kicks.emplace_back(std::min(idx, total_steps), k.j0 / system.mass);
    }
    std::sort(kicks.begin(), kicks.end());

    const bool sampled = !source.is_kicks();
    auto force = [&](double t) { return sampled ? source.sampled_value(t) : 0.0; };

    PhaseState state = PhaseState::at_rest(nb);
    state.x = opts.x0;
    state.vx = opts.v0;

    Trajectory out{grid, std::vector<double>(grid.size(), 0.0), std::nullopt};
    if (opts.record_bath) out.y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(grid.size()));

    auto next_kick = kicks.begin();
    auto apply_kicks = [&](std::size_t step) {
        while (next_kick != kicks.end() && next_kick->first == step) {
            state.vx += next_kick->second;
            ++next_kick;
        }
    };
    auto record = [&](std::size_t sample) {
        out.x[sample] = state.x;
        if (out.y) for (std::size_t n = 0; n < nb; ++n) (*out.y)(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sample)) = state.y[n];
    };

    apply_kicks(0);
    record(0);
    std::size_t step = 0;
    for (std::size_t sample = 1; sample < grid.size(); ++sample) {
        for (std::size_t s = 0; s < opts.substeps; ++s) {
            verlet_steps(system, bath, state, static_cast<double>(step) * h, h, 1, force);
            ++step;
            apply_kicks(step);
        }
        record(sample);
    }
    return out;
}

// Exact normal-mode response of coordinate `observed` to kicks on that coordinate.
inline Trajectory respond_via_modes(const NormalModes& modes, const SourceProfile& source, const TimeGrid& grid,
                                    std::size_t observed = 0, bool record_all = false) {
    if (!source.is_kicks()) {
        throw Error(ErrorCode::UnsupportedSource, "respond_via_modes handles kick sources only; use evolve_full");
    }
    const auto n = static_cast<Eigen::Index>(modes.size());
    const auto k = static_cast<Eigen::Index>(observed);
    require(k < n, "observed index out of range");
    const double m = modes.mass;
    const auto& a = modes.transform;

    Trajectory out{grid, std::vector<double>(grid.size(), 0.0), std::nullopt};
    if (record_all) out.y = Eigen::MatrixXd::Zero(n - 1, static_cast<Eigen::Index>(grid.size()));

    Eigen::VectorXd normal(n);
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const double t = grid[s];
        normal.setZero();
        for (const auto& kick : source.kicks()) {
            const double tau = t - kick.t0;
            if (tau <= 0.0) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double w = modes.frequencies[static_cast<std::size_t>(j)];
                normal(j) += a(k, j) * kick.j0 / (m * w) * std::sin(w * tau);
            }
        }
        out.x[s] = a.row(k).dot(normal);
        if (out.y) {
            Eigen::Index row = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (i == k) continue;
                (*out.y)(row++, static_cast<Eigen::Index>(s)) = a.row(i).dot(normal);
            }
        }
    }
    return out;
}

// Evolve `initial` for n_steps, reverse every velocity, evolve n_steps again and
// reverse once more; returns the max deviation from `initial` over all coordinates
// and velocities. Unforced.
inline double velocity_flip_round_trip(const SystemSpec& system, const DiscreteBath& bath, const PhaseState& initial,
                                       double h, std::size_t n_steps) {
    system.validate();
    bath.validate();
    require(h > 0.0 && n_steps >= 1, "round trip needs h > 0 and at least one step");
    if (h * detail::max_normal_frequency(system, bath) > 0.1) {
        throw Error(ErrorCode::StepTooLarge, "h*max(normal frequency) > 0.1");
    }
    auto flip = [](PhaseState& s) {
        s.vx = -s.vx;
        for (double& v : s.vy) v = -v;
    };
    auto no_force = [](double) { return 0.0; };
    PhaseState s = initial;
    verlet_steps(system, bath, s, 0.0, h, n_steps, no_force);
    flip(s);
    verlet_steps(system, bath, s, 0.0, h, n_steps, no_force);
    flip(s);
    double dev = std::max(std::abs(s.x - initial.x), std::abs(s.vx - initial.vx));
    for (std::size_t n = 0; n < s.y.size(); ++n) {
        dev = std::max({dev, std::abs(s.y[n] - initial.y[n]), std::abs(s.vy[n] - initial.vy[n])});
    }
    return dev;
}

} // namespace tarrow::oracle
