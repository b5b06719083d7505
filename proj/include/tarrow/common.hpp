// common.hpp — shared value types: grids, series, errors.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tarrow {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
    InvalidArgument,
    NotPositiveDefinite,
    StepTooLarge,
    UnsupportedSource,
    PoleOnGrid,
    QuadratureFailure,
    RootCountMismatch,
    GridMismatch,
    DivisionNearZero,
    GridNotFoldable,
    ParityViolation,
    InconsistentBlock,
    NotPSD,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::UnsupportedSource: return "UnsupportedSource";
    case ErrorCode::PoleOnGrid: return "PoleOnGrid";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::DivisionNearZero: return "DivisionNearZero";
    case ErrorCode::GridNotFoldable: return "GridNotFoldable";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::InconsistentBlock: return "InconsistentBlock";
    case ErrorCode::NotPSD: return "NotPSD";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

// Uniform time sampling t_k = t_start + k*dt, k = 0..n_samples-1.
class TimeGrid {
public:
    TimeGrid(double t_start, double t_end, std::size_t n_samples)
        : t_start_(t_start), t_end_(t_end), n_(n_samples) {
        require(std::isfinite(t_start) && std::isfinite(t_end) && t_end > t_start,
                "TimeGrid requires t_end > t_start");
        require(n_samples >= 2, "TimeGrid requires n_samples >= 2");
    }

    // Grid starting at t_start with the given spacing and sample count.
    static TimeGrid with_spacing(double t_start, double dt, std::size_t n_samples) {
        require(dt > 0.0 && n_samples >= 2, "TimeGrid spacing must be positive");
        return TimeGrid(t_start, t_start + dt * static_cast<double>(n_samples - 1), n_samples);
    }

    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t size() const noexcept { return n_; }
    double dt() const noexcept { return (t_end_ - t_start_) / static_cast<double>(n_ - 1); }
    double operator[](std::size_t k) const noexcept {
        return k + 1 == n_ ? t_end_ : t_start_ + static_cast<double>(k) * dt();
    }

    std::vector<double> points() const {
        std::vector<double> out(n_);
        for (std::size_t k = 0; k < n_; ++k) out[k] = (*this)[k];
        return out;
    }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_start_;
    double t_end_;
    std::size_t n_;
};

// Symmetric uniform grid omega_k = -omega_max + k*d_omega, k = 0..n-1, so the
// grid covers [-omega_max, omega_max) and omega = 0 sits at k = n/2.
class FrequencyGrid {
public:
    FrequencyGrid(double omega_max, std::size_t n_samples) : omega_max_(omega_max), n_(n_samples) {
        require(omega_max > 0.0 && std::isfinite(omega_max), "FrequencyGrid requires omega_max > 0");
        require(n_samples >= 2 && n_samples % 2 == 0, "FrequencyGrid requires an even sample count");
    }

    double omega_max() const noexcept { return omega_max_; }
    std::size_t size() const noexcept { return n_; }
    double d_omega() const noexcept { return 2.0 * omega_max_ / static_cast<double>(n_); }
    double operator[](std::size_t k) const noexcept {
        return -omega_max_ + static_cast<double>(k) * d_omega();
    }
    // Index of -omega_k; k = 0 has no mirror on the half-open grid.
    std::size_t mirror(std::size_t k) const noexcept { return n_ - k; }
    // Time spacing of the conjugate FFT lattice.
    double conjugate_dt() const noexcept { return kPi / omega_max_; }

    bool operator==(const FrequencyGrid&) const = default;

private:
    double omega_max_;
    std::size_t n_;
};

// Symmetric lag lattice tau_k = (k - half)*dt, k = 0..2*half, centred on tau = 0.
class LagGrid {
public:
    LagGrid(double dt, std::size_t half) : dt_(dt), half_(half) {
        require(dt > 0.0 && std::isfinite(dt), "LagGrid requires dt > 0");
        require(half >= 1, "LagGrid requires at least one positive lag");
    }

    double dt() const noexcept { return dt_; }
    std::size_t half() const noexcept { return half_; }
    std::size_t size() const noexcept { return 2 * half_ + 1; }
    std::size_t zero_index() const noexcept { return half_; }
    double operator[](std::size_t k) const noexcept {
        return (static_cast<double>(k) - static_cast<double>(half_)) * dt_;
    }
    std::size_t mirror(std::size_t k) const noexcept { return 2 * half_ - k; }

    bool operator==(const LagGrid&) const = default;

private:
    double dt_;
    std::size_t half_;
};

using AnyGrid = std::variant<FrequencyGrid, TimeGrid, LagGrid>;

inline std::size_t grid_size(const AnyGrid& g) {
    return std::visit([](const auto& x) { return x.size(); }, g);
}

struct ComplexSeries {
    AnyGrid grid;
    std::vector<cplx> values;

    ComplexSeries(AnyGrid g, std::vector<cplx> v) : grid(std::move(g)), values(std::move(v)) {
        require(values.size() == grid_size(grid), "ComplexSeries length must match its grid");
    }
    explicit ComplexSeries(AnyGrid g) : grid(std::move(g)), values(grid_size(grid)) {}

    std::size_t size() const noexcept { return values.size(); }
    cplx& operator[](std::size_t k) { return values[k]; }
    const cplx& operator[](std::size_t k) const { return values[k]; }
};

inline bool same_grid(const ComplexSeries& a, const ComplexSeries& b) {
    return a.grid == b.grid;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace tarrow
