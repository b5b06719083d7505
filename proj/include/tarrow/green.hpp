// green.hpp — effective system dynamics after eliminating the bath.
//
// Self-energies, retarded/advanced propagators, the near/far split, pole
// search and the Green-function response x(t) = -int dt' D(t - t') j(t').
// Frequencies enter analytic functions as z = omega + i*eps.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/fourier.hpp"
#include "tarrow/model.hpp"
#include "tarrow/oracle.hpp"
#include "tarrow/quadrature.hpp"
#include "tarrow/roots.hpp"

namespace tarrow::green {

enum class TimeArrow { Forward, Backward };

inline double default_epsilon(const SystemSpec& system) { return 1e-6 * system.omega0; }

// --- self-energies ---------------------------------------------------------

// sum_n (g_n^2/m) / ((omega + i eps)^2 - omega_n^2)
inline cplx self_energy_discrete(const DiscreteBath& bath, double mass, cplx omega, double epsilon) {
    const cplx z = omega + cplx(0.0, epsilon);
    cplx sum = 0.0;
    for (const auto& mode : bath.modes) {
        const cplx den = (z - mode.omega) * (z + mode.omega);
        if (den == cplx(0.0)) {
            throw Error(ErrorCode::PoleOnGrid, "self energy evaluated on the bath frequency " + std::to_string(mode.omega));
        }
        sum += mode.g * mode.g / mass / den;
    }
    return sum;
}

// -i pi g^2 / (m OmegaD (omega + i OmegaD))
inline cplx self_energy_ohmic(const OhmicBath& bath, double mass, cplx omega) {
    const cplx den = omega + cplx(0.0, bath.omegaD);
    if (den == cplx(0.0)) throw Error(ErrorCode::PoleOnGrid, "ohmic self energy evaluated at -i*omegaD");
    return cplx(0.0, -kPi) * bath.g * bath.g / (mass * bath.omegaD * den);
}

// Direct evaluation of int_0^inf dW rho(W) 2W/((omega+i eps)^2 - W^2) for the
// Ohmic density. The near-singular factors 1/(W -+ z) are subtracted at the
// complex pole; the error estimate is absolute.
inline quad::Result self_energy_ohmic_quadrature(const OhmicBath& bath, double mass, double omega, double epsilon) {
    require(epsilon > 0.0, "quadrature oracle needs eps > 0");
    bath.validate();
    if (bath.g == 0.0) return {};
    const double wd = bath.omegaD;
    const double pref = bath.g * bath.g / (mass * wd);
    auto rho = [&](cplx w) { return pref * w / (wd * wd + w * w); };
    const cplx z(omega, epsilon);
    const double cut = 4.0 * (std::abs(omega) + wd);
    const std::vector<double> breaks{0.5 * wd, wd, 2.0 * wd};

    // 2W/(z^2 - W^2) = -[1/(W - z) + 1/(W + z)]
    const quad::Result near = quad::pole_subtracted(rho, z, 0.0, cut, breaks);
    const quad::Result mirror = quad::pole_subtracted(rho, -z, 0.0, cut, breaks);
    auto tail_integrand = [&](double w) { return rho(cplx(w, 0.0)) * 2.0 * w / (z * z - w * w); };
    const quad::Result tail = quad::integrate(tail_integrand, cut, std::numeric_limits<double>::infinity());

    quad::Result out;
    out.value = -(near.value + mirror.value) + tail.value;
    out.error = near.error + mirror.error + tail.error;
    quad::check(out, 1e-12, "ohmic self-energy quadrature");
    return out;
}

// Self-energy as an analytic function of z = omega + i eps, with the
// z-plane poles it carries (used to regularise the argument principle).
struct SelfEnergy {
    std::function<cplx(cplx)> value;
    std::function<cplx(cplx)> derivative;
    std::vector<cplx> poles;
    std::string label;

    static SelfEnergy none() {
        return {[](cplx) { return cplx(0.0); }, [](cplx) { return cplx(0.0); }, {}, "free"};
    }

    static SelfEnergy discrete(const DiscreteBath& bath, double mass) {
        bath.validate();
        SelfEnergy s;
        s.value = [bath, mass](cplx z) { return self_energy_discrete(bath, mass, z, 0.0); };
        s.derivative = [bath, mass](cplx z) {
            cplx d = 0.0;
            for (const auto& mode : bath.modes) {
                const cplx den = (z - mode.omega) * (z + mode.omega);
                d -= 2.0 * z * mode.g * mode.g / mass / (den * den);
            }
            return d;
        };
        for (const auto& mode : bath.modes) {
            s.poles.emplace_back(mode.omega, 0.0);
            s.poles.emplace_back(-mode.omega, 0.0);
        }
        s.label = "discrete";
        return s;
    }

    static SelfEnergy ohmic(const OhmicBath& bath, double mass) {
        bath.validate();
        SelfEnergy s;
        s.value = [bath, mass](cplx z) { return self_energy_ohmic(bath, mass, z); };
        s.derivative = [bath, mass](cplx z) {
            const cplx den = z + cplx(0.0, bath.omegaD);
            return cplx(0.0, kPi) * bath.g * bath.g / (mass * bath.omegaD * den * den);
        };
        s.poles.emplace_back(0.0, -bath.omegaD);
        s.label = "ohmic";
        return s;
    }

    static SelfEnergy from(const std::optional<BathSpec>& bath, double mass) {
        if (!bath) return none();
        if (const auto* d = std::get_if<DiscreteBath>(&*bath)) return discrete(*d, mass);
        return ohmic(std::get<OhmicBath>(*bath), mass);
    }
};

// --- propagators -----------------------------------------------------------

struct Pole {
    cplx pole;
    cplx residue;
};

class GreenFunction {
public:
    GreenFunction(SystemSpec system, SelfEnergy sigma, double epsilon, TimeArrow arrow)
        : system_(system), sigma_(std::move(sigma)), epsilon_(std::abs(epsilon)), arrow_(arrow) {
        system_.validate();
        require(epsilon_ > 0.0, "epsilon must be nonzero");
    }

    const SystemSpec& system() const noexcept { return system_; }
    const SelfEnergy& self_energy() const noexcept { return sigma_; }
    TimeArrow time_arrow() const noexcept { return arrow_; }
    // Signed: +|eps| for the forward arrow, -|eps| for the backward one.
    double epsilon() const noexcept { return arrow_ == TimeArrow::Forward ? epsilon_ : -epsilon_; }
    double epsilon_magnitude() const noexcept { return epsilon_; }

    // Retarded inverse m[(w + i eps)^2 - w0^2] - Sigma(w + i eps) at complex w.
    cplx retarded_inverse(cplx omega) const {
        const cplx z = omega + cplx(0.0, epsilon_);
        return system_.mass * ((z - system_.omega0) * (z + system_.omega0)) - sigma_.value(z);
    }
    cplx retarded_inverse_derivative(cplx omega) const {
        const cplx z = omega + cplx(0.0, epsilon_);
        return 2.0 * system_.mass * z - sigma_.derivative(z);
    }

    // Inverse propagator for this arrow; the advanced one is the Schwarz
    // reflection of the retarded one, conj(D^{r-1}(conj w)).
    cplx inverse(cplx omega) const {
        if (arrow_ == TimeArrow::Forward) return retarded_inverse(omega);
        return std::conj(retarded_inverse(std::conj(omega)));
    }
    cplx inverse_derivative(cplx omega) const {
        if (arrow_ == TimeArrow::Forward) return retarded_inverse_derivative(omega);
        return std::conj(retarded_inverse_derivative(std::conj(omega)));
    }
    cplx operator()(cplx omega) const { return 1.0 / inverse(omega); }

    std::optional<ComplexSeries> d_r;
    std::vector<Pole> poles;

private:
    SystemSpec system_;
    SelfEnergy sigma_;
    double epsilon_;
    TimeArrow arrow_;
};

inline GreenFunction retarded_propagator(const SystemSpec& system, const SelfEnergy& sigma, const FrequencyGrid& grid,
                                         double epsilon, TimeArrow arrow = TimeArrow::Forward) {
    require(epsilon > 0.0, "retarded_propagator needs eps > 0; the arrow selects the sign");
    GreenFunction gf(system, sigma, epsilon, arrow);
    ComplexSeries samples(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const cplx inv = gf.inverse(cplx(grid[k], 0.0));
        if (std::abs(inv) < 1e-14) {
            throw Error(ErrorCode::PoleOnGrid, "propagator denominator vanishes at omega = " + std::to_string(grid[k]));
        }
        samples[k] = 1.0 / inv;
    }
    gf.d_r = std::move(samples);
    return gf;
}

// Time-even (real part) and time-odd (i * imaginary part) pieces of D on the real axis.
inline std::pair<ComplexSeries, ComplexSeries> near_far_split(const GreenFunction& gf) {
    require(gf.d_r.has_value(), "near_far_split needs a sampled propagator");
    const ComplexSeries& dr = *gf.d_r;
    ComplexSeries dn(dr.grid);
    ComplexSeries df(dr.grid);
    for (std::size_t k = 0; k < dr.size(); ++k) {
        dn[k] = cplx(dr[k].real(), 0.0);
        df[k] = cplx(0.0, dr[k].imag());
    }
    return {dn, df};
}

// max_k |d(-w_k) - conj d(w_k)|
inline double conjugation_residual(const ComplexSeries& series) {
    const auto& grid = std::get<FrequencyGrid>(series.grid);
    double worst = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        worst = std::max(worst, std::abs(series[grid.mirror(k)] - std::conj(series[k])));
    }
    return worst;
}

// --- time-domain kernel ------------------------------------------------------

struct KernelOptions {
    double omega_max = 200.0;
    std::size_t n_samples = std::size_t{1} << 18;
};

// Retarded kernel D^r(t) evaluated by a shifted-contour transform:
//   D(w) - D0(w) is sampled on Im w = gamma and transformed with an FFT, then
//   multiplied by e^{gamma t}; D0 = 1/(m[(w + i eps)^2 - w0^2]) has the closed
//   form -theta(t) e^{-eps t} sin(w0 t)/(m w0) and carries the slow 1/w^2 tail.
// Valid for |t| up to a third of the lattice period.
class RetardedKernel {
public:
    RetardedKernel(const GreenFunction& gf, const KernelOptions& opt = {})
        : grid_(opt.omega_max, opt.n_samples), mass_(gf.system().mass), omega0_(gf.system().omega0),
          epsilon_(gf.epsilon_magnitude()), arrow_(gf.time_arrow()) {
        const double period = static_cast<double>(grid_.size()) * grid_.conjugate_dt();
        gamma_ = 36.0 / period;
        valid_ = period / 3.0;
        std::vector<cplx> remainder(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            const cplx w(grid_[k], gamma_);
            const cplx z = w + cplx(0.0, epsilon_);
            const cplx free_inv = mass_ * ((z - omega0_) * (z + omega0_));
            remainder[k] = 1.0 / gf.retarded_inverse(w) - 1.0 / free_inv;
        }
        const auto lattice = fourier::to_time_lattice(grid_, remainder);
        damped_.resize(lattice.size());
        for (std::size_t j = 0; j < lattice.size(); ++j) damped_[j] = lattice[j].real();
    }

    // D(t) for this kernel's arrow: D^r(t), or D^a(t) = D^r(-t).
    double operator()(double t) const { return arrow_ == TimeArrow::Forward ? retarded(t) : retarded(-t); }

    double retarded(double t) const {
        if (std::abs(t) > valid_) {
            throw Error(ErrorCode::GridMismatch, "kernel requested at |t| = " + std::to_string(std::abs(t)) +
                                                     " beyond the frequency grid's valid range " + std::to_string(valid_));
        }
        const double dt = grid_.conjugate_dt();
        const double smooth = fourier::interpolate_periodic(damped_, dt, t) * std::exp(gamma_ * t);
        if (t <= 0.0) return smooth;
        return smooth - std::exp(-epsilon_ * t) * std::sin(omega0_ * t) / (mass_ * omega0_);
    }

    const FrequencyGrid& grid() const noexcept { return grid_; }
    double valid_range() const noexcept { return valid_; }
    double nyquist_dt() const noexcept { return grid_.conjugate_dt(); }

private:
    FrequencyGrid grid_;
    double mass_;
    double omega0_;
    double epsilon_;
    TimeArrow arrow_;
    double gamma_ = 0.0;
    double valid_ = 0.0;
    std::vector<double> damped_;
};

// Near (time-even) and far (time-odd) kernels on a symmetric lag grid.
struct NearFarKernels {
    ComplexSeries d_n;
    ComplexSeries d_f;
};

inline NearFarKernels near_far_kernels(const RetardedKernel& kernel, const LagGrid& lags) {
    ComplexSeries dn(lags);
    ComplexSeries df(lags);
    for (std::size_t k = 0; k < lags.size(); ++k) {
        const double tau = lags[k];
        const double fwd = kernel.retarded(tau);
        const double bwd = kernel.retarded(-tau);
        dn[k] = 0.5 * (fwd + bwd);
        df[k] = 0.5 * (fwd - bwd);
    }
    return {dn, df};
}

// --- response ---------------------------------------------------------------

inline oracle::Trajectory response(const GreenFunction& gf, const SourceProfile& source, const TimeGrid& grid,
                                   const KernelOptions& opt = {}) {
    source.validate();
    const double nyquist = kPi / opt.omega_max;
    if (grid.dt() < nyquist * (1.0 - 1e-12)) {
        throw Error(ErrorCode::GridMismatch, "time step " + std::to_string(grid.dt()) +
                                                 " is finer than the frequency grid's Nyquist step " +
                                                 std::to_string(nyquist));
    }
    const RetardedKernel kernel(gf, opt);
    oracle::Trajectory out{grid, std::vector<double>(grid.size(), 0.0), std::nullopt};

    if (source.is_kicks()) {
        for (const auto& kick : source.kicks()) {
            if (kick.j0 == 0.0) continue;
            for (std::size_t s = 0; s < grid.size(); ++s) out.x[s] -= kick.j0 * kernel(grid[s] - kick.t0);
        }
        return out;
    }

    // Sampled source: trapezoid convolution on the output grid via FFT.
    const std::size_t n = grid.size();
    const double dt = grid.dt();
    std::vector<cplx> j(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double w = (s == 0 || s + 1 == n) ? 0.5 : 1.0;
        j[s] = w * dt * source.sampled_value(grid[s]);
    }
    std::vector<cplx> k(2 * n - 1);
    for (std::size_t m = 0; m < 2 * n - 1; ++m) {
        const double lag = (static_cast<double>(m) - static_cast<double>(n - 1)) * dt;
        k[m] = kernel(lag);
    }
    const auto conv = fourier::convolve(k, j);
    for (std::size_t s = 0; s < n; ++s) out.x[s] = -conv[s + n - 1].real();
    return out;
}

// --- poles -----------------------------------------------------------------

// Zeros of D^{-1}(omega) inside `box` with residues 1/(dD^{-1}/domega).
inline std::vector<Pole> find_poles(const GreenFunction& gf, const roots::Box& box, const roots::Options& opt = {}) {
    const double eps = gf.epsilon();
    roots::Fn f = [&gf](cplx w) { return gf.inverse(w); };
    roots::Fn df = [&gf](cplx w) { return gf.inverse_derivative(w); };
    // D^{-1} times (z - p) for each self-energy pole p, z = omega + i eps.
    const auto& sigma_poles = gf.self_energy().poles;
    const bool forward = gf.time_arrow() == TimeArrow::Forward;
    roots::Fn g = [&](cplx w) {
        cplx v = gf.inverse(w);
        for (const cplx& p : sigma_poles) {
            const cplx pole_w = forward ? p - cplx(0.0, eps) : std::conj(p) - cplx(0.0, eps);
            v *= (w - pole_w);
        }
        return v;
    };
    const auto search = roots::find_zeros(f, df, g, box, opt);
    std::vector<Pole> out;
    for (const cplx& z : search.zeros) out.push_back({z, 1.0 / gf.inverse_derivative(z)});
    std::sort(out.begin(), out.end(), [](const Pole& a, const Pole& b) {
        return a.pole.real() < b.pole.real() || (a.pole.real() == b.pole.real() && a.pole.imag() < b.pole.imag());
    });
    return out;
}

// Default search rectangle: real part covers every bath and system frequency,
// imaginary part stays clear of the Ohmic cutoff pole.
inline roots::Box default_search_box(const SystemSpec& system, const std::optional<BathSpec>& bath) {
    double reach = system.omega0;
    double depth = 0.5 * system.omega0;
    if (bath) {
        if (const auto* d = std::get_if<DiscreteBath>(&*bath)) {
            for (const auto& m : d->modes) reach = std::max(reach, m.omega);
        } else {
            depth = std::min(depth, 0.5 * std::get<OhmicBath>(*bath).omegaD);
        }
    }
    // Scaled so the stiffened system frequency stays inside.
    reach = 2.0 * reach + 1.0;
    return {-reach * 1.0137, reach * 0.9871, -depth * 1.0213, depth * 0.9787};
}

} // namespace tarrow::green
