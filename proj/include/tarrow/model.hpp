// model.hpp — observed oscillator, its bath, external sources and stability.
//
// The system coordinate x (mass m, frequency omega0) couples linearly to bath
// oscillators y_n through g_n x y_n. All oscillators share the mass m.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tarrow/common.hpp"

namespace tarrow {

struct SystemSpec {
    double mass = 1.0;
    double omega0 = 1.0;

    void validate() const {
        require(std::isfinite(mass) && mass > 0.0, "system mass must be positive");
        require(std::isfinite(omega0) && omega0 > 0.0, "system omega0 must be positive");
    }
};

struct BathMode {
    double omega;
    double g;
};

struct DiscreteBath {
    std::vector<BathMode> modes;

    void validate() const {
        require(!modes.empty(), "discrete bath needs at least one mode");
        for (const auto& m : modes) {
            require(std::isfinite(m.omega) && m.omega > 0.0, "bath mode frequencies must be positive");
            require(std::isfinite(m.g), "bath couplings must be finite");
        }
    }

    DiscreteBath scaled(double s) const {
        DiscreteBath out = *this;
        for (auto& m : out.modes) m.g *= s;
        return out;
    }
};

struct OhmicBath {
    double g = 0.0;
    double omegaD = 1.0;

    void validate() const {
        require(std::isfinite(g), "ohmic coupling must be finite");
        require(std::isfinite(omegaD) && omegaD > 0.0, "ohmic cutoff omegaD must be positive");
    }
};

using BathSpec = std::variant<DiscreteBath, OhmicBath>;

// Instantaneous force j0*delta(t - t0).
struct DeltaKick {
    double t0 = 0.0;
    double j0 = 1.0;
};

struct KickTrain {
    std::vector<DeltaKick> kicks;
};

// Force sampled on a time grid, linearly interpolated in between and zero outside.
struct SampledSource {
    TimeGrid grid;
    std::vector<double> values;
};

struct SourceProfile {
    std::variant<DeltaKick, KickTrain, SampledSource> shape;

    static SourceProfile kick(double t0, double j0) { return {DeltaKick{t0, j0}}; }
    static SourceProfile none() { return {KickTrain{}}; }

    bool is_kicks() const { return !std::holds_alternative<SampledSource>(shape); }

    // Kick list for DeltaKick / KickTrain; empty for sampled sources.
    std::vector<DeltaKick> kicks() const {
        if (const auto* k = std::get_if<DeltaKick>(&shape)) return {*k};
        if (const auto* t = std::get_if<KickTrain>(&shape)) return t->kicks;
        return {};
    }

    // Force value of a sampled source at time t.
    double sampled_value(double t) const {
        const auto* s = std::get_if<SampledSource>(&shape);
        if (s == nullptr) return 0.0;
        const auto& g = s->grid;
        if (t < g.t_start() || t > g.t_end()) return 0.0;
        const double u = (t - g.t_start()) / g.dt();
        std::size_t k = static_cast<std::size_t>(std::floor(u));
        if (k + 1 >= g.size()) return s->values.back();
        const double w = u - static_cast<double>(k);
        return (1.0 - w) * s->values[k] + w * s->values[k + 1];
    }

    void validate(const std::optional<TimeGrid>& domain = std::nullopt) const {
        if (const auto* s = std::get_if<SampledSource>(&shape)) {
            require(s->values.size() == s->grid.size(), "sampled source length must match its grid");
            for (double v : s->values) require(std::isfinite(v), "sampled source values must be finite");
            return;
        }
        for (const auto& k : kicks()) {
            require(std::isfinite(k.t0) && std::isfinite(k.j0), "kick parameters must be finite");
            if (domain) {
                require(k.t0 >= domain->t_start() && k.t0 <= domain->t_end(),
                        "kick time lies outside the simulated interval");
            }
        }
    }
};

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;
    std::string condition;
};

// Discrete: stable iff sum_n g_n^2/(m w_n^2) < m w0^2.
inline StabilityReport stability_check(const SystemSpec& system, const DiscreteBath& bath) {
    system.validate();
    bath.validate();
    const double m = system.mass;
    double load = 0.0;
    for (const auto& mode : bath.modes) load += mode.g * mode.g / (m * mode.omega * mode.omega);
    const double margin = m * system.omega0 * system.omega0 - load;
    return {margin > 0.0, margin, "sum_n g_n^2/(m omega_n^2) < m omega0^2"};
}

// Ohmic: stable iff the static inverse propagator -m w0^2 - Sigma(0) keeps the
// free-oscillator sign. Sigma(0) = -pi g^2/(m omegaD^2) from the closed form.
inline StabilityReport stability_check(const SystemSpec& system, const OhmicBath& bath) {
    system.validate();
    bath.validate();
    const double m = system.mass;
    const double sigma0 = -kPi * bath.g * bath.g / (m * bath.omegaD * bath.omegaD);
    const double inverse_static = -m * system.omega0 * system.omega0 - sigma0;
    const double margin = -inverse_static;
    return {margin > 0.0, margin, "pi g^2/(m omegaD^2) < m omega0^2"};
}

inline StabilityReport stability_check(const SystemSpec& system, const BathSpec& bath) {
    return std::visit([&](const auto& b) { return stability_check(system, b); }, bath);
}

inline StabilityReport stability_check(const SystemSpec& system) {
    system.validate();
    return {true, system.mass * system.omega0 * system.omega0, "free oscillator"};
}

struct SpectralAtom {
    double omega;
    double weight;
};

// Discrete spectral density as atoms g_n^2/(2 m w_n) at Omega = w_n.
inline std::vector<SpectralAtom> spectral_density(const DiscreteBath& bath, double mass) {
    bath.validate();
    require(mass > 0.0, "mass must be positive");
    std::vector<SpectralAtom> atoms;
    atoms.reserve(bath.modes.size());
    for (const auto& mode : bath.modes) {
        atoms.push_back({mode.omega, mode.g * mode.g / (2.0 * mass * mode.omega)});
    }
    return atoms;
}

// Ohmic density Theta(Omega) g^2 Omega / (m OmegaD (OmegaD^2 + Omega^2)).
inline double spectral_density(const OhmicBath& bath, double mass, double omega) {
    if (!(omega > 0.0)) return 0.0;
    return bath.g * bath.g * omega / (mass * bath.omegaD * (bath.omegaD * bath.omegaD + omega * omega));
}

} // namespace tarrow
