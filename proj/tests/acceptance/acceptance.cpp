// acceptance.cpp — acceptance criteria 1-8, one PASS/FAIL line each.
//
// Usage: acceptance [--known-red=N[,M...]] [--only=N]
// Exit status is nonzero when a criterion fails that is not listed as known red.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tarrow/ctp.hpp"
#include "tarrow/green.hpp"
#include "tarrow/model.hpp"
#include "tarrow/oracle.hpp"
#include "tarrow/window.hpp"

namespace {

using namespace tarrow;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

DiscreteBath random_stable_bath(std::mt19937_64& rng, std::size_t n_modes, double mass, double omega0) {
    std::uniform_real_distribution<double> freq(0.3, 3.0);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    DiscreteBath bath;
    double load = 0.0;
    for (std::size_t n = 0; n < n_modes; ++n) {
        const double w = freq(rng);
        const double g = unit(rng);
        bath.modes.push_back({w, g});
        load += g * g / (mass * w * w);
    }
    // Rescale so that sum g^2/(m w^2) is a random fraction (<= 0.6) of m w0^2.
    const double target = 0.6 * unit(rng) * mass * omega0 * omega0;
    return bath.scaled(std::sqrt(target / load));
}

// --- 1 ------------------------------------------------------------------------------

Outcome criterion1() {
    const auto start = std::chrono::steady_clock::now();
    const auto modes = window::condensation_modes(20, 1.0);
    std::vector<std::size_t> counts;
    bool dominant = false;
    for (double T : {2000.0, 700.0, 100.0}) {
        const auto curve = window::gaussian_spectrum(modes, T);
        counts.push_back(window::curve_peaks(curve, 0.01).size());
        if (T == 100.0) dominant = window::single_dominant_feature(curve, 0.95, 1.3, 0.01);
    }
    const double elapsed = seconds_since(start);
    const bool decreasing = counts[0] > counts[1] && counts[1] > counts[2];
    return {decreasing && dominant && elapsed < 5.0,
            "peak counts " + std::to_string(counts[0]) + " > " + std::to_string(counts[1]) + " > " +
                std::to_string(counts[2]) + (decreasing ? "" : " (not decreasing)") +
                ", T=100 dominant feature in [0.95,1.3]: " + (dominant ? "yes" : "no") + ", " + fmt(elapsed) + " s"};
}

// --- 2 ------------------------------------------------------------------------------

Outcome criterion2() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240602);
    std::uniform_int_distribution<std::size_t> size(1, 8);
    const SystemSpec system{1.0, 1.0};
    const TimeGrid grid(0.0, 50.0, 2001);
    const auto kick = SourceProfile::kick(0.0, 1.0);
    const green::KernelOptions opt{200.0, std::size_t{1} << 18};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto bath = random_stable_bath(rng, size(rng), system.mass, system.omega0);
        const green::GreenFunction gf(system, green::SelfEnergy::discrete(bath, system.mass), 1e-6,
                                      green::TimeArrow::Forward);
        const auto x_green = green::response(gf, kick, grid, opt);
        oracle::EvolveOptions eo;
        eo.substeps = 100;
        const auto x_full = oracle::evolve_full(system, bath, kick, grid, eo);
        double diff = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) diff = std::max(diff, std::abs(x_green.x[i] - x_full.x[i]));
        worst = std::max(worst, diff / max_abs(x_full.x));
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-4 && elapsed < 60.0,
            "worst relative deviation " + fmt(worst) + " (limit 1e-4) over 20 baths, " + fmt(elapsed) + " s"};
}

// --- 3 ------------------------------------------------------------------------------

Outcome criterion3() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> omega(-5.0, 5.0);
    std::uniform_real_distribution<double> coupling(0.05, 2.0);
    std::uniform_real_distribution<double> cutoff(0.5, 50.0);
    const double eps = 1e-6;
    const double mass = 1.0;
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const OhmicBath bath{coupling(rng), cutoff(rng)};
        const double w = omega(rng);
        const cplx closed = green::self_energy_ohmic(bath, mass, cplx(w, eps));
        const cplx numeric = green::self_energy_ohmic_quadrature(bath, mass, w, eps).value;
        worst = std::max(worst, std::abs(closed - numeric) / std::abs(closed));
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-6 && elapsed < 10.0,
            "worst relative deviation " + fmt(worst) + " (limit 1e-6) over 100 draws, " + fmt(elapsed) + " s"};
}

// --- 4 ------------------------------------------------------------------------------

// Dominant (largest-residue) pole of the Ohmic model g=1, OmegaD=10, m=1, w0=1, eps=1e-6.
cplx ohmic_pole() {
    const SystemSpec system{1.0, 1.0};
    const std::optional<BathSpec> bath = OhmicBath{1.0, 10.0};
    const green::GreenFunction gf(system, green::SelfEnergy::from(bath, 1.0), 1e-6, green::TimeArrow::Forward);
    cplx pole = 0.0;
    double best = -1.0;
    for (const auto& p : green::find_poles(gf, green::default_search_box(system, bath))) {
        if (std::abs(p.residue) > best || (std::abs(p.residue) == best && p.pole.real() > 0.0)) {
            best = std::abs(p.residue);
            pole = p.pole;
        }
    }
    return pole;
}

Outcome criterion4() {
    const double eps = 1e-6;
    const SystemSpec system{1.0, 1.0};
    double free_worst = 0.0;
    std::size_t reversible_poles = 0;
    std::string half_planes;

    auto scan = [&](const std::optional<BathSpec>& bath) {
        const green::GreenFunction gf(system, green::SelfEnergy::from(bath, system.mass), eps,
                                      green::TimeArrow::Forward);
        const auto poles = green::find_poles(gf, green::default_search_box(system, bath));
        for (const auto& p : poles) free_worst = std::max(free_worst, std::abs(p.pole.imag()) / eps);
        reversible_poles += poles.size();
        return poles;
    };
    scan(std::nullopt);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) scan(BathSpec{random_stable_bath(rng, 1 + trial, 1.0, 1.0)});

    const std::optional<BathSpec> ohmic = OhmicBath{1.0, 10.0};
    const green::GreenFunction gf(system, green::SelfEnergy::from(ohmic, 1.0), eps, green::TimeArrow::Forward);
    const auto poles = green::find_poles(gf, green::default_search_box(system, ohmic));
    double ohmic_min = 0.0;
    bool first = true;
    for (const auto& p : poles) {
        if (std::abs(p.pole.real()) < 0.1) continue; // overdamped companions are not the oscillator pair
        const double r = std::abs(p.pole.imag()) / eps;
        ohmic_min = first ? r : std::min(ohmic_min, r);
        first = false;
        half_planes += (half_planes.empty() ? "" : ",") + std::string(p.pole.imag() < 0.0 ? "lower" : "upper");
    }
    const bool pass = reversible_poles > 0 && free_worst <= 10.0 && !first && ohmic_min >= 1e3;
    return {pass, "free/discrete: " + std::to_string(reversible_poles) + " poles, max |Im|/eps " + fmt(free_worst) +
                      " (limit 10); ohmic pair min |Im|/eps " + fmt(ohmic_min) + " (limit 1e3), half-plane " +
                      half_planes};
}

// --- 5 ------------------------------------------------------------------------------

struct AcausalRun {
    double t_negative_match;   // max |numeric - closed| / max |closed| over t < 0
    double t_positive_match;   // same over t > 0
    double causal_match;       // max |numeric - causal form| / max |causal form|, all t != 0
    double negative_mass;      // numeric t < 0 mass
    double closed_negative_mass;
};

AcausalRun acausal_run(double T) {
    const SystemSpec system{1.0, 1.0};
    const green::GreenFunction gf(system, green::SelfEnergy::none(), 1e-6, green::TimeArrow::Forward);
    const window::Window win{window::LorentzianFreq::from_time(T)};
    const double eta = window::LorentzianFreq::from_time(T).eta;
    const DeltaKick kick{0.0, 1.0};
    const auto poles = window::near_axis_poles(gf, 2.0, 0.25);
    const auto grid = window::acausal_grid(eta, 16.0);
    const auto x_obs = window::observed_response(gf, win, kick, grid, poles);
    const auto src = window::apparent_source(x_obs, gf, win, kick, poles);
    const double span = std::min(150.0, 15.0 / eta);
    const TimeGrid times(-span, span, 3001);
    const auto numeric = window::apparent_source_time(src, times, eta);
    std::vector<cplx> closed(times.size(), 0.0);
    for (const auto& p : poles) {
        const auto term = window::pole_apparent_source(p.pole, eta, kick.j0, times);
        for (std::size_t i = 0; i < times.size(); ++i) closed[i] += term.smooth[i];
    }
    // Exact windowed source of the free oscillator (eps -> 0):
    // j0 theta(t) e^{-eta t} [eta^2 sin(w0 t)/w0 - 2 eta cos(w0 t)].
    double causal_err = 0.0, causal_ref = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (t == 0.0) continue;
        const double exact = t < 0.0 ? 0.0
                                     : kick.j0 * std::exp(-eta * t) *
                                           (eta * eta * std::sin(system.omega0 * t) / system.omega0 -
                                            2.0 * eta * std::cos(system.omega0 * t));
        causal_err = std::max(causal_err, std::abs(numeric[i] - exact));
        causal_ref = std::max(causal_ref, std::abs(exact));
    }
    double neg_err = 0.0, neg_ref = 0.0, pos_err = 0.0, pos_ref = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double d = std::abs(numeric[i] - closed[i]);
        if (times[i] < 0.0) {
            neg_err = std::max(neg_err, d);
            neg_ref = std::max(neg_ref, std::abs(closed[i]));
        } else if (times[i] > 0.0) {
            pos_err = std::max(pos_err, d);
            pos_ref = std::max(pos_ref, std::abs(closed[i]));
        }
    }
    return {neg_err / neg_ref, pos_err / pos_ref, causal_err / causal_ref, window::negative_time_mass(times, numeric),
            window::negative_time_mass(times, closed)};
}

Outcome criterion5() {
    const auto coarse = acausal_run(100.0);
    const auto fine = acausal_run(1e6);
    const bool match = coarse.t_negative_match <= 0.05;
    const bool vanishes = fine.negative_mass < 1e-6 && fine.negative_mass < coarse.negative_mass;
    return {match && vanishes,
            "T=100 t<0 deviation from closed form " + fmt(coarse.t_negative_match) +
                " (limit 0.05; numeric t<0 mass " + fmt(coarse.negative_mass) + " vs closed form " +
                fmt(coarse.closed_negative_mass) + "); t>0 deviation " + fmt(coarse.t_positive_match) +
                "; deviation from the causal exact form " + fmt(coarse.causal_match) +
                "; T=1e6 t<0 mass " + fmt(fine.negative_mass)};
}

// --- 6 ------------------------------------------------------------------------------

Outcome criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const SystemSpec system{1.0, 1.0};
    const double eps = 1e-6;
    const double hbar = 1.0;
    const double dt = 0.05;
    const std::size_t steps = 400;
    const LagGrid lags(dt, steps);
    const TimeGrid times = TimeGrid::with_spacing(0.0, dt, steps + 1);
    const green::GreenFunction gf(system, green::SelfEnergy::none(), eps, green::TimeArrow::Forward);

    // tau anti-conjugation on a system + bath doublet.
    const DiscreteBath bath{{{1.3, 0.2}, {2.1, 0.35}}};
    oracle::EvolveOptions eo;
    eo.substeps = 20;
    eo.record_bath = true;
    const auto path = oracle::evolve_full(system, bath, SourceProfile::kick(0.0, 1.0),
                                          TimeGrid::with_spacing(0.0, dt, 2 * steps + 1), eo);
    const auto doublet = ctp::lift_trajectory(path);
    const cplx s = ctp::ctp_action(system, bath, doublet, eps);
    const cplx st = ctp::ctp_action(system, bath, ctp::tau_exchange(doublet), eps);
    const double tau = std::abs(st + std::conj(s)) / std::max(1.0, std::abs(s));

    const auto classical = ctp::classical_ctp_block(gf, lags);
    const auto quantum_raw = ctp::quantum_raw_blocks(system, hbar, eps, lags);
    const double consistency =
        std::max(ctp::check_consistency(classical.raw()), ctp::check_consistency(quantum_raw));

    auto other = classical;
    for (std::size_t k = 0; k < lags.size(); ++k) other.d_bar[k] += 0.3 * std::cos(0.7 * lags[k]) + 0.1;
    const auto kick = SourceProfile::kick(0.0, 1.0);
    const auto a = ctp::physical_response(classical, kick, times);
    const auto b = ctp::physical_response(other, kick, times);
    double dbar = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        dbar = std::max({dbar, std::abs(a.x_plus[i] - b.x_plus[i]), std::abs(a.x_minus[i] - b.x_minus[i])});
    }

    const auto qr = ctp::reduce(quantum_raw).block.retarded();
    const green::RetardedKernel kernel(gf);
    double retarded = 0.0;
    for (std::size_t k = lags.zero_index(); k < lags.size(); ++k) {
        retarded = std::max(retarded, std::abs(qr[k] - hbar * kernel.retarded(lags[k])));
    }
    const double elapsed = seconds_since(start);
    const bool pass = tau <= 1e-12 && consistency <= 1e-10 && dbar <= 1e-10 && retarded <= 1e-6 && elapsed < 10.0;
    return {pass, "tau " + fmt(tau) + ", consistency " + fmt(consistency) + ", Dbar independence " + fmt(dbar) +
                      ", quantum vs hbar*classical retarded " + fmt(retarded) + ", " + fmt(elapsed) + " s"};
}

// --- 7 ------------------------------------------------------------------------------

Outcome criterion7() {
    const SystemSpec system{1.0, 1.0};
    const double eps = 1e-6;
    const DiscreteBath bath{{{0.7, 0.15}, {1.6, 0.3}, {2.4, 0.2}}};
    const std::vector<std::optional<BathSpec>> models{std::nullopt, BathSpec{bath}, BathSpec{OhmicBath{1.0, 10.0}}};

    double parity = 0.0;
    double conjugation = 0.0;
    const LagGrid lags(0.05, 400);
    const FrequencyGrid fgrid(6.0, 8192);
    for (const auto& model : models) {
        const auto sigma = green::SelfEnergy::from(model, system.mass);
        const green::GreenFunction gf(system, sigma, eps, green::TimeArrow::Forward);
        const auto nf = green::near_far_kernels(green::RetardedKernel(gf), lags);
        parity = std::max({parity, ctp::parity_residual(nf.d_n, ctp::Parity::Even),
                           ctp::parity_residual(nf.d_f, ctp::Parity::Odd)});
        const auto sampled = green::retarded_propagator(system, sigma, fgrid, eps);
        conjugation = std::max(conjugation, green::conjugation_residual(*sampled.d_r));
    }

    const auto modes = oracle::diagonalize(system, bath);
    double total = 0.0;
    for (const auto& atom : window::exact_spectral_weight(modes, 0)) total += atom.weight;
    double normalization = 0.0;
    for (const window::Window& win :
         {window::Window{window::GaussianTime{10.0}}, window::Window{window::GaussianTime{1000.0}},
          window::Window{window::LorentzianFreq::from_time(100.0)},
          window::Window{window::LorentzianFreq::from_time(1e4)}}) {
        normalization = std::max(normalization, std::abs(window::apparent_weight_integral(modes, 0, win).value - total) / total);
    }
    const bool pass = parity <= 1e-10 && conjugation <= 1e-12 && normalization <= 1e-6;
    return {pass, "D^n/D^f parity " + fmt(parity) + ", d_r conjugation " + fmt(conjugation) +
                      ", weight normalization spread " + fmt(normalization)};
}

// --- 8 ------------------------------------------------------------------------------

Outcome criterion8() {
    const SystemSpec system{1.0, 1.0};
    const DiscreteBath bath{{{0.6, 0.1}, {1.4, 0.25}, {2.2, 0.3}, {3.1, 0.2}}};
    auto initial = oracle::PhaseState::at_rest(bath.modes.size());
    initial.x = 0.7;
    initial.vx = -0.2;
    initial.y = {0.1, -0.3, 0.05, 0.2};
    initial.vy = {0.0, 0.4, -0.1, 0.02};
    const double round_trip = oracle::velocity_flip_round_trip(system, bath, initial, 1e-3, 20000);

    const double lifetime = 1.0 / std::abs(ohmic_pole().imag());
    const std::optional<BathSpec> ohmic = OhmicBath{1.0, 10.0};
    const green::GreenFunction gf(system, green::SelfEnergy::from(ohmic, 1.0), 1e-6, green::TimeArrow::Forward);
    const double dt = 0.05;
    const TimeGrid grid(0.0, lifetime + 20.0, static_cast<std::size_t>((lifetime + 20.0) / dt) + 1);
    const auto x = green::response(gf, SourceProfile::kick(0.0, 1.0), grid).x;
    // Instantaneous amplitude sqrt(x^2 + (xdot/w_R)^2) with w_R the pole's real part.
    const double w_r = ohmic_pole().real();
    auto amplitude = [&](std::size_t i) {
        const double v = (x[i + 1] - x[i - 1]) / (2.0 * dt);
        return std::hypot(x[i], v / w_r);
    };
    const auto at_lifetime = static_cast<std::size_t>(std::lround(lifetime / dt));
    const double ratio = amplitude(1) / amplitude(at_lifetime);
    const bool pass = round_trip <= 1e-6 && ratio >= std::exp(1.0);
    char ratio_text[32];
    std::snprintf(ratio_text, sizeof ratio_text, "%.9f", ratio);
    return {pass, "velocity-flip round trip " + fmt(round_trip) + " (limit 1e-6); ohmic amplitude A(dt)/A(lifetime " +
                      fmt(lifetime) + ") = " + ratio_text + " (need >= e = 2.718281828)"};
}

std::set<int> parse_list(const std::string& text) {
    std::set<int> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.insert(std::stoi(item));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> known_red;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--known-red=", 0) == 0) known_red = parse_list(arg.substr(12));
        else if (arg.rfind("--only=", 0) == 0) only = parse_list(arg.substr(7));
        else {
            std::cerr << "usage: acceptance [--known-red=N,...] [--only=N,...]\n";
            return 2;
        }
    }
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8};
    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " | " << o.detail
                  << (!o.pass && known_red.count(id) ? " [known red]" : "") << std::endl;
        if (!o.pass && !known_red.count(id)) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
