// tarrow_cli.cpp — command-line driver: simulate, green, spectral, fig1, acausal, ctp-check.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 invariant violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "tarrow/config.hpp"
#include "tarrow/ctp.hpp"
#include "tarrow/green.hpp"
#include "tarrow/io.hpp"
#include "tarrow/model.hpp"
#include "tarrow/oracle.hpp"
#include "tarrow/window.hpp"

namespace {

using namespace tarrow;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;
constexpr int kInvariantViolation = 4;

constexpr const char* kOutEnv = "TARROW_OUT_DIR";

// Raised when a check inside a subcommand fails; maps to exit 4.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed; // reserved
};

config::RunConfig load(const Common& common, const std::vector<std::string>& extras) {
    json j = common.config_path.empty() ? json::object() : config::load_json_file(common.config_path);
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string arg = extras[i];
        if (arg.rfind("--", 0) != 0) throw config::ConfigError("unexpected argument \"" + arg + "\"");
        arg = arg.substr(2);
        std::string value;
        const auto eq = arg.find('=');
        if (eq != std::string::npos) {
            value = arg.substr(eq + 1);
            arg = arg.substr(0, eq);
        } else {
            if (i + 1 >= extras.size()) throw config::ConfigError("override --" + arg + " needs a value");
            value = extras[++i];
        }
        static const std::set<std::string> sections{"system", "bath", "source", "grid", "window", "numerics", "output"};
        if (!sections.count(arg.substr(0, arg.find('.')))) throw config::ConfigError("unknown option --" + arg);
        config::apply_override(j, arg, config::override_value(value));
    }
    return config::parse_config(j);
}

fs::path output_dir(const Common& common, const config::RunConfig& cfg) {
    std::string dir = common.out_dir;
    if (dir.empty()) dir = cfg.output.dir;
    if (dir.empty()) {
        if (const char* env = std::getenv(kOutEnv)) dir = env;
    }
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
}

fs::path out_file(const fs::path& dir, const config::RunConfig& cfg, const std::string& stem) {
    return dir / (cfg.output.prefix + "_" + stem);
}

void require_stable(const config::RunConfig& cfg) {
    const auto report = cfg.bath ? stability_check(cfg.system, *cfg.bath) : stability_check(cfg.system);
    if (!report.stable) {
        throw Error(ErrorCode::NotPositiveDefinite, "unstable model: " + report.condition +
                                                        " violated (margin " + io::number(report.margin) + ")");
    }
}

green::GreenFunction make_gf(const config::RunConfig& cfg) {
    return green::GreenFunction(cfg.system, green::SelfEnergy::from(cfg.bath, cfg.system.mass), cfg.epsilon(),
                                cfg.numerics.arrow);
}

green::KernelOptions kernel_options(const config::RunConfig& cfg) {
    return {cfg.numerics.omega_max, cfg.numerics.n_frequency};
}

// --- simulate -------------------------------------------------------------------------

int cmd_simulate(const config::RunConfig& cfg, const fs::path& dir) {
    require_stable(cfg);
    oracle::Trajectory traj{cfg.grid, {}, std::nullopt};
    std::string method;
    if (!cfg.bath) {
        if (cfg.source.is_kicks()) {
            const oracle::NormalModes single{{cfg.system.omega0}, Eigen::MatrixXd::Identity(1, 1), cfg.system.mass};
            traj = oracle::respond_via_modes(single, cfg.source, cfg.grid);
            method = "normal-modes";
        } else {
            traj = green::response(make_gf(cfg), cfg.source, cfg.grid, kernel_options(cfg));
            method = "green";
        }
    } else if (const auto* d = std::get_if<DiscreteBath>(&*cfg.bath)) {
        if (cfg.numerics.method == "modes") {
            traj = oracle::respond_via_modes(oracle::diagonalize(cfg.system, *d), cfg.source, cfg.grid);
            method = "normal-modes";
        } else {
            oracle::EvolveOptions opt;
            opt.substeps = cfg.numerics.substeps;
            traj = oracle::evolve_full(cfg.system, *d, cfg.source, cfg.grid, opt);
            method = "verlet";
        }
    } else {
        traj = green::response(make_gf(cfg), cfg.source, cfg.grid, kernel_options(cfg));
        method = "green";
    }
    io::Table t;
    t.add("t", cfg.grid.points());
    t.add("x", traj.x);
    const auto path = out_file(dir, cfg, "trajectory.csv");
    io::write_text(path.string(), io::to_csv(t));
    std::cout << "simulate: " << cfg.grid.size() << " samples via " << method << " -> " << path.string() << "\n";
    return kOk;
}

// --- green ----------------------------------------------------------------------------

int cmd_green(const config::RunConfig& cfg, const fs::path& dir, double omega_out, std::size_t n_out) {
    require_stable(cfg);
    const FrequencyGrid grid(omega_out, n_out);
    const auto gf = green::retarded_propagator(cfg.system, green::SelfEnergy::from(cfg.bath, cfg.system.mass), grid,
                                               cfg.epsilon(), cfg.numerics.arrow);
    const auto [dn, df] = green::near_far_split(gf);
    const auto& dr = *gf.d_r;
    io::Table t;
    std::vector<double> w(grid.size()), c[6];
    for (auto& v : c) v.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        w[k] = grid[k];
        c[0][k] = dr[k].real();
        c[1][k] = dr[k].imag();
        c[2][k] = dn[k].real();
        c[3][k] = dn[k].imag();
        c[4][k] = df[k].real();
        c[5][k] = df[k].imag();
    }
    t.add("omega", w);
    const char* names[] = {"d_r_re", "d_r_im", "d_n_re", "d_n_im", "d_f_re", "d_f_im"};
    for (int i = 0; i < 6; ++i) t.add(names[i], c[i]);
    const auto csv = out_file(dir, cfg, "green.csv");
    io::write_text(csv.string(), io::to_csv(t));

    const auto poles = green::find_poles(gf, green::default_search_box(cfg.system, cfg.bath));
    json report = {{"arrow", cfg.numerics.arrow == green::TimeArrow::Forward ? "forward" : "backward"},
                   {"epsilon", gf.epsilon()},
                   {"conjugation_residual", green::conjugation_residual(dr)},
                   {"poles", io::poles_json(poles, gf.epsilon())}};
    const auto pj = out_file(dir, cfg, "poles.json");
    io::write_text(pj.string(), report.dump(2) + "\n");
    std::cout << "green: " << poles.size() << " poles -> " << pj.string() << "\n";
    return kOk;
}

// --- spectral -------------------------------------------------------------------------

int cmd_spectral(const config::RunConfig& cfg, const fs::path& dir, std::size_t n_out, double prominence) {
    const auto* d = cfg.bath ? std::get_if<DiscreteBath>(&*cfg.bath) : nullptr;
    if (d == nullptr) throw config::ConfigError("spectral needs a discrete bath");
    require_stable(cfg);
    const auto modes = oracle::diagonalize(cfg.system, *d);
    const window::Window win = cfg.window.value_or(window::Window{window::GaussianTime{100.0}});
    const double top = 1.5 * modes.frequencies.back() + 5.0 * win.width();
    std::vector<double> omega(n_out);
    for (std::size_t i = 0; i < n_out; ++i) omega[i] = top * static_cast<double>(i) / static_cast<double>(n_out - 1);
    const auto rho = window::apparent_spectral_function(modes, 0, win, omega);
    io::Table t;
    t.add("Omega", omega);
    t.add("rho_apparent", rho);
    const auto path = out_file(dir, cfg, "spectral.csv");
    io::write_text(path.string(), io::to_csv(t));
    json atoms = json::array();
    for (const auto& a : window::exact_spectral_weight(modes, 0)) atoms.push_back({{"omega", a.omega}, {"weight", a.weight}});
    const auto peaks = window::count_resolved_peaks(rho, prominence * *std::max_element(rho.begin(), rho.end()));
    json report = {{"exact_spectral_weight", atoms}, {"resolved_peaks", peaks}};
    io::write_text(out_file(dir, cfg, "spectral.json").string(), report.dump(2) + "\n");
    std::cout << "spectral: " << peaks << " resolved peaks -> " << path.string() << "\n";
    return kOk;
}

// --- fig1 -----------------------------------------------------------------------------

int cmd_fig1(const config::RunConfig& cfg, const fs::path& dir, std::vector<double> periods, bool svg,
             double prominence) {
    const bool default_run = periods.empty();
    if (default_run) periods = {2000.0, 700.0, 100.0};
    const auto modes = window::condensation_modes(20, 1.0);
    json curves = json::array();
    std::vector<io::Curve> plot;
    std::vector<std::size_t> counts;
    bool dominant_last = false;
    for (double T : periods) {
        if (!(T > 0.0)) throw config::ConfigError("--T values must be positive");
        const auto c = window::gaussian_spectrum(modes, T);
        const auto peaks = window::curve_peaks(c, prominence);
        counts.push_back(peaks.size());
        dominant_last = window::single_dominant_feature(c, 0.95, 1.3, prominence);
        io::Table t;
        t.add("Omega", c.omega);
        t.add("rho_apparent", c.rho);
        io::write_text(out_file(dir, cfg, "fig1_T" + io::number(T) + ".csv").string(), io::to_csv(t));
        json positions = json::array();
        for (std::size_t i : peaks) positions.push_back(c.omega[i]);
        curves.push_back({{"T", T},
                          {"grid_step", c.omega[1] - c.omega[0]},
                          {"peaks", peaks.size()},
                          {"peak_positions", positions},
                          {"dominant_feature_0.95_1.3", dominant_last}});
        plot.push_back({"T=" + io::number(T), c.omega, c.rho});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < counts.size(); ++i) decreasing = decreasing && counts[i] < counts[i - 1];
    json report = {{"prominence_fraction", prominence}, {"curves", curves}, {"strictly_decreasing", decreasing}};
    io::write_text(out_file(dir, cfg, "fig1.json").string(), report.dump(2) + "\n");
    if (svg || cfg.output.svg) {
        io::write_text(out_file(dir, cfg, "fig1.svg").string(),
                       io::svg_plot(plot, 0.9, 2.1, "Omega", "apparent spectral density"));
    }
    std::cout << "fig1: peak counts";
    for (auto c : counts) std::cout << " " << c;
    std::cout << (decreasing ? " (strictly decreasing)" : " (not strictly decreasing)") << "\n";
    if (default_run && (!decreasing || !dominant_last)) {
        throw InvariantViolation("peak counts must decrease strictly and T=100 must show one dominant feature");
    }
    return kOk;
}

// --- acausal --------------------------------------------------------------------------

int cmd_acausal(const config::RunConfig& cfg, const fs::path& dir, double t_window, std::size_t n_t,
                double omega_cap) {
    const auto kicks = cfg.source.kicks();
    if (!cfg.source.is_kicks() || kicks.size() > 1) throw config::ConfigError("acausal needs a single kick source");
    const DeltaKick kick = kicks.empty() ? DeltaKick{0.0, 0.0} : kicks.front();
    const window::Window win = cfg.window.value_or(window::Window{window::LorentzianFreq::from_time(100.0)});
    const auto* lor = std::get_if<window::LorentzianFreq>(&win.shape);
    if (lor == nullptr) throw config::ConfigError("acausal needs a lorentzian window");
    require_stable(cfg);
    const auto gf = make_gf(cfg);
    const double eta = lor->eta;

    const auto box = green::default_search_box(cfg.system, cfg.bath);
    const double depth = std::min(0.5 * box.im_max, 10.0 * std::max(eta, std::abs(gf.epsilon())));
    const auto poles = window::near_axis_poles(gf, box.re_max, depth);
    const auto grid = window::acausal_grid(eta, omega_cap);
    const auto x_obs = window::observed_response(gf, win, kick, grid, poles);
    const auto src = window::apparent_source(x_obs, gf, win, kick, poles);
    const TimeGrid times(-t_window, t_window, n_t);
    const auto smooth = window::apparent_source_time(src, times, eta);

    std::vector<cplx> closed(times.size(), 0.0);
    for (const auto& p : poles) {
        const auto term = window::pole_apparent_source(p.pole, eta, kick.j0, times);
        for (std::size_t i = 0; i < times.size(); ++i) closed[i] += term.smooth[i];
    }
    io::Table t;
    std::vector<double> c[4];
    for (auto& v : c) v.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        c[0][i] = smooth[i].real();
        c[1][i] = smooth[i].imag();
        c[2][i] = closed[i].real();
        c[3][i] = closed[i].imag();
    }
    t.add("t", times.points());
    t.add("j_smooth_re", c[0]);
    t.add("j_smooth_im", c[1]);
    t.add("closed_form_re", c[2]);
    t.add("closed_form_im", c[3]);
    const auto path = out_file(dir, cfg, "acausal.csv");
    io::write_text(path.string(), io::to_csv(t));

    const double neg = window::negative_time_mass(times, smooth);
    const double neg_closed = window::negative_time_mass(times, closed);
    json report = {{"eta", eta},
                   {"delta_atom", src.atom},
                   {"route_mismatch", src.route_mismatch},
                   {"checked_nodes", src.checked},
                   {"frequency_nodes", grid.size()},
                   {"negative_time_mass", neg},
                   {"negative_time_mass_closed_form", neg_closed},
                   {"poles", io::poles_json(poles, gf.epsilon())}};
    io::write_text(out_file(dir, cfg, "acausal.json").string(), report.dump(2) + "\n");
    std::cout << "acausal: t<0 mass " << io::number(neg) << " (closed form " << io::number(neg_closed) << ") -> "
              << path.string() << "\n";
    return kOk;
}

// --- ctp-check ------------------------------------------------------------------------

int cmd_ctp_check(const config::RunConfig& cfg, const fs::path& dir, bool perturb_dbar, bool break_consistency) {
    if (cfg.bath) throw config::ConfigError("ctp-check runs on the free oscillator (omit bath)");
    const double eps = cfg.epsilon();
    const double hbar = cfg.numerics.hbar;
    const double m = cfg.system.mass;
    const double w0 = cfg.system.omega0;
    const double dt = 0.05;
    const std::size_t steps = 400; // t in [0, 20]
    const LagGrid lags(dt, steps);
    const TimeGrid times = TimeGrid::with_spacing(0.0, dt, steps + 1);
    const auto gf = green::GreenFunction(cfg.system, green::SelfEnergy::none(), eps, green::TimeArrow::Forward);

    // tau anti-conjugation on a folded kicked trajectory.
    oracle::Trajectory folded{TimeGrid::with_spacing(0.0, dt, 2 * steps + 1), {}, std::nullopt};
    for (std::size_t i = 0; i < folded.grid.size(); ++i) folded.x.push_back(std::sin(w0 * folded.grid[i]) / (m * w0));
    const auto doublet = ctp::lift_trajectory(folded);
    const cplx s = ctp::ctp_action(cfg.system, std::nullopt, doublet, eps);
    const cplx st = ctp::ctp_action(cfg.system, std::nullopt, ctp::tau_exchange(doublet), eps);
    const double tau_residual = std::abs(st + std::conj(s));

    // Consistency of the classical and quantum blocks.
    auto classical = ctp::classical_ctp_block(gf, lags, kernel_options(cfg));
    if (perturb_dbar) {
        for (std::size_t k = 0; k < lags.size(); ++k) classical.d_bar[k] = std::exp(-0.1 * lags[k] * lags[k]);
    }
    auto quantum_raw = ctp::quantum_raw_blocks(cfg.system, hbar, eps, lags);
    auto classical_raw = classical.raw();
    if (break_consistency) classical_raw.pp[lags.zero_index() + 7] += cplx(1e-3, 0.0);
    const double consistency =
        std::max(ctp::check_consistency(classical_raw), ctp::check_consistency(quantum_raw));

    // Dbar independence of the physical response.
    const auto kick = SourceProfile::kick(0.0, 1.0);
    double dbar_residual = 0.0;
    double response_match = 0.0;
    if (consistency <= 1e-8) {
        auto other = classical;
        for (std::size_t k = 0; k < lags.size(); ++k) other.d_bar[k] += 0.3 * std::cos(0.7 * lags[k]);
        const auto a = ctp::physical_response(classical_raw, kick, times);
        const auto b = ctp::physical_response(other, kick, times);
        const auto ref = green::response(gf, kick, times, kernel_options(cfg));
        for (std::size_t i = 0; i < times.size(); ++i) {
            dbar_residual = std::max({dbar_residual, std::abs(a.x_plus[i] - b.x_plus[i]),
                                      std::abs(a.x_minus[i] - b.x_minus[i])});
            response_match = std::max({response_match, std::abs(a.x_plus[i] - ref.x[i]),
                                       std::abs(a.x_plus[i] - a.x_minus[i])});
        }
    }

    // Quantum retarded combination over hbar vs the classical kernel on [0, 20].
    const auto quantum = ctp::reduce(quantum_raw).block;
    const auto qr = quantum.retarded();
    const green::RetardedKernel kernel(gf, kernel_options(cfg));
    double retarded_error = 0.0;
    for (std::size_t k = lags.zero_index(); k < lags.size(); ++k) {
        retarded_error = std::max(retarded_error, std::abs(qr[k] / hbar - kernel.retarded(lags[k])));
    }

    // Parity of the blocks and the kernel duality in frequency.
    const double parity = std::max({ctp::parity_residual(classical.d_n, ctp::Parity::Even),
                                    ctp::parity_residual(classical.d_f, ctp::Parity::Odd),
                                    ctp::parity_residual(quantum.d_n, ctp::Parity::Even),
                                    ctp::parity_residual(quantum.d_f, ctp::Parity::Odd),
                                    ctp::parity_residual(quantum.d_bar, ctp::Parity::Even)});
    const FrequencyGrid fgrid(kPi / dt, 4096);
    const auto spectrum = ctp::quantum_ctp_spectrum(cfg.system, hbar, eps, fgrid);
    const auto kern = ctp::invert_block(spectrum);
    const double duality = ctp::block_distance(ctp::invert_kernel(kern), spectrum.raw());

    // Decoherence weights for a Gaussian bump y(t) = A exp(-(t - 10)^2).
    const TimeGrid ytimes = TimeGrid::with_spacing(0.0, dt, 400);
    const auto q = ctp::kbar_matrix(kern, ytimes);
    json weights = json::array();
    for (double amp : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
        std::vector<double> y(ytimes.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = amp * std::exp(-(ytimes[i] - 10.0) * (ytimes[i] - 10.0));
        weights.push_back({{"amplitude", amp}, {"weight", ctp::decoherence_weight(q, y, hbar)}});
    }

    json report = {{"tau_residual", tau_residual},
                   {"consistency_residual", consistency},
                   {"dbar_independence_residual", dbar_residual},
                   {"response_match_error", response_match},
                   {"retarded_match_error", retarded_error},
                   {"parity_residual", parity},
                   {"kernel_duality_residual", duality},
                   {"kbar_mismatch", kern.kbar_mismatch},
                   {"action", {{"re", s.real()}, {"im", s.imag()}}},
                   {"weight_samples", weights}};
    const auto path = out_file(dir, cfg, "ctp_report.json");
    io::write_text(path.string(), report.dump(2) + "\n");
    std::cout << "ctp-check: report -> " << path.string() << "\n";

    std::vector<std::string> failed;
    if (tau_residual > 1e-12) failed.push_back("tau_residual");
    if (consistency > 1e-10) failed.push_back("consistency_residual");
    if (dbar_residual > 1e-10) failed.push_back("dbar_independence_residual");
    if (retarded_error > 1e-6) failed.push_back("retarded_match_error");
    if (parity > 1e-10) failed.push_back("parity_residual");
    if (duality > 1e-8) failed.push_back("kernel_duality_residual");
    if (!failed.empty()) {
        std::string list;
        for (const auto& f : failed) list += (list.empty() ? "" : ", ") + f;
        throw InvariantViolation("ctp identities violated: " + list);
    }
    return kOk;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::InvalidArgument:
        return kConfigError;
    case ErrorCode::InconsistentBlock:
    case ErrorCode::ParityViolation:
    case ErrorCode::NotPSD:
        return kInvariantViolation;
    default:
        return kNumericFailure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tarrow: system-bath dynamics, Green functions, observation windows and CTP identities"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "JSON run configuration");
        sub->add_option("-o,--out", common.out_dir, std::string("output directory (default: config, then $") + kOutEnv + ", then .)");
        sub->add_option("--seed", common.seed, "reserved; all current operations are deterministic");
        sub->allow_extras();
    };

    auto* simulate = app.add_subcommand("simulate", "trajectory of the system coordinate (CSV)");
    add_common(simulate);

    auto* green_cmd = app.add_subcommand("green", "propagator samples (CSV) and poles (JSON)");
    add_common(green_cmd);
    double omega_out = 5.0;
    std::size_t n_out = 4096;
    green_cmd->add_option("--omega-out", omega_out, "half-width of the output frequency grid");
    green_cmd->add_option("--n-out", n_out, "output frequency samples (even)");

    auto* spectral = app.add_subcommand("spectral", "apparent spectral function of a discrete bath model");
    add_common(spectral);
    std::size_t n_spectral = 4001;
    double prominence = 0.01;
    spectral->add_option("--n-out", n_spectral, "output Omega samples");
    spectral->add_option("--prominence", prominence, "peak prominence as a fraction of the maximum");

    auto* fig1 = app.add_subcommand("fig1", "apparent spectra of the condensation-point model");
    add_common(fig1);
    std::vector<double> periods;
    bool svg = false;
    fig1->add_option("--T", periods, "observation times (default 2000 700 100)");
    fig1->add_flag("--svg", svg, "also write an SVG overlay");
    fig1->add_option("--prominence", prominence, "peak prominence as a fraction of the maximum");

    auto* acausal = app.add_subcommand("acausal", "apparent source of a windowed kicked response");
    add_common(acausal);
    double t_window = 150.0;
    std::size_t n_t = 3001;
    double omega_cap = 16.0;
    acausal->add_option("--t-window", t_window, "output times cover [-t, t] around the kick");
    acausal->add_option("--n-t", n_t, "output time samples");
    acausal->add_option("--omega-cap", omega_cap, "largest frequency cutoff of the transform grid");

    auto* ctp_cmd = app.add_subcommand("ctp-check", "closed-time-path identity report (JSON)");
    add_common(ctp_cmd);
    bool perturb_dbar = false;
    bool break_consistency = false;
    ctp_cmd->add_flag("--perturb-dbar", perturb_dbar, "replace the classical Dbar with an arbitrary even function");
    ctp_cmd->add_flag("--break-consistency", break_consistency, "corrupt one block entry (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const auto cfg = load(common, sub->remaining());
        const auto dir = output_dir(common, cfg);
        if (sub == simulate) return cmd_simulate(cfg, dir);
        if (sub == green_cmd) return cmd_green(cfg, dir, omega_out, n_out);
        if (sub == spectral) return cmd_spectral(cfg, dir, n_spectral, prominence);
        if (sub == fig1) return cmd_fig1(cfg, dir, periods, svg, prominence);
        if (sub == acausal) return cmd_acausal(cfg, dir, t_window, n_t, omega_cap);
        if (sub == ctp_cmd) return cmd_ctp_check(cfg, dir, perturb_dbar, break_consistency);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kInvariantViolation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericFailure;
    }
    return kOk;
}
