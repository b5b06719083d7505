// test_config_cli.cpp — configuration parsing and end-to-end runs of the tarrow binary.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tarrow/config.hpp"
#include "tarrow/io.hpp"

using namespace tarrow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string output;
};

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tarrow_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Run run_cli(const std::string& args) {
    const std::string cmd = std::string(TARROW_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {-1, ""};
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<double>> read_csv(const fs::path& p, std::vector<std::string>* header = nullptr) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    if (header) {
        std::stringstream hs(line);
        for (std::string c; std::getline(hs, c, ',');) header->push_back(c);
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) row.push_back(std::strtod(c.c_str(), nullptr));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

TEST(Config, Defaults) {
    const auto c = config::parse_config(json::object());
    EXPECT_EQ(c.system.mass, 1.0);
    EXPECT_FALSE(c.bath.has_value());
    EXPECT_DOUBLE_EQ(c.epsilon(), 1e-6);
    EXPECT_EQ(c.grid.size(), 2001u);
}

TEST(Config, FullDocument) {
    const auto j = config::parse_json_text(R"({
        "system": {"mass": 2.0, "omega0": 1.5},
        "bath": {"type": "discrete", "modes": [{"omega": 2.0, "g": 0.3}]},
        "source": {"type": "kicks", "kicks": [{"t0": 0.0, "j0": 1.0}, {"t0": 2.0, "j0": -0.5}]},
        "grid": {"t_start": 0.0, "t_end": 10.0, "n_samples": 101},
        "window": {"type": "lorentzian", "T": 100},
        "numerics": {"epsilon": 1e-5, "arrow": "backward", "method": "modes"},
        "output": {"prefix": "run"}
    })");
    const auto c = config::parse_config(j);
    EXPECT_EQ(c.system.omega0, 1.5);
    ASSERT_TRUE(c.bath.has_value());
    EXPECT_EQ(std::get<DiscreteBath>(*c.bath).modes.size(), 1u);
    EXPECT_EQ(c.source.kicks().size(), 2u);
    EXPECT_DOUBLE_EQ(std::get<window::LorentzianFreq>(c.window->shape).eta, kTwoPi / 100.0);
    EXPECT_EQ(c.numerics.arrow, green::TimeArrow::Backward);
    EXPECT_DOUBLE_EQ(c.epsilon(), 1e-5);
    EXPECT_EQ(c.output.prefix, "run");
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(config::parse_config(json{{"sytem", json::object()}}), config::ConfigError);
    EXPECT_THROW(config::parse_config(json{{"system", {{"mas", 1.0}}}}), config::ConfigError);
    EXPECT_THROW(config::parse_config(json{{"bath", {{"type", "lossy"}}}}), config::ConfigError);
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_THROW(config::parse_config(json{{"system", {{"omega0", -1.0}}}}), config::ConfigError);
    EXPECT_THROW(config::parse_config(json{{"numerics", {{"n_frequency", 7}}}}), config::ConfigError);
    EXPECT_THROW(config::parse_config(json{{"system", {{"mass", "heavy"}}}}), config::ConfigError);
}

TEST(Config, MalformedJsonReportsLineAndColumn) {
    try {
        config::parse_json_text("{\n  \"system\": {\"mass\": 1.0,,}\n}");
        FAIL() << "expected ConfigError";
    } catch (const config::ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
    }
}

TEST(Config, DottedOverrides) {
    json j = config::parse_json_text(R"({"bath": {"type": "discrete", "modes": [{"omega": 2.0, "g": 0.3}]}})");
    config::apply_override(j, "bath.modes.0.g", config::override_value("0.5"));
    config::apply_override(j, "numerics.epsilon", config::override_value("1e-4"));
    config::apply_override(j, "output.prefix", config::override_value("abc"));
    const auto c = config::parse_config(j);
    EXPECT_DOUBLE_EQ(std::get<DiscreteBath>(*c.bath).modes[0].g, 0.5);
    EXPECT_DOUBLE_EQ(c.numerics.epsilon, 1e-4);
    EXPECT_EQ(c.output.prefix, "abc");
    EXPECT_THROW(config::apply_override(j, "bath.modes.5.g", 1.0), config::ConfigError);
    EXPECT_THROW(config::apply_override(j, "bath..g", 1.0), config::ConfigError);
}

TEST(Io, CsvRoundTripsDoubles) {
    io::Table t;
    t.add("a", {0.1, 1.0 / 3.0});
    t.add("b", {-2.5e-300, 7.0});
    const std::string csv = io::to_csv(t);
    EXPECT_EQ(csv.substr(0, 4), "a,b\n");
    EXPECT_NE(csv.find(io::number(1.0 / 3.0)), std::string::npos);
    EXPECT_EQ(std::stod(io::number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_THROW(t.add("c", {1.0}), Error);
}

TEST(Cli, SimulateFreeOscillatorIsSine) {
    const auto dir = scratch_dir("simulate");
    const auto r = run_cli("simulate --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const auto rows = read_csv(dir / "tarrow_trajectory.csv");
    ASSERT_EQ(rows.size(), 2001u);
    for (const auto& row : rows) EXPECT_NEAR(row[1], std::sin(row[0]), 1e-8);
}

TEST(Cli, SimulateOhmicBath) {
    const auto dir = scratch_dir("simulate_ohmic");
    const auto r = run_cli("simulate --out " + dir.string() +
                           " --bath '{\"type\":\"ohmic\",\"g\":1,\"omegaD\":10}' --grid.t_end=20 --grid.n_samples=401");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_EQ(read_csv(dir / "tarrow_trajectory.csv").size(), 401u);
}

TEST(Cli, MalformedConfigExitsTwo) {
    const auto dir = scratch_dir("malformed");
    write_file(dir / "bad.json", "{\n \"system\": {\"mass\": 1.0\n}");
    const auto r = run_cli("simulate -c " + (dir / "bad.json").string() + " --out " + dir.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("line"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("column"), std::string::npos) << r.output;
}

TEST(Cli, UnknownOptionExitsTwo) {
    EXPECT_EQ(run_cli("simulate --nonsense 1").code, 2);
    EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST(Cli, UnstableBathExitsThree) {
    const auto dir = scratch_dir("unstable");
    const auto r = run_cli("simulate --out " + dir.string() +
                           " --bath '{\"type\":\"discrete\",\"modes\":[{\"omega\":1,\"g\":1.2}]}'");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.output.find("sum_n g_n^2/(m omega_n^2) < m omega0^2"), std::string::npos) << r.output;
}

TEST(Cli, GreenFreePolesAndArrow) {
    const auto dir = scratch_dir("green");
    ASSERT_EQ(run_cli("green --out " + dir.string()).code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_poles.json"));
    ASSERT_EQ(report["poles"].size(), 2u);
    for (const auto& p : report["poles"]) {
        EXPECT_NEAR(std::abs(p["re"].get<double>()), 1.0, 1e-8);
        EXPECT_LE(std::abs(p["im"].get<double>()), 1e-5);
    }
    const auto fwd = read_csv(dir / "tarrow_green.csv");
    ASSERT_EQ(run_cli("green --out " + dir.string() + " --numerics.arrow backward --output.prefix back").code, 0);
    std::vector<std::string> header;
    const auto bwd = read_csv(dir / "back_green.csv", &header);
    ASSERT_EQ(header[1], "d_r_re");
    ASSERT_EQ(fwd.size(), bwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        EXPECT_DOUBLE_EQ(fwd[i][1], bwd[i][1]);
        EXPECT_DOUBLE_EQ(fwd[i][2], -bwd[i][2]);
    }
}

TEST(Cli, GreenOhmicPolesFarFromAxis) {
    const auto dir = scratch_dir("green_ohmic");
    ASSERT_EQ(run_cli("green --out " + dir.string() + " --bath '{\"type\":\"ohmic\",\"g\":1,\"omegaD\":10}'").code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_poles.json"));
    std::size_t far = 0;
    for (const auto& p : report["poles"]) {
        if (p["im_over_eps"].get<double>() > 1e3) ++far;
    }
    EXPECT_GE(far, 2u);
}

TEST(Cli, Fig1DefaultAndSvg) {
    const auto dir = scratch_dir("fig1");
    const auto r = run_cli("fig1 --svg --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const auto report = json::parse(read_file(dir / "tarrow_fig1.json"));
    EXPECT_TRUE(report["strictly_decreasing"].get<bool>());
    const std::string svg = read_file(dir / "tarrow_fig1.svg");
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
    EXPECT_EQ(polylines, 3u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Cli, Fig1DeltaLimit) {
    const auto dir = scratch_dir("fig1_delta");
    ASSERT_EQ(run_cli("fig1 --T 1e6 --out " + dir.string()).code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_fig1.json"));
    const auto& peaks = report["curves"][0]["peak_positions"];
    ASSERT_EQ(peaks.size(), 20u);
    const double step = report["curves"][0]["grid_step"].get<double>();
    for (std::size_t j = 1; j <= 20; ++j) {
        const double expected = 1.0 + 1.0 / static_cast<double>(21 - j);
        EXPECT_NEAR(peaks[j - 1].get<double>(), expected, step);
    }
}

TEST(Cli, SpectralNeedsDiscreteBath) {
    EXPECT_EQ(run_cli("spectral").code, 2);
    const auto dir = scratch_dir("spectral");
    const auto r = run_cli("spectral --out " + dir.string() +
                           " --bath '{\"type\":\"discrete\",\"modes\":[{\"omega\":1.5,\"g\":0.2}]}'");
    ASSERT_EQ(r.code, 0) << r.output;
    std::vector<std::string> header;
    read_csv(dir / "tarrow_spectral.csv", &header);
    EXPECT_EQ(header, (std::vector<std::string>{"Omega", "rho_apparent"}));
}

TEST(Cli, AcausalLongWindowHasNoNegativeTimeMass) {
    const auto dir = scratch_dir("acausal");
    ASSERT_EQ(run_cli("acausal --out " + dir.string() + " --window.type lorentzian --window.T 1e6").code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_acausal.json"));
    EXPECT_LT(report["negative_time_mass"].get<double>(), 1e-6);
}

TEST(Cli, AcausalZeroSourceIsZero) {
    const auto dir = scratch_dir("acausal_zero");
    ASSERT_EQ(run_cli("acausal --out " + dir.string() + " --source '{\"type\":\"none\"}'").code, 0);
    for (const auto& row : read_csv(dir / "tarrow_acausal.csv")) {
        EXPECT_EQ(row[1], 0.0);
        EXPECT_EQ(row[2], 0.0);
    }
}

TEST(Cli, CtpCheckDefaults) {
    const auto dir = scratch_dir("ctp");
    ASSERT_EQ(run_cli("ctp-check --out " + dir.string()).code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_ctp_report.json"));
    for (const char* key : {"tau_residual", "consistency_residual", "dbar_independence_residual"}) {
        EXPECT_LE(report[key].get<double>(), 1e-10) << key;
    }
    EXPECT_LE(report["retarded_match_error"].get<double>(), 1e-6);
    EXPECT_EQ(report["weight_samples"].size(), 5u);
}

TEST(Cli, CtpCheckPerturbedDbar) {
    const auto dir = scratch_dir("ctp_dbar");
    ASSERT_EQ(run_cli("ctp-check --perturb-dbar --out " + dir.string()).code, 0);
    const auto report = json::parse(read_file(dir / "tarrow_ctp_report.json"));
    EXPECT_LE(report["dbar_independence_residual"].get<double>(), 1e-10);
}

TEST(Cli, CtpCheckBrokenConsistencyExitsFour) {
    const auto dir = scratch_dir("ctp_broken");
    EXPECT_EQ(run_cli("ctp-check --break-consistency --out " + dir.string()).code, 4);
    const auto report = json::parse(read_file(dir / "tarrow_ctp_report.json"));
    EXPECT_GT(report["consistency_residual"].get<double>(), 1e-10);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const auto dir = scratch_dir("env");
    const std::string cmd = "TARROW_OUT_DIR=" + dir.string() + " " + std::string(TARROW_CLI) +
                            " simulate --grid.n_samples=11 --grid.t_end=1 > /dev/null 2>&1";
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_TRUE(fs::exists(dir / "tarrow_trajectory.csv"));
}
