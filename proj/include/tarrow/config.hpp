// config.hpp — JSON run configuration with strict keys and dotted overrides.

#pragma once

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/green.hpp"
#include "tarrow/model.hpp"
#include "tarrow/window.hpp"

namespace tarrow::config {

using nlohmann::json;

// Configuration problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Numerics {
    double epsilon = 0.0; // 0 selects green::default_epsilon
    double hbar = 1.0;
    double omega_max = 200.0;
    std::size_t n_frequency = std::size_t{1} << 18;
    std::size_t substeps = 100;
    green::TimeArrow arrow = green::TimeArrow::Forward;
    std::string method = "verlet"; // simulate: verlet | modes
};

struct Output {
    std::string dir;    // empty: environment default, then "."
    std::string prefix = "tarrow";
    bool svg = false;
};

struct RunConfig {
    SystemSpec system{1.0, 1.0};
    std::optional<BathSpec> bath;
    SourceProfile source = SourceProfile::kick(0.0, 1.0);
    TimeGrid grid{0.0, 50.0, 2001};
    std::optional<window::Window> window;
    Numerics numerics;
    Output output;

    double epsilon() const { return numerics.epsilon > 0.0 ? numerics.epsilon : green::default_epsilon(system); }
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

template <class T>
T get(const json& j, const std::string& where, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <class T>
T need(const json& j, const std::string& where, const char* key) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
    return get<T>(j, where, key, T{});
}

inline SystemSpec parse_system(const json& j) {
    only_keys(j, "system", {"mass", "omega0"});
    return {get(j, "system", "mass", 1.0), get(j, "system", "omega0", 1.0)};
}

inline BathSpec parse_bath(const json& j) {
    if (!j.is_object()) throw ConfigError("bath: expected an object");
    const auto type = need<std::string>(j, "bath", "type");
    if (type == "discrete") {
        only_keys(j, "bath", {"type", "modes"});
        DiscreteBath bath;
        const auto& modes = j.contains("modes") ? j.at("modes") : json::array();
        if (!modes.is_array()) throw ConfigError("bath.modes: expected an array");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const std::string where = "bath.modes[" + std::to_string(i) + "]";
            only_keys(modes[i], where, {"omega", "g"});
            bath.modes.push_back({need<double>(modes[i], where, "omega"), need<double>(modes[i], where, "g")});
        }
        return bath;
    }
    if (type == "ohmic") {
        only_keys(j, "bath", {"type", "g", "omegaD"});
        return OhmicBath{need<double>(j, "bath", "g"), need<double>(j, "bath", "omegaD")};
    }
    throw ConfigError("bath.type: expected \"discrete\" or \"ohmic\", got \"" + type + "\"");
}

inline SourceProfile parse_source(const json& j) {
    if (!j.is_object()) throw ConfigError("source: expected an object");
    const auto type = need<std::string>(j, "source", "type");
    if (type == "none") {
        only_keys(j, "source", {"type"});
        return SourceProfile::none();
    }
    if (type == "kick") {
        only_keys(j, "source", {"type", "t0", "j0"});
        return SourceProfile::kick(get(j, "source", "t0", 0.0), get(j, "source", "j0", 1.0));
    }
    if (type == "kicks") {
        only_keys(j, "source", {"type", "kicks"});
        KickTrain train;
        const auto& list = j.contains("kicks") ? j.at("kicks") : json::array();
        if (!list.is_array()) throw ConfigError("source.kicks: expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "source.kicks[" + std::to_string(i) + "]";
            only_keys(list[i], where, {"t0", "j0"});
            train.kicks.push_back({need<double>(list[i], where, "t0"), need<double>(list[i], where, "j0")});
        }
        return {train};
    }
    if (type == "sampled") {
        only_keys(j, "source", {"type", "t_start", "t_end", "values"});
        const auto values = need<std::vector<double>>(j, "source", "values");
        if (values.size() < 2) throw ConfigError("source.values: need at least two samples");
        try {
            return {SampledSource{TimeGrid(need<double>(j, "source", "t_start"), need<double>(j, "source", "t_end"),
                                           values.size()),
                                  values}};
        } catch (const Error& e) {
            throw ConfigError(std::string("source: ") + e.what());
        }
    }
    throw ConfigError("source.type: expected none, kick, kicks or sampled, got \"" + type + "\"");
}

inline TimeGrid parse_grid(const json& j) {
    only_keys(j, "grid", {"t_start", "t_end", "n_samples"});
    try {
        return TimeGrid(get(j, "grid", "t_start", 0.0), get(j, "grid", "t_end", 50.0),
                        get<std::size_t>(j, "grid", "n_samples", 2001));
    } catch (const Error& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

inline window::Window parse_window(const json& j) {
    if (!j.is_object()) throw ConfigError("window: expected an object");
    only_keys(j, "window", {"type", "T", "eta"});
    const auto type = need<std::string>(j, "window", "type");
    if (type == "gaussian") {
        const double t = need<double>(j, "window", "T");
        if (!(t > 0.0)) throw ConfigError("window.T must be positive");
        return {window::GaussianTime{t}};
    }
    if (type == "lorentzian") {
        const double eta = j.contains("eta") ? get(j, "window", "eta", 0.0) : kTwoPi / need<double>(j, "window", "T");
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("window: eta must be positive");
        return {window::LorentzianFreq{eta}};
    }
    throw ConfigError("window.type: expected \"gaussian\" or \"lorentzian\"");
}

inline Numerics parse_numerics(const json& j) {
    only_keys(j, "numerics", {"epsilon", "hbar", "omega_max", "n_frequency", "substeps", "arrow", "method"});
    Numerics n;
    n.epsilon = get(j, "numerics", "epsilon", n.epsilon);
    n.hbar = get(j, "numerics", "hbar", n.hbar);
    n.omega_max = get(j, "numerics", "omega_max", n.omega_max);
    n.n_frequency = get(j, "numerics", "n_frequency", n.n_frequency);
    n.substeps = get(j, "numerics", "substeps", n.substeps);
    n.method = get<std::string>(j, "numerics", "method", n.method);
    const auto arrow = get<std::string>(j, "numerics", "arrow", "forward");
    if (arrow == "forward") n.arrow = green::TimeArrow::Forward;
    else if (arrow == "backward") n.arrow = green::TimeArrow::Backward;
    else throw ConfigError("numerics.arrow: expected \"forward\" or \"backward\"");
    if (n.method != "verlet" && n.method != "modes") throw ConfigError("numerics.method: expected verlet or modes");
    if (n.epsilon < 0.0) throw ConfigError("numerics.epsilon must be non-negative");
    if (!(n.hbar > 0.0)) throw ConfigError("numerics.hbar must be positive");
    if (!(n.omega_max > 0.0)) throw ConfigError("numerics.omega_max must be positive");
    if (n.n_frequency < 2 || n.n_frequency % 2 != 0) throw ConfigError("numerics.n_frequency must be even");
    if (n.substeps < 1) throw ConfigError("numerics.substeps must be >= 1");
    return n;
}

inline Output parse_output(const json& j) {
    only_keys(j, "output", {"dir", "prefix", "svg"});
    Output o;
    o.dir = get<std::string>(j, "output", "dir", o.dir);
    o.prefix = get<std::string>(j, "output", "prefix", o.prefix);
    o.svg = get(j, "output", "svg", o.svg);
    return o;
}

} // namespace detail

inline json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON at " + detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                          e.what());
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str());
}

// Parses a command-line override value: JSON when it parses, otherwise a string.
inline json override_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text);
    }
}

// Sets `dotted` (e.g. "numerics.epsilon" or "bath.modes.0.g") inside j.
inline void apply_override(json& j, const std::string& dotted, const json& value) {
    std::vector<std::string> parts;
    std::stringstream ss(dotted);
    for (std::string p; std::getline(ss, p, '.');) {
        if (p.empty()) throw ConfigError("override path \"" + dotted + "\" has an empty component");
        parts.push_back(p);
    }
    if (parts.empty()) throw ConfigError("empty override path");
    json* node = &j;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const bool last = i + 1 == parts.size();
        const auto& key = parts[i];
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(key);
            } catch (const std::exception&) {
                throw ConfigError("override \"" + dotted + "\": \"" + key + "\" is not an array index");
            }
            if (idx >= node->size()) throw ConfigError("override \"" + dotted + "\": index out of range");
            node = &(*node)[idx];
        } else {
            if (node->is_null()) *node = json::object();
            if (!node->is_object()) throw ConfigError("override \"" + dotted + "\": cannot descend into a value");
            node = &(*node)[key];
        }
        if (last) *node = value;
    }
}

inline RunConfig parse_config(const json& j) {
    detail::only_keys(j, "config", {"system", "bath", "source", "grid", "window", "numerics", "output"});
    RunConfig c;
    if (j.contains("system")) c.system = detail::parse_system(j.at("system"));
    if (j.contains("bath") && !j.at("bath").is_null()) c.bath = detail::parse_bath(j.at("bath"));
    if (j.contains("source")) c.source = detail::parse_source(j.at("source"));
    if (j.contains("grid")) c.grid = detail::parse_grid(j.at("grid"));
    if (j.contains("window")) c.window = detail::parse_window(j.at("window"));
    if (j.contains("numerics")) c.numerics = detail::parse_numerics(j.at("numerics"));
    if (j.contains("output")) c.output = detail::parse_output(j.at("output"));
    try {
        c.system.validate();
        if (c.bath) std::visit([](const auto& b) { b.validate(); }, *c.bath);
        c.source.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return c;
}

} // namespace tarrow::config
