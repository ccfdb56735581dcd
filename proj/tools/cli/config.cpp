// Copyright 2026 The nla-weaksim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

namespace nla::cli {

namespace {

constexpr std::uint64_t kDefaultShots = 1000000;
constexpr std::uint64_t kCurveStride = 0x9E3779B97F4A7C15ULL;

double parse_double(std::string_view text) {
    std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("not a finite number: '" + s + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

template <class E, std::size_t N>
E lookup(std::string_view s, const std::pair<const char*, E> (&table)[N], const char* what) {
    for (const auto& [name, value] : table) {
        if (s == name) return value;
    }
    std::string msg = std::string("unknown ") + what + " '" + std::string(s) + "' (expected";
    for (std::size_t i = 0; i < N; ++i) msg += std::string(i ? ", " : " ") + table[i].first;
    throw ConfigError(msg + ")");
}

template <class E, std::size_t N>
std::string name_of(E value, const std::pair<const char*, E> (&table)[N]) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

constexpr std::pair<const char*, Command> kCommands[] = {{"protocol", Command::protocol},
                                                         {"gain-sweep", Command::gain_sweep},
                                                         {"gain-vs-phi", Command::gain_vs_phi},
                                                         {"visibility", Command::visibility}};
constexpr std::pair<const char*, GateKind> kGates[] = {{"ideal", GateKind::ideal}, {"ppbs", GateKind::ppbs}};
constexpr std::pair<const char*, SignalKind> kSignals[] = {{"coherent", SignalKind::coherent},
                                                           {"phase-averaged", SignalKind::phase_averaged},
                                                           {"qubit", SignalKind::qubit_truncated},
                                                           {"single-photon", SignalKind::single_photon}};
constexpr std::pair<const char*, HeraldRule> kHeralds[] = {{"coincidence", HeraldRule::coincidence_basis},
                                                           {"physical", HeraldRule::meter_detection}};
constexpr std::pair<const char*, MeasurementConvention> kConventions[] = {
    {"through-gate", MeasurementConvention::through_gate_reference},
    {"true-input", MeasurementConvention::true_input}};
constexpr std::pair<const char*, OutputFormat> kFormats[] = {
    {"csv", OutputFormat::csv}, {"json", OutputFormat::json}, {"svg", OutputFormat::svg}};

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
        out.reset();
    } else {
        out = j.at(key).get<T>();
    }
}

template <class T>
void read_value(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SimulationOptions RunConfig::simulation_options() const {
    SimulationOptions o;
    o.signal_cap = cap;
    o.herald = herald;
    o.truncation_bound = truncation_bound;
    o.max_basis_states = max_basis_states;
    return o;
}

CountingModel RunConfig::counting(std::uint64_t stream_offset) const {
    CountingModel c;
    c.shots = shots.value_or(0);
    c.seed = seed.value_or(0) + stream_offset * kCurveStride;
    c.rate_scale = rate_scale;
    return c;
}

std::optional<HeraldingModel> RunConfig::herald_model() const {
    if (!epsilon) return std::nullopt;
    return HeraldingModel{*epsilon};
}

void RunConfig::validate() const {
    if (gain && phi) throw ConfigError("--gain and --phi are mutually exclusive");
    if (gain && !(*gain >= 0.0)) throw ConfigError("--gain must be >= 0");
    for (double g : gains) {
        if (!(g >= 0.0)) throw ConfigError("gain settings must be >= 0");
    }
    if (!(alpha2 >= 0.0)) throw ConfigError("--alpha2 must be >= 0");
    for (double x : inputs) {
        if (!(x >= 0.0)) throw ConfigError("--inputs values must be >= 0");
    }
    for (double p : phis) {
        if (!(p > 0.0 && p <= std::numbers::pi + 1e-12)) throw ConfigError("--phis values must lie in (0, pi]");
    }
    if (command == Command::visibility && phases.size() < 3) throw ConfigError("--phases needs at least 3 points");
    if (!(input_magnitude > 0.0)) throw ConfigError("--magnitude must be > 0");
    if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) throw ConfigError("--epsilon must lie in (0, 1]");
    if (shots.value_or(0) > 0 && !seed) throw ConfigError("--seed is required when --shots > 0");
    if (!(rate_scale > 0.0)) throw ConfigError("--rate-scale must be > 0");
    if (cap < 1) throw ConfigError("--cap must be >= 1");
    if (!(truncation_bound > 0.0 && truncation_bound < 1.0)) throw ConfigError("truncation bound must lie in (0, 1)");
    if (max_basis_states == 0) throw ConfigError("basis limit must be > 0");
    if (bias && !(*bias >= 0.0)) throw ConfigError("--bias must be >= 0");
    if (command == Command::protocol && format && *format != OutputFormat::json) {
        throw ConfigError("protocol only writes json");
    }
    if (command == Command::gain_vs_phi && (gain || phi)) {
        throw ConfigError("gain-vs-phi takes its operating points from --phis");
    }
}

std::vector<double> parse_grid(std::string_view text) {
    if (text.find(':') == std::string_view::npos) {
        std::vector<double> values;
        for (auto part : split(text, ',')) values.push_back(parse_double(part));
        return values;
    }
    auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid must look like min:max:logN or min:max:linN");
    const double lo = parse_double(parts[0]);
    const double hi = parse_double(parts[1]);
    std::string_view spec = parts[2];
    bool log_spacing;
    if (spec.substr(0, 3) == "log") {
        log_spacing = true;
    } else if (spec.substr(0, 3) == "lin") {
        log_spacing = false;
    } else {
        throw ConfigError("grid spacing must be logN or linN");
    }
    const double nd = parse_double(spec.substr(3));
    if (nd < 1 || nd != std::floor(nd) || nd > 1e6) throw ConfigError("grid point count must be a positive integer");
    const int n = static_cast<int>(nd);
    if (hi < lo) throw ConfigError("grid max must be >= min");
    if (log_spacing && !(lo > 0.0)) throw ConfigError("log grid needs min > 0");
    if (n == 1) {
        if (lo != hi) throw ConfigError("a one-point grid needs min == max");
        return {lo};
    }

    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        values[static_cast<std::size_t>(i)] =
            log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    }
    values.front() = lo;
    values.back() = hi;
    return values;
}

std::vector<double> phase_grid(int n) {
    if (n < 1) throw ConfigError("phase count must be positive");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / n;
    return v;
}

std::string to_string(Command c) { return name_of(c, kCommands); }
std::string to_string(GateKind g) { return name_of(g, kGates); }
std::string to_string(SignalKind k) { return name_of(k, kSignals); }
std::string to_string(HeraldRule h) { return name_of(h, kHeralds); }
std::string to_string(MeasurementConvention c) { return name_of(c, kConventions); }
std::string to_string(OutputFormat f) { return name_of(f, kFormats); }

Command parse_command(std::string_view s) { return lookup(s, kCommands, "command"); }
GateKind parse_gate(std::string_view s) { return lookup(s, kGates, "gate"); }
SignalKind parse_signal(std::string_view s) { return lookup(s, kSignals, "signal"); }
HeraldRule parse_herald(std::string_view s) { return lookup(s, kHeralds, "herald rule"); }
MeasurementConvention parse_convention(std::string_view s) { return lookup(s, kConventions, "convention"); }
OutputFormat parse_format(std::string_view s) { return lookup(s, kFormats, "format"); }

nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["command"] = to_string(c.command);
    j["gate"] = to_string(c.gate);
    j["gain"] = optional_json(c.gain);
    j["phi"] = optional_json(c.phi);
    j["gains"] = c.gains;
    j["alpha2"] = c.alpha2;
    j["theta"] = c.theta;
    j["signal"] = c.signal ? nlohmann::json(to_string(*c.signal)) : nlohmann::json(nullptr);
    j["inputs"] = c.inputs;
    j["phis"] = c.phis;
    j["phases"] = c.phases;
    j["magnitude"] = c.input_magnitude;
    j["epsilon"] = optional_json(c.epsilon);
    j["shots"] = optional_json(c.shots);
    j["seed"] = optional_json(c.seed);
    j["rate_scale"] = c.rate_scale;
    j["herald"] = to_string(c.herald);
    j["convention"] = to_string(c.convention);
    j["cap"] = c.cap;
    j["truncation_bound"] = c.truncation_bound;
    j["max_basis_states"] = c.max_basis_states;
    j["calibrate"] = c.calibrate;
    j["bias"] = optional_json(c.bias);
    j["format"] = c.format ? nlohmann::json(to_string(*c.format)) : nlohmann::json(nullptr);
    return j;
}

void apply_json(const nlohmann::json& input, RunConfig& c) {
    const nlohmann::json& j = input.contains("config") ? input.at("config") : input;
    if (!j.is_object()) throw ConfigError("config json must be an object");
    try {
        if (j.contains("schema") && j.at("schema") != kSchema) throw ConfigError("unsupported config schema");
        if (input.contains("schema") && input.at("schema") != kSchema) throw ConfigError("unsupported config schema");
        if (j.contains("command") && parse_command(j.at("command").get<std::string>()) != c.command) {
            throw ConfigError("config was written by a different command");
        }
        if (j.contains("gate")) c.gate = parse_gate(j.at("gate").get<std::string>());
        read_optional(j, "gain", c.gain);
        read_optional(j, "phi", c.phi);
        read_value(j, "gains", c.gains);
        read_value(j, "alpha2", c.alpha2);
        read_value(j, "theta", c.theta);
        if (j.contains("signal")) {
            if (j.at("signal").is_null()) {
                c.signal.reset();
            } else {
                c.signal = parse_signal(j.at("signal").get<std::string>());
            }
        }
        read_value(j, "inputs", c.inputs);
        read_value(j, "phis", c.phis);
        read_value(j, "phases", c.phases);
        read_value(j, "magnitude", c.input_magnitude);
        read_optional(j, "epsilon", c.epsilon);
        read_optional(j, "shots", c.shots);
        read_optional(j, "seed", c.seed);
        read_value(j, "rate_scale", c.rate_scale);
        if (j.contains("herald")) c.herald = parse_herald(j.at("herald").get<std::string>());
        if (j.contains("convention")) c.convention = parse_convention(j.at("convention").get<std::string>());
        read_value(j, "cap", c.cap);
        read_value(j, "truncation_bound", c.truncation_bound);
        read_value(j, "max_basis_states", c.max_basis_states);
        read_value(j, "calibrate", c.calibrate);
        read_optional(j, "bias", c.bias);
        if (j.contains("format")) {
            if (j.at("format").is_null()) {
                c.format.reset();
            } else {
                c.format = parse_format(j.at("format").get<std::string>());
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config json: ") + e.what());
    }
}

void apply_environment(RunConfig& c) {
    if (const char* v = std::getenv("NLA_WEAKSIM_MAX_BASIS"); v && *v) {
        const double n = parse_double(v);
        if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("NLA_WEAKSIM_MAX_BASIS must be a positive integer");
        c.max_basis_states = static_cast<std::size_t>(n);
    }
    if (const char* v = std::getenv("NLA_WEAKSIM_TRUNCATION_BOUND"); v && *v) {
        c.truncation_bound = parse_double(v);
    }
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("NLA_WEAKSIM_OUTPUT_DIR");
    std::filesystem::path p(path);
    if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
    return p.string();
}

void resolve_defaults(RunConfig& c) {
    if (!c.signal) c.signal = c.command == Command::protocol ? SignalKind::coherent : SignalKind::phase_averaged;
    if (!c.format) c.format = c.command == Command::protocol ? OutputFormat::json : OutputFormat::csv;
    if (!c.shots) c.shots = c.seed ? kDefaultShots : 0;

    auto point_gain = [&]() -> std::optional<double> {
        if (c.gain) return *c.gain;
        if (c.phi) return analytic({*c.phi}, 0.0).g2;
        return std::nullopt;
    };

    switch (c.command) {
        case Command::protocol:
            if (!c.gain && !c.phi) throw ConfigError("protocol needs --gain or --phi");
            break;
        case Command::gain_sweep:
            if (auto g = point_gain()) {
                c.gains = {*g};
            } else if (c.gains.empty()) {
                c.gains = {3.0 / std::numbers::sqrt2, 3.0, 6.0};
            }
            if (c.inputs.empty()) c.inputs = parse_grid("1e-5:1e-3:log11");
            break;
        case Command::gain_vs_phi:
            if (c.inputs.empty()) c.inputs = {0.0006, 0.0012};
            if (c.phis.empty()) {
                for (int k = 1; k <= 12; ++k) c.phis.push_back(std::numbers::pi * k / 12.0);
            }
            break;
        case Command::visibility:
            if (auto g = point_gain()) {
                c.gains = {*g};
            } else if (c.gains.empty()) {
                c.gains = {2.0, 3.0, 4.0, 5.0};
            }
            if (c.phases.empty()) c.phases = phase_grid(16);
            break;
    }
}

}  // namespace nla::cli
