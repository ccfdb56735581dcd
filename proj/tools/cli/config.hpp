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

#ifndef NLA_CLI_CONFIG_HPP
#define NLA_CLI_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nla/experiment.hpp"

namespace nla::cli {

inline constexpr const char* kSchema = "nla-weaksim/1";

/// Thrown for invalid or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class Command { protocol, gain_sweep, gain_vs_phi, visibility };
enum class OutputFormat { csv, json, svg };

struct RunConfig {
    Command command = Command::protocol;
    GateKind gate = GateKind::ppbs;
    /// Single operating point; at most one of the two is set.
    std::optional<double> gain;
    std::optional<double> phi;  // radians
    /// Gain settings for sweeps over several curves.
    std::vector<double> gains;
    double alpha2 = 1e-4;
    double theta = 0.0;  // input phase, radians
    /// Coherent for protocol, phase-averaged for sweeps when unset.
    std::optional<SignalKind> signal;
    std::vector<double> inputs;
    std::vector<double> phis;    // radians
    std::vector<double> phases;  // radians
    double input_magnitude = 0.0015;
    std::optional<double> epsilon;
    /// Defaults to 1e6 when a seed is given, otherwise 0 (no sampling).
    std::optional<std::uint64_t> shots;
    std::optional<std::uint64_t> seed;
    double rate_scale = 1.0;
    HeraldRule herald = HeraldRule::coincidence_basis;
    MeasurementConvention convention = MeasurementConvention::through_gate_reference;
    int cap = 3;
    double truncation_bound = 1e-3;
    std::size_t max_basis_states = kDefaultMaxBasisStates;
    bool calibrate = false;
    std::optional<double> bias;
    /// json for protocol, csv otherwise when unset.
    std::optional<OutputFormat> format;
    std::string output;  // empty writes to stdout

    SimulationOptions simulation_options() const;
    CountingModel counting(std::uint64_t stream_offset = 0) const;
    std::optional<HeraldingModel> herald_model() const;
    void validate() const;
};

/// "min:max:logN" or "min:max:linN" (N points, endpoints included), or a
/// comma-separated list of values.
std::vector<double> parse_grid(std::string_view text);
/// N phases evenly spaced over [0, 2 pi).
std::vector<double> phase_grid(int n);

std::string to_string(Command c);
std::string to_string(GateKind g);
std::string to_string(SignalKind k);
std::string to_string(HeraldRule h);
std::string to_string(MeasurementConvention c);
std::string to_string(OutputFormat f);

Command parse_command(std::string_view s);
GateKind parse_gate(std::string_view s);
SignalKind parse_signal(std::string_view s);
HeraldRule parse_herald(std::string_view s);
MeasurementConvention parse_convention(std::string_view s);
OutputFormat parse_format(std::string_view s);

/// Fully resolved configuration; the output path is not included.
nlohmann::json to_json(const RunConfig& config);
/// Overlays the keys present in `j` (a config object or a full output
/// envelope) onto `config`.
void apply_json(const nlohmann::json& j, RunConfig& config);

/// Defaults taken from NLA_WEAKSIM_MAX_BASIS and NLA_WEAKSIM_TRUNCATION_BOUND.
void apply_environment(RunConfig& config);
/// Output path with NLA_WEAKSIM_OUTPUT_DIR prepended to relative paths.
std::string resolve_output_path(const std::string& path);

/// Fills command-specific defaults (gain sets, grids) and converts the single
/// --gain/--phi point into the sweep's gain list.
void resolve_defaults(RunConfig& config);

}  // namespace nla::cli

#endif  // NLA_CLI_CONFIG_HPP
