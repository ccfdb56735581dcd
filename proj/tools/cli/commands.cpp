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

#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "report.hpp"

namespace nla::cli {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string json_body(const RunConfig& c, json results) {
    json envelope;
    envelope["schema"] = kSchema;
    envelope["command"] = to_string(c.command);
    envelope["config"] = to_json(c);
    envelope["results"] = std::move(results);
    return envelope.dump(2) + "\n";
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json sampled_json(const std::optional<SampledGain>& s) {
    if (!s) return nullptr;
    return {{"input", number(s->input.value)},     {"input_err", number(s->input.error)},
            {"output", number(s->output.value)},   {"output_err", number(s->output.error)},
            {"gain", number(s->gain)},             {"gain_err", number(s->gain_error)},
            {"input_clicks", s->input.clicks},     {"input_heralds", s->input.heralds},
            {"output_clicks", s->output.clicks},   {"output_heralds", s->output.heralds}};
}

json density_json(const DensityOperator& rho) {
    json basis = json::array(), re = json::array(), im = json::array();
    const auto& b = rho.basis();
    for (std::size_t i = 0; i < b.size(); ++i) basis.push_back(b.state(i));
    for (Eigen::Index r = 0; r < rho.matrix().rows(); ++r) {
        json rr = json::array(), ii = json::array();
        for (Eigen::Index c = 0; c < rho.matrix().cols(); ++c) {
            rr.push_back(rho.matrix()(r, c).real());
            ii.push_back(rho.matrix()(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return {{"modes", b.modes()}, {"basis", std::move(basis)}, {"real", std::move(re)}, {"imag", std::move(im)}};
}

SweepOptions sweep_options(const RunConfig& c, std::uint64_t curve) {
    SweepOptions o;
    o.signal_kind = *c.signal;
    o.convention = c.convention;
    o.herald_model = c.herald_model();
    o.counting = c.counting(curve);
    return o;
}

CommandOutput run_protocol(const RunConfig& c) {
    NlaSimulator sim(c.gate, c.simulation_options());
    const MeterSetting meter = c.phi ? MeterSetting{*c.phi} : phi_for_gain(*c.gain);
    SignalSpec signal;
    signal.kind = *c.signal;
    signal.alpha = std::polar(std::sqrt(c.alpha2), c.theta);

    const ProtocolOutcome out = sim.run(signal, meter);
    const ProtocolOutcome ref = sim.reference(signal);
    const AnalyticPrediction a = analytic(meter, signal.alpha);
    const bool ideal = c.gate == GateKind::ideal;

    const double measured_in = ref.state_size_out;
    json r;
    r["phi"] = meter.phi;
    r["gain"] = number(measured_in > 0.0 && !out.zero_herald ? out.state_size_out / measured_in : kNaN);
    r["gain_true_input"] =
        number(out.state_size_in > 0.0 && !out.zero_herald ? out.state_size_out / out.state_size_in : kNaN);
    r["herald_probability"] = out.herald_probability;
    r["state_size_in"] = out.state_size_in;
    r["state_size_in_measured"] = measured_in;
    r["state_size_out"] = number(out.state_size_out);
    r["p1_in"] = out.p1_in;
    r["p0_out"] = out.p0_out;
    r["p1_out"] = out.p1_out;
    r["truncation_weight"] = out.truncation_weight;
    r["zero_herald"] = out.zero_herald;
    r["infinite_gain"] = out.infinite_gain || a.infinite_gain;
    if (out.amplitude_gain) {
        r["amplitude_gain"] = {{"re", out.amplitude_gain->real()}, {"im", out.amplitude_gain->imag()}};
    } else {
        r["amplitude_gain"] = nullptr;
    }
    r["conditional_state"] = out.conditional_state ? density_json(*out.conditional_state) : json(nullptr);

    json an;
    an["g"] = {{"re", number(a.g.real())}, {"im", number(a.g.imag())}};
    an["g2"] = number(a.g2);
    an["g2_nondet"] = number(a.g2_nondet);
    an["herald_probability"] = ideal ? a.p_success_ideal : a.p_success;
    an["p_success_nondet"] = a.p_success;
    an["p_success_nondet_out_norm"] = a.p_success_out_norm;
    an["p_success_ideal"] = a.p_success_ideal;
    an["state_size_out"] = number((ideal ? a.g2 : a.g2_nondet) * c.alpha2);
    r["analytic"] = std::move(an);

    const bool flagged = out.zero_herald || out.infinite_gain || a.infinite_gain;
    return {json_body(c, std::move(r)), flagged ? kExitNumerical : kExitOk};
}

CommandOutput run_gain_sweep(const RunConfig& c) {
    NlaSimulator sim(c.gate, c.simulation_options());
    const bool sampled = c.shots.value_or(0) > 0;
    std::vector<GainSweep> sweeps;
    bool flagged = false;
    for (std::size_t k = 0; k < c.gains.size(); ++k) {
        sweeps.push_back(gain_sweep(sim, c.gains[k], c.inputs, sweep_options(c, k)));
        for (const auto& row : sweeps.back().rows) flagged = flagged || row.flagged;
    }
    const int code = flagged ? kExitNumerical : kExitOk;

    switch (*c.format) {
        case OutputFormat::csv: {
            std::vector<std::string> header = {"nominal_gain", "phi",          "input_size",   "input_measured",
                                               "output_ideal", "output_model", "herald_prob", "gain_ideal",
                                               "gain_model"};
            if (sampled) {
                for (const char* h : {"input_sampled", "output_sampled", "gain_sampled", "input_err", "output_err",
                                      "gain_err"}) {
                    header.push_back(h);
                }
            }
            header.push_back("truncation_weight");
            header.push_back("flagged");
            CsvWriter csv(header);
            for (const auto& s : sweeps) {
                for (const auto& r : s.rows) {
                    csv.field(s.nominal_gain).field(s.phi).field(r.input_size).field(r.input_measured);
                    csv.field(r.output_ideal).field(r.output_model).field(r.herald_probability);
                    csv.field(r.gain_ideal).field(r.gain_model);
                    if (sampled) {
                        const auto& g = r.sampled;
                        csv.field(g ? g->input.value : kNaN).field(g ? g->output.value : kNaN);
                        csv.field(g ? g->gain : kNaN).field(g ? g->input.error : kNaN);
                        csv.field(g ? g->output.error : kNaN).field(g ? g->gain_error : kNaN);
                    }
                    csv.field(r.truncation_weight).field(r.flagged);
                    csv.end_row();
                }
            }
            return {csv.str(), code};
        }
        case OutputFormat::json: {
            json curves = json::array();
            for (const auto& s : sweeps) {
                json rows = json::array();
                for (const auto& r : s.rows) {
                    rows.push_back({{"input_size", r.input_size},
                                    {"input_measured", number(r.input_measured)},
                                    {"output_ideal", number(r.output_ideal)},
                                    {"output_model", number(r.output_model)},
                                    {"herald_prob", number(r.herald_probability)},
                                    {"gain_ideal", number(r.gain_ideal)},
                                    {"gain_model", number(r.gain_model)},
                                    {"sampled", sampled_json(r.sampled)},
                                    {"truncation_weight", number(r.truncation_weight)},
                                    {"flagged", r.flagged}});
                }
                curves.push_back({{"nominal_gain", s.nominal_gain}, {"phi", s.phi}, {"rows", std::move(rows)}});
            }
            return {json_body(c, {{"curves", std::move(curves)}}), code};
        }
        case OutputFormat::svg: {
            Plot plot{"Output vs input state size", "input state size (measured)", "output state size", {}};
            for (std::size_t k = 0; k < sweeps.size(); ++k) {
                const auto& s = sweeps[k];
                Series ideal{"|g|^2=" + format_number(s.nominal_gain) + " ideal", {}, {}, LineStyle::solid,
                             static_cast<int>(k)};
                Series model{"model", {}, {}, LineStyle::dashed, static_cast<int>(k)};
                Series points{"sampled", {}, {}, LineStyle::markers, static_cast<int>(k)};
                for (const auto& r : s.rows) {
                    ideal.x.push_back(r.input_measured);
                    ideal.y.push_back(r.output_ideal);
                    model.x.push_back(r.input_measured);
                    model.y.push_back(r.output_model);
                    if (r.sampled) {
                        points.x.push_back(r.sampled->input.value);
                        points.y.push_back(r.sampled->output.value);
                    }
                }
                plot.series.push_back(std::move(ideal));
                if (c.epsilon) plot.series.push_back(std::move(model));
                if (sampled) plot.series.push_back(std::move(points));
            }
            return {render_svg(plot), code};
        }
    }
    return {"", kExitInternal};
}

CommandOutput run_gain_vs_phi(const RunConfig& c) {
    NlaSimulator sim(c.gate, c.simulation_options());
    const bool sampled = c.shots.value_or(0) > 0;
    std::vector<GainPhiSweep> sweeps;
    bool flagged = false;
    for (std::size_t k = 0; k < c.inputs.size(); ++k) {
        sweeps.push_back(gain_vs_phi(sim, c.inputs[k], c.phis, sweep_options(c, k)));
        for (const auto& row : sweeps.back().rows) flagged = flagged || row.flagged;
    }
    const int code = flagged ? kExitNumerical : kExitOk;

    switch (*c.format) {
        case OutputFormat::csv: {
            std::vector<std::string> header = {"input_size",   "phi",          "gain_theory", "gain_ideal",
                                               "gain_model",   "output_ideal", "output_model", "herald_prob"};
            if (sampled) {
                header.push_back("gain_sampled");
                header.push_back("gain_err");
            }
            header.push_back("flagged");
            CsvWriter csv(header);
            for (const auto& s : sweeps) {
                for (const auto& r : s.rows) {
                    csv.field(s.input_size).field(r.phi).field(r.gain_theory).field(r.gain_ideal);
                    csv.field(r.gain_model).field(r.output_ideal).field(r.output_model).field(r.herald_probability);
                    if (sampled) {
                        csv.field(r.sampled ? r.sampled->gain : kNaN).field(r.sampled ? r.sampled->gain_error : kNaN);
                    }
                    csv.field(r.flagged);
                    csv.end_row();
                }
            }
            return {csv.str(), code};
        }
        case OutputFormat::json: {
            json curves = json::array();
            for (const auto& s : sweeps) {
                json rows = json::array();
                for (const auto& r : s.rows) {
                    rows.push_back({{"phi", r.phi},
                                    {"gain_theory", number(r.gain_theory)},
                                    {"gain_ideal", number(r.gain_ideal)},
                                    {"gain_model", number(r.gain_model)},
                                    {"input_measured", number(r.input_measured)},
                                    {"output_ideal", number(r.output_ideal)},
                                    {"output_model", number(r.output_model)},
                                    {"herald_prob", number(r.herald_probability)},
                                    {"sampled", sampled_json(r.sampled)},
                                    {"flagged", r.flagged}});
                }
                curves.push_back({{"input_size", s.input_size}, {"rows", std::move(rows)}});
            }
            return {json_body(c, {{"curves", std::move(curves)}}), code};
        }
        case OutputFormat::svg: {
            Plot plot{"Gain vs measurement strength", "phi (rad)", "intensity gain", {}};
            Series theory{"cot^2(phi/2)", {}, {}, LineStyle::solid, 5};
            for (const auto& r : sweeps.empty() ? std::vector<GainPhiRow>{} : sweeps.front().rows) {
                theory.x.push_back(r.phi);
                theory.y.push_back(r.gain_theory);
            }
            plot.series.push_back(std::move(theory));
            for (std::size_t k = 0; k < sweeps.size(); ++k) {
                const auto& s = sweeps[k];
                Series model{"|a'|^2=" + format_number(s.input_size) + " model", {}, {}, LineStyle::dashed,
                             static_cast<int>(k)};
                Series points{"|a'|^2=" + format_number(s.input_size), {}, {}, LineStyle::markers,
                              static_cast<int>(k)};
                for (const auto& r : s.rows) {
                    model.x.push_back(r.phi);
                    model.y.push_back(r.gain_model);
                    points.x.push_back(r.phi);
                    points.y.push_back(r.sampled ? r.sampled->gain : r.gain_ideal);
                }
                if (c.epsilon) plot.series.push_back(std::move(model));
                plot.series.push_back(std::move(points));
            }
            return {render_svg(plot), code};
        }
    }
    return {"", kExitInternal};
}

CommandOutput run_visibility(const RunConfig& c) {
    NlaSimulator sim(c.gate, c.simulation_options());
    const bool sampled = c.shots.value_or(0) > 0;
    std::vector<FringeScan> scans;
    std::vector<FringeFit> ideal_fits;
    bool flagged = false;
    for (std::size_t k = 0; k < c.gains.size(); ++k) {
        VisibilityOptions o;
        o.signal_kind = *c.signal;
        o.counting = c.counting();
        o.stream = k;
        o.calibrate = c.calibrate;
        o.bias_ratio = c.bias;
        scans.push_back(visibility_experiment(sim, c.gains[k], c.input_magnitude, c.phases, o));
        ideal_fits.push_back(scans.back().rates.empty() ? FringeFit{} : fit_fringe(c.phases, scans.back().rates));
        flagged = flagged || !ideal_fits.back().ok;
    }
    const int code = flagged ? kExitNumerical : kExitOk;

    switch (*c.format) {
        case OutputFormat::csv: {
            std::vector<std::string> header = {"gain_setting", "phi", "bias_ratio", "input_magnitude", "herald_prob",
                                               "visibility_ideal"};
            if (sampled) {
                header.push_back("visibility_sampled");
                header.push_back("visibility_err");
            }
            header.push_back("classical_bound");
            header.push_back("fit_ok");
            CsvWriter csv(header);
            for (std::size_t k = 0; k < scans.size(); ++k) {
                const auto& s = scans[k];
                csv.field(s.gain_setting).field(s.phi).field(s.bias_ratio).field(s.input_magnitude);
                csv.field(s.herald_probability).field(ideal_fits[k].ok ? ideal_fits[k].visibility : kNaN);
                if (sampled) {
                    csv.field(s.fit.ok ? s.fit.visibility : kNaN).field(s.fit.ok ? s.fit.visibility_error : kNaN);
                }
                csv.field(s.classical_bound).field(ideal_fits[k].ok);
                csv.end_row();
            }
            return {csv.str(), code};
        }
        case OutputFormat::json: {
            json out = json::array();
            for (std::size_t k = 0; k < scans.size(); ++k) {
                const auto& s = scans[k];
                json counts = json::array();
                for (const auto& cs : s.counts) {
                    counts.push_back({{"expected", cs.expected}, {"count", cs.count}, {"error", cs.error}});
                }
                json fit = {{"visibility", number(ideal_fits[k].visibility)},
                            {"offset", ideal_fits[k].offset},
                            {"amplitude", ideal_fits[k].amplitude},
                            {"phase", ideal_fits[k].phase},
                            {"ok", ideal_fits[k].ok}};
                json sfit = nullptr;
                if (sampled) {
                    sfit = {{"visibility", number(s.fit.visibility)},
                            {"visibility_err", number(s.fit.visibility_error)},
                            {"offset", s.fit.offset},
                            {"amplitude", s.fit.amplitude},
                            {"phase", s.fit.phase},
                            {"ok", s.fit.ok}};
                }
                out.push_back({{"gain_setting", s.gain_setting},
                               {"phi", s.phi},
                               {"bias_ratio", s.bias_ratio},
                               {"input_magnitude", s.input_magnitude},
                               {"herald_prob", s.herald_probability},
                               {"phases", s.phases},
                               {"rates", s.rates},
                               {"counts", std::move(counts)},
                               {"fit", std::move(fit)},
                               {"fit_sampled", std::move(sfit)},
                               {"classical_bound", number(s.classical_bound)}});
            }
            return {json_body(c, {{"scans", std::move(out)}}), code};
        }
        case OutputFormat::svg: {
            Plot plot{"Interference fringes", "analyser phase (rad)", "conditional rate", {}};
            for (std::size_t k = 0; k < scans.size(); ++k) {
                const auto& s = scans[k];
                const FringeFit& f = ideal_fits[k];
                Series curve{"|g|^2=" + format_number(s.gain_setting) + " fit", {}, {}, LineStyle::solid,
                             static_cast<int>(k)};
                for (int i = 0; i <= 64 && f.ok; ++i) {
                    const double t = 2.0 * std::numbers::pi * i / 64.0;
                    curve.x.push_back(t);
                    curve.y.push_back(f.offset + f.amplitude * std::cos(t - f.phase));
                }
                Series points{"simulated", {}, {}, LineStyle::markers, static_cast<int>(k)};
                for (std::size_t i = 0; i < s.rates.size(); ++i) {
                    points.x.push_back(s.phases[i]);
                    points.y.push_back(sampled ? s.counts[i].count / (s.counts[i].expected / s.rates[i])
                                               : s.rates[i]);
                }
                plot.series.push_back(std::move(curve));
                plot.series.push_back(std::move(points));
            }
            return {render_svg(plot), code};
        }
    }
    return {"", kExitInternal};
}

struct CommonArgs {
    std::optional<std::string> gate, signal, herald, convention, format, config_path;
    std::optional<double> epsilon, rate_scale, truncation_bound;
    std::optional<std::uint64_t> shots, seed, max_basis;
    std::optional<int> cap;
    std::optional<std::string> output;
    bool degrees = false;
};

struct PointArgs {
    std::optional<double> gain, phi;
};

struct SpecificArgs {
    std::optional<double> alpha2, theta, magnitude, bias;
    std::optional<std::string> gains, inputs, phis;
    std::optional<int> phases;
    bool calibrate = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
    app->add_option("--gate", a.gate, "CZ gate model: ideal | ppbs (default ppbs)");
    app->add_option("--signal", a.signal,
                    "Signal state: coherent | phase-averaged | qubit | single-photon "
                    "(default coherent for protocol, phase-averaged otherwise)");
    app->add_option("--epsilon", a.epsilon,
                    "Heralding efficiency for the saturation model (probability in (0, 1]; omitted: ideal only)");
    app->add_option("--shots", a.shots,
                    "Trials per point for Poisson sampling (count; default 1e6 when --seed is given, else 0)");
    app->add_option("--seed", a.seed, "Root seed for sampling (unsigned integer; required when --shots > 0)");
    app->add_option("--rate-scale", a.rate_scale, "Expected counts per unit probability per trial (default 1)");
    app->add_option("--herald", a.herald,
                    "Herald rule for the ppbs gate: coincidence | physical (default coincidence)");
    app->add_option("--convention", a.convention,
                    "Input size measurement: through-gate | true-input (default through-gate)");
    app->add_option("--cap", a.cap, "Photon-number cap of the signal (photons; default 3)");
    app->add_option("--truncation-bound", a.truncation_bound,
                    "Largest discarded Fock-tail probability (probability; default 1e-3)");
    app->add_option("--max-basis", a.max_basis, "Largest joint Fock basis allowed (states; default 250000)");
    app->add_option("-o,--output", a.output, "Output file (path; default stdout)");
    app->add_option("--format", a.format, "Output format: csv | json | svg");
    app->add_option("--config", a.config_path, "JSON config or previous JSON output to re-run (path)");
    app->add_flag("--degrees", a.degrees, "Read angle flags in degrees instead of radians");
}

void add_point(CLI::App* app, PointArgs& p) {
    app->add_option("--gain", p.gain, "Nominal intensity gain |g|^2 (dimensionless)");
    app->add_option("--phi", p.phi, "Meter angle phi (radians, or degrees with --degrees)");
}

RunConfig build_config(Command command, const CommonArgs& a, const PointArgs& p, const SpecificArgs& s) {
    RunConfig c;
    c.command = command;
    apply_environment(c);
    if (a.config_path) {
        std::ifstream in(*a.config_path);
        if (!in) throw ConfigError("cannot read config file '" + *a.config_path + "'");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config file is not valid json: ") + e.what());
        }
        apply_json(j, c);
    }

    const double angle = a.degrees ? std::numbers::pi / 180.0 : 1.0;
    if (a.gate) c.gate = parse_gate(*a.gate);
    if (a.signal) c.signal = parse_signal(*a.signal);
    if (a.epsilon) c.epsilon = a.epsilon;
    if (a.shots) c.shots = a.shots;
    if (a.seed) c.seed = a.seed;
    if (a.rate_scale) c.rate_scale = *a.rate_scale;
    if (a.herald) c.herald = parse_herald(*a.herald);
    if (a.convention) c.convention = parse_convention(*a.convention);
    if (a.cap) c.cap = *a.cap;
    if (a.truncation_bound) c.truncation_bound = *a.truncation_bound;
    if (a.max_basis) c.max_basis_states = static_cast<std::size_t>(*a.max_basis);
    if (a.format) c.format = parse_format(*a.format);
    if (a.output) c.output = *a.output;

    if (p.gain && p.phi) throw ConfigError("--gain and --phi are mutually exclusive");
    if (p.gain) {
        c.gain = p.gain;
        c.phi.reset();
    }
    if (p.phi) {
        c.phi = *p.phi * angle;
        c.gain.reset();
    }
    if (s.alpha2) c.alpha2 = *s.alpha2;
    if (s.theta) c.theta = *s.theta * angle;
    if (s.magnitude) c.input_magnitude = *s.magnitude;
    if (s.bias) c.bias = s.bias;
    if (s.calibrate) c.calibrate = true;
    if (s.gains) {
        c.gains = parse_grid(*s.gains);
        c.gain.reset();
        c.phi.reset();
    }
    if (s.inputs) c.inputs = parse_grid(*s.inputs);
    if (s.phis) {
        c.phis = parse_grid(*s.phis);
        for (double& v : c.phis) v *= angle;
    }
    if (s.phases) {
        if (*s.phases < 3) throw ConfigError("--phases needs at least 3 points");
        c.phases = phase_grid(*s.phases);
    }

    resolve_defaults(c);
    c.validate();
    return c;
}

}  // namespace

CommandOutput execute(const RunConfig& config) {
    switch (config.command) {
        case Command::protocol: return run_protocol(config);
        case Command::gain_sweep: return run_gain_sweep(config);
        case Command::gain_vs_phi: return run_gain_vs_phi(config);
        case Command::visibility: return run_visibility(config);
    }
    return {"", kExitInternal};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulates a heralded noiseless linear amplifier built from a weak measurement and a CZ gate."};
    app.name("nla-weaksim");
    app.require_subcommand(1);

    CommonArgs common[4];
    PointArgs point[4];
    SpecificArgs specific[4];

    CLI::App* protocol = app.add_subcommand("protocol", "Run one heralded amplification and report it as JSON");
    add_common(protocol, common[0]);
    add_point(protocol, point[0]);
    protocol->add_option("--alpha2", specific[0].alpha2, "Input state size |alpha'|^2 (mean photons; default 1e-4)");
    protocol->add_option("--theta", specific[0].theta, "Input phase (radians, or degrees with --degrees)");

    CLI::App* sweep = app.add_subcommand("gain-sweep", "Output vs input state size at fixed gain settings");
    add_common(sweep, common[1]);
    add_point(sweep, point[1]);
    sweep->add_option("--gains", specific[1].gains,
                      "Gain settings |g|^2 as a list or grid (default 3/sqrt(2),3,6)");
    sweep->add_option("--inputs", specific[1].inputs,
                      "Input sizes |alpha'|^2 (mean photons) as min:max:logN, min:max:linN or a list "
                      "(default 1e-5:1e-3:log11)");

    CLI::App* vs_phi = app.add_subcommand("gain-vs-phi", "Measured gain as a function of the meter angle");
    add_common(vs_phi, common[2]);
    vs_phi->add_option("--inputs", specific[2].inputs,
                       "Input sizes |alpha'|^2 (mean photons) as a list or grid (default 0.0006,0.0012)");
    vs_phi->add_option("--phis", specific[2].phis,
                       "Meter angles in (0, pi] (radians, or degrees with --degrees) as a list or grid "
                       "(default k*pi/12, k=1..12)");

    CLI::App* vis = app.add_subcommand("visibility", "Interference fringes of a biased H/V input after amplification");
    add_common(vis, common[3]);
    add_point(vis, point[3]);
    vis->add_option("--gains", specific[3].gains, "Gain settings |g|^2 as a list or grid (default 2,3,4,5)");
    vis->add_option("--magnitude", specific[3].magnitude, "Input amplitude |alpha'| (sqrt(photons); default 0.0015)");
    vis->add_option("--phases", specific[3].phases, "Analyser phase points over [0, 2 pi) (count; default 16)");
    vis->add_option("--bias", specific[3].bias, "H:V intensity ratio at the input (dimensionless; default |g|^2)");
    vis->add_flag("--calibrate", specific[3].calibrate, "Set the bias from the simulated gain instead of the nominal");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const CLI::App* chosen[] = {protocol, sweep, vs_phi, vis};
    const Command commands[] = {Command::protocol, Command::gain_sweep, Command::gain_vs_phi, Command::visibility};
    try {
        for (int i = 0; i < 4; ++i) {
            if (!chosen[i]->parsed()) continue;
            const RunConfig config = build_config(commands[i], common[i], point[i], specific[i]);
            const CommandOutput result = execute(config);
            if (config.output.empty()) {
                out << result.body;
            } else {
                const std::string path = resolve_output_path(config.output);
                std::ofstream file(path, std::ios::binary);
                if (!file) throw ConfigError("cannot write '" + path + "'");
                file << result.body;
                if (!file) throw ConfigError("failed writing '" + path + "'");
            }
            if (result.exit_code == kExitNumerical) {
                err << "warning: zero herald probability, infinite gain or truncation flag in results\n";
            }
            return result.exit_code;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::overflow_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace nla::cli
