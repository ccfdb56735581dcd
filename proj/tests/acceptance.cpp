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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "nla/elements.hpp"
#include "nla/experiment.hpp"
#include "nla/fock.hpp"
#include "nla/protocol.hpp"
#include "oracles.hpp"

using namespace nla;

namespace {

constexpr double kPi = std::numbers::pi;

struct Result {
    bool pass = true;
    std::string detail;
};

void require(Result& r, bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
void require(Result& r, bool ok, const char* fmt, ...) {
    if (ok) return;
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    r.pass = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += buf;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<double> kPhiGrid = {kPi / 6.0, kPi / 4.0, kPi / 3.0, kPi / 2.0, 2.0 * kPi / 3.0};

const NlaSimulator& ppbs_sim() {
    static const NlaSimulator sim(GateKind::ppbs);
    return sim;
}

const NlaSimulator& ideal_sim() {
    static const NlaSimulator sim(GateKind::ideal);
    return sim;
}

Result cz_construction() {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    const ModeLayout layout;
    const ModeTransform circuit = compose(ppbs_cz_circuit(layout));
    auto basis = build_basis(layout.all_modes(), 2);
    const FockOperator op = lift_mode_transform(circuit, basis);
    double worst_success = 0.0;
    for (int s = 0; s < 2; ++s) {
        for (int m = 0; m < 2; ++m) {
            auto occ = [&](int sv, int mv) {
                Occupation o(basis->modes().size(), 0);
                o[static_cast<std::size_t>(basis->position_of(sv ? layout.signal.v : layout.signal.h))] = 1;
                o[static_cast<std::size_t>(basis->position_of(mv ? layout.meter.v : layout.meter.h))] = 1;
                return o;
            };
            StateVector out = apply(op, StateVector::basis_state(basis, occ(s, m)));
            const double sign = (s == 1 && m == 1) ? -1.0 : 1.0;
            double success = 0.0;
            for (int s2 = 0; s2 < 2; ++s2) {
                for (int m2 = 0; m2 < 2; ++m2) {
                    const Complex want = (s2 == s && m2 == m) ? Complex(sign / 3.0) : Complex(0.0);
                    const Complex amp = out.amplitude(occ(s2, m2));
                    success += std::norm(amp);
                    const double err = std::abs(amp - want);
                    require(r, err <= 1e-12, "amplitude |%d%d> -> |%d%d> off by %.3g", s, m, s2, m2, err);
                }
            }
            const double dev = std::abs(success - 1.0 / 9.0);
            worst_success = std::max(worst_success, dev);
            require(r, dev <= 1e-12, "success for |%d%d> is %.15g", s, m, success);
        }
    }
    const double t = seconds_since(t0);
    require(r, t < 1.0, "runtime %.3f s", t);
    char buf[96];
    std::snprintf(buf, sizeof buf, "success 1/9 within %.2e, %.3f s", worst_success, t);
    if (r.pass) r.detail = buf;
    return r;
}

Result gain_law() {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    GainPhiSweep s = gain_vs_phi(ppbs_sim(), 1e-6, kPhiGrid);
    double worst = 0.0;
    for (const auto& row : s.rows) {
        const double want = std::pow(1.0 / std::tan(row.phi / 2.0), 2);
        const double err = std::abs(row.gain_ideal - want);
        worst = std::max(worst, err);
        require(r, err <= 1e-9, "phi %.4f gain %.12g vs %.12g", row.phi, row.gain_ideal, want);
    }
    require(r, std::abs(s.rows[2].gain_ideal - 3.0) <= 1e-9, "pi/3 gives %.12g", s.rows[2].gain_ideal);
    require(r, std::abs(s.rows[3].gain_ideal - 1.0) <= 1e-9, "pi/2 gives %.12g", s.rows[3].gain_ideal);
    const double t = seconds_since(t0);
    require(r, t < 10.0, "runtime %.3f s", t);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max deviation %.2e, %.3f s", worst, t);
    if (r.pass) r.detail = buf;
    return r;
}

Result nondeterministic_scaling() {
    Result r;
    double worst = 0.0;
    for (double phi : kPhiGrid) {
        ProtocolOutcome out = ppbs_sim().run(SignalSpec::phase_averaged(std::sqrt(1e-6)), {phi});
        const double ratio = out.state_size_out / out.state_size_in;
        const double want = std::pow(1.0 / std::tan(phi / 2.0), 2) / 3.0;
        worst = std::max(worst, std::abs(ratio - want));
        require(r, std::abs(ratio - want) <= 1e-9, "phi %.4f ratio %.12g vs %.12g", phi, ratio, want);
    }
    if (r.pass) r.detail = "max deviation " + sci(worst);
    return r;
}

Result success_probability() {
    Result r;
    double worst = 0.0;
    for (double phi : kPhiGrid) {
        for (double a2 : {1e-6, 1e-5, 1e-4, 1e-3}) {
            const Complex a(std::sqrt(a2), 0.0);
            const AnalyticPrediction pred = analytic({phi}, a);
            ProtocolOutcome out = ppbs_sim().run(SignalSpec::qubit(a), {phi});
            const double e = rel(out.herald_probability, pred.p_success);
            worst = std::max(worst, e);
            require(r, e <= 1e-6, "phi %.4f a2 %.0e herald %.12g vs %.12g", phi, a2, out.herald_probability,
                    pred.p_success);
        }
        const AnalyticPrediction p = analytic({phi}, 0.0);
        const double identity = 1.0 / (1.0 + 3.0 * p.g2_nondet);
        const double sin2 = std::pow(std::sin(phi / 2.0), 2);
        require(r, std::abs(identity - sin2) <= 1e-12, "identity at phi %.4f: %.15g vs %.15g", phi, identity, sin2);
    }
    if (r.pass) r.detail = "max relative deviation " + sci(worst);
    return r;
}

Result input_convention() {
    Result r;
    double worst = 0.0;
    for (double p : {1e-6, 1e-5, 1e-4, 1e-3}) {
        const SignalSpec s = SignalSpec::phase_averaged(std::sqrt(p));
        const double truth = measure_input_size(ppbs_sim(), s, MeasurementConvention::true_input).size;
        const double through = measure_input_size(ppbs_sim(), s, MeasurementConvention::through_gate_reference).size;
        const double e = rel(through, truth / 3.0);
        worst = std::max(worst, e);
        require(r, e <= 1e-6, "p %.0e through %.12g vs %.12g", p, through, truth / 3.0);
    }
    if (r.pass) r.detail = "max relative deviation " + sci(worst);
    return r;
}

Result linearity() {
    Result r;
    std::vector<double> inputs(11);
    for (std::size_t i = 0; i < inputs.size(); ++i) inputs[i] = 1e-5 * std::pow(100.0, static_cast<double>(i) / 10.0);
    const double epsilon = 0.35;
    std::string summary;
    for (double g2 : {3.0 / std::sqrt(2.0), 3.0, 6.0}) {
        GainSweep ideal = gain_sweep(ppbs_sim(), g2, inputs);
        std::vector<double> x, y;
        for (const auto& row : ideal.rows) {
            x.push_back(row.input_measured);
            y.push_back(row.output_ideal);
        }
        const LineFit fit = fit_line(x, y);
        require(r, rel(fit.slope, g2) <= 0.01, "gain %.3f slope %.6g", g2, fit.slope);
        require(r, fit.r_squared > 0.9999, "gain %.3f R^2 %.8f", g2, fit.r_squared);

        SweepOptions o;
        o.herald_model = HeraldingModel{epsilon};
        GainSweep model = gain_sweep(ppbs_sim(), g2, inputs, o);
        for (std::size_t i = 0; i < model.rows.size(); ++i) {
            const auto& row = model.rows[i];
            require(r, row.output_model <= epsilon, "gain %.3f output %.6g above epsilon", g2, row.output_model);
            if (i > 0) {
                require(r, row.output_model > model.rows[i - 1].output_model, "gain %.3f output not monotone at %zu",
                        g2, i);
            }
            if (row.output_ideal < 0.01 * epsilon) {
                require(r, rel(row.output_model, row.output_ideal) <= 0.01, "gain %.3f model %.6g vs ideal %.6g", g2,
                        row.output_model, row.output_ideal);
            }
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%sslope %.4f (R^2 %.7f)", summary.empty() ? "" : ", ", fit.slope,
                      fit.r_squared);
        summary += buf;
    }
    if (r.pass) r.detail = summary;
    return r;
}

Result saturation_ordering() {
    Result r;
    SweepOptions o;
    o.herald_model = HeraldingModel{0.35};
    std::vector<double> phis;
    for (int k = 1; k <= 12; ++k) phis.push_back(k * kPi / 12.0);
    auto max_gain = [&](double input) {
        GainPhiSweep s = gain_vs_phi(ppbs_sim(), input, phis, o);
        double best = 0.0;
        for (const auto& row : s.rows) {
            if (!row.flagged) best = std::max(best, row.gain_model);
        }
        return best;
    };
    const double low = max_gain(0.0006);
    const double high = max_gain(0.0012);
    require(r, high < low, "max gain %.6g at 0.0012 vs %.6g at 0.0006", high, low);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max gain %.3f at 0.0006, %.3f at 0.0012", low, high);
    if (r.pass) r.detail = buf;
    return r;
}

Result visibility() {
    Result r;
    const double bounds[] = {0.71, 0.58, 0.50, 0.45};
    const double measured[] = {0.94, 0.99, 1.00, 0.95};
    std::vector<double> phases(16);
    for (std::size_t k = 0; k < phases.size(); ++k) phases[k] = 2.0 * kPi * static_cast<double>(k) / 16.0;
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double g2 = 2.0 + i;
        FringeScan scan = visibility_experiment(ideal_sim(), g2, 0.0015, phases);
        require(r, scan.fit.ok, "gain %.0f fit failed", g2);
        const double dev = std::abs(scan.fit.visibility - 1.0);
        worst = std::max(worst, dev);
        require(r, dev <= 1e-6, "gain %.0f visibility %.9f", g2, scan.fit.visibility);
        char emitted[16], stored[16];
        std::snprintf(emitted, sizeof emitted, "%.2f", scan.classical_bound);
        std::snprintf(stored, sizeof stored, "%.2f", bounds[i]);
        require(r, std::string(emitted) == stored, "gain %.0f bound %s vs %s", g2, emitted, stored);
        require(r, measured[i] > scan.classical_bound, "gain %.0f measured %.2f below bound %.3f", g2, measured[i],
                scan.classical_bound);
    }
    if (r.pass) r.detail = "max |V - 1| " + sci(worst) + ", bounds 0.71 0.58 0.50 0.45";
    return r;
}

Result phase_insensitivity() {
    Result r;
    const double mag = 0.03;
    double worst = 0.0;
    for (const NlaSimulator* sim : {&ideal_sim(), &ppbs_sim()}) {
        for (double phi : kPhiGrid) {
            ProtocolOutcome base = sim->run(SignalSpec::coherent(mag), {phi});
            for (int k = 1; k < 8; ++k) {
                ProtocolOutcome o = sim->run(SignalSpec::coherent(std::polar(mag, 0.8 * k)), {phi});
                const double d = std::max(std::abs(o.p1_out - base.p1_out),
                                          std::abs(o.herald_probability - base.herald_probability));
                worst = std::max(worst, d);
                require(r, d <= 1e-12, "phi %.4f theta %.1f deviation %.3g", phi, 0.8 * k, d);
            }
        }
        const int points = 32;
        for (double phi : {kPi / 3.0, kPi / 2.0}) {
            ProtocolOutcome avg = sim->run(SignalSpec::phase_averaged(mag), {phi});
            double herald = 0.0;
            Eigen::MatrixXcd weighted = Eigen::MatrixXcd::Zero(avg.conditional_state->matrix().rows(),
                                                               avg.conditional_state->matrix().cols());
            for (int k = 0; k < points; ++k) {
                ProtocolOutcome c = sim->run(SignalSpec::coherent(std::polar(mag, 2.0 * kPi * k / points)), {phi});
                herald += c.herald_probability / points;
                weighted += c.conditional_state->matrix() * (c.herald_probability / points);
            }
            const double dh = std::abs(avg.herald_probability - herald);
            const double drho = (avg.conditional_state->matrix() - weighted / herald).cwiseAbs().maxCoeff();
            require(r, dh <= 1e-9 && drho <= 1e-9, "phase average phi %.4f: herald %.3g state %.3g", phi, dh, drho);
        }
    }
    if (r.pass) r.detail = "max coherent-run deviation " + sci(worst);
    return r;
}

Result counting_statistics() {
    Result r;
    auto run = [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err);
        return std::make_pair(code, out.str());
    };
    const std::vector<std::vector<std::string>> commands = {
        {"gain-sweep", "--seed", "2026", "--shots", "1000000", "--epsilon", "0.35"},
        {"gain-vs-phi", "--seed", "2026", "--shots", "1000000", "--epsilon", "0.35"},
        {"visibility", "--seed", "2026", "--shots", "100000000"},
    };
    for (const auto& args : commands) {
        auto a = run(args);
        auto b = run(args);
        require(r, a.first == 0 && b.first == 0, "%s exit %d/%d", args[0].c_str(), a.first, b.first);
        require(r, !a.second.empty() && a.second == b.second, "%s output differs between runs", args[0].c_str());
    }

    SweepOptions o;
    o.counting = CountingModel{1000000, 2026, 1.0};
    const std::vector<double> phis = {3.0, 2.6, 2.2, 1.8, 1.4, 1.0, 0.7, 0.5, 0.3};
    GainPhiSweep s = gain_vs_phi(ppbs_sim(), 0.0012, phis, o);
    for (std::size_t i = 1; i < s.rows.size(); ++i) {
        const bool ok = s.rows[i].sampled && s.rows[i - 1].sampled &&
                        s.rows[i].sampled->gain_error > s.rows[i - 1].sampled->gain_error;
        require(r, ok, "gain error not increasing at phi %.2f", phis[i]);
    }
    if (r.pass && s.rows.front().sampled && s.rows.back().sampled) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "gain error %.3g at phi 3.0 -> %.3g at phi 0.3",
                      s.rows.front().sampled->gain_error, s.rows.back().sampled->gain_error);
        r.detail = buf;
    }
    return r;
}

Result oracle_equivalence() {
    Result r;
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        for (int modes = 1; modes <= 3; ++modes) {
            Eigen::MatrixXcd u = oracle::haar_unitary(modes, rng);
            auto basis = build_basis(modes, 3);
            std::vector<ModeId> ids(static_cast<std::size_t>(modes));
            std::iota(ids.begin(), ids.end(), 0);
            const FockOperator op = lift_mode_transform(ModeTransform(u, ids, TransformKind::unitary), basis);
            for (std::size_t col = 0; col < basis->size(); ++col) {
                const auto expected = oracle::expand_creation_operators(u, basis->state(col));
                for (std::size_t row = 0; row < basis->size(); ++row) {
                    auto it = expected.find(basis->state(row));
                    const Complex want = it == expected.end() ? Complex(0.0) : it->second;
                    const Complex got = op.matrix()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
                    worst = std::max(worst, std::abs(got - want));
                }
            }
        }
    }
    require(r, worst <= 1e-10, "max deviation %.3g", worst);
    if (r.pass) r.detail = "max deviation " + sci(worst);
    return r;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Result()> check;
    };
    const std::vector<Criterion> criteria = {
        {"CZ construction", cz_construction},
        {"gain law", gain_law},
        {"nondeterministic scaling", nondeterministic_scaling},
        {"success probability", success_probability},
        {"input-measurement convention", input_convention},
        {"linearity", linearity},
        {"saturation ordering", saturation_ordering},
        {"visibility", visibility},
        {"phase insensitivity", phase_insensitivity},
        {"counting statistics", counting_statistics},
        {"oracle equivalence", oracle_equivalence},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result res;
        try {
            res = criteria[i].check();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("exception: ") + e.what();
        }
        if (!res.pass) ++failures;
        std::printf("[%s] %2zu %s: %s\n", res.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, res.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
