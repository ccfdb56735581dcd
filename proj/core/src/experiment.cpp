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

#include "nla/experiment.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nla {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxExpectedCount = 1e15;

SignalSpec signal_of(SignalKind kind, double input_size) {
    SignalSpec s;
    s.kind = kind;
    s.alpha = std::sqrt(input_size);
    return s;
}

std::uint64_t poisson(double mean, std::mt19937_64& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("poisson: invalid mean");
    if (mean > kMaxExpectedCount) throw std::overflow_error("expected count too large to sample");
    if (mean == 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(rng);
}

double ratio(double num, double den) { return den > 0.0 ? num / den : kNaN; }

}  // namespace

void HeraldingModel::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("heralding efficiency must lie in (0, 1]");
}

SizeMeasurement measure_input_size(const NlaSimulator& sim, const SignalSpec& signal,
                                   MeasurementConvention convention) {
    if (convention == MeasurementConvention::true_input) {
        PreparedSignal prepared = prepare_signal(signal, sim.options());
        const ModeId sv = sim.options().layout.signal.v;
        double p0 = std::visit([&](const auto& s) { return occupancy_probability(s, sv, 0); }, prepared.state);
        double p1 = std::visit([&](const auto& s) { return occupancy_probability(s, sv, 1); }, prepared.state);
        return {p0 > 0.0 ? p1 / p0 : 0.0, p1, 1.0};
    }
    ProtocolOutcome ref = sim.reference(signal);
    return {ref.state_size_out, ref.p1_out, ref.herald_probability};
}

double apply_herald_model(double p1_ideal, const HeraldingModel& model) {
    model.validate();
    if (!(p1_ideal >= 0.0)) throw std::invalid_argument("apply_herald_model: probability must be >= 0");
    return p1_ideal / (1.0 + p1_ideal / model.epsilon);
}

std::mt19937_64 point_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

std::vector<CountSample> simulate_counts(std::span<const double> probabilities, const CountingModel& counting,
                                         std::uint64_t stream) {
    if (!counting.enabled()) throw std::invalid_argument("simulate_counts: shots must be > 0");
    std::mt19937_64 rng = point_rng(counting.seed, stream);
    std::vector<CountSample> out;
    out.reserve(probabilities.size());
    for (double p : probabilities) {
        CountSample s;
        s.expected = p * counting.rate_scale * static_cast<double>(counting.shots);
        s.count = poisson(s.expected, rng);
        s.error = std::sqrt(static_cast<double>(s.count));
        out.push_back(s);
    }
    return out;
}

SampledSize sample_size(double herald_probability, double size, const CountingModel& counting,
                        std::mt19937_64& rng) {
    const double heralds = herald_probability * counting.rate_scale * static_cast<double>(counting.shots);
    const double q = std::isfinite(size) ? size / (1.0 + size) : 1.0;
    const std::uint64_t clicks = poisson(heralds * q, rng);
    const std::uint64_t empty = poisson(heralds * (1.0 - q), rng);

    SampledSize s;
    s.clicks = clicks;
    s.heralds = clicks + empty;
    if (empty == 0) {
        s.value = clicks > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        return s;
    }
    s.value = static_cast<double>(clicks) / static_cast<double>(empty);
    if (clicks > 0) s.error = s.value * std::sqrt(1.0 / static_cast<double>(clicks) + 1.0 / static_cast<double>(empty));
    return s;
}

SampledGain combine_gain(const SampledSize& input, const SampledSize& output) {
    SampledGain g{input, output, kNaN, kNaN};
    if (input.value > 0.0 && std::isfinite(input.value) && std::isfinite(output.value)) {
        g.gain = output.value / input.value;
        const double ri = input.error / input.value;
        const double ro = output.value > 0.0 ? output.error / output.value : 0.0;
        g.gain_error = g.gain * std::sqrt(ri * ri + ro * ro);
    }
    return g;
}

GainSweep gain_sweep(const NlaSimulator& sim, double nominal_g2, std::span<const double> input_sizes,
                     const SweepOptions& options) {
    GainSweep sweep;
    sweep.nominal_gain = nominal_g2;
    const MeterSetting meter = phi_for_gain(nominal_g2);
    sweep.phi = meter.phi;

    for (std::size_t i = 0; i < input_sizes.size(); ++i) {
        GainSweepRow row;
        row.input_size = input_sizes[i];
        if (!(row.input_size >= 0.0)) throw std::invalid_argument("gain_sweep: input sizes must be >= 0");
        try {
            const SignalSpec signal = signal_of(options.signal_kind, row.input_size);
            const SizeMeasurement in = measure_input_size(sim, signal, options.convention);
            const ProtocolOutcome out = sim.run(signal, meter);
            row.input_measured = in.size;
            row.output_ideal = out.state_size_out;
            row.herald_probability = out.herald_probability;
            row.truncation_weight = out.truncation_weight;
            row.flagged = out.zero_herald || out.infinite_gain;

            double in_model = in.size;
            row.output_model = row.output_ideal;
            if (options.herald_model) {
                in_model = apply_herald_model(in.size, *options.herald_model);
                row.output_model = apply_herald_model(row.output_ideal, *options.herald_model);
            }
            row.gain_ideal = ratio(row.output_ideal, row.input_measured);
            row.gain_model = ratio(row.output_model, in_model);

            if (options.counting.enabled()) {
                std::mt19937_64 rng = point_rng(options.counting.seed, i);
                SampledSize si = sample_size(in.herald_probability, in_model, options.counting, rng);
                SampledSize so = sample_size(out.herald_probability, row.output_model, options.counting, rng);
                row.sampled = combine_gain(si, so);
            }
        } catch (const TruncationError&) {
            row.input_measured = row.output_ideal = row.output_model = kNaN;
            row.gain_ideal = row.gain_model = row.herald_probability = row.truncation_weight = kNaN;
            row.flagged = true;
        }
        sweep.rows.push_back(row);
    }
    return sweep;
}

GainPhiSweep gain_vs_phi(const NlaSimulator& sim, double input_size, std::span<const double> phis,
                         const SweepOptions& options) {
    GainPhiSweep sweep;
    sweep.input_size = input_size;
    const SignalSpec signal = signal_of(options.signal_kind, input_size);
    const SizeMeasurement in = measure_input_size(sim, signal, options.convention);
    const double in_model = options.herald_model ? apply_herald_model(in.size, *options.herald_model) : in.size;

    for (std::size_t i = 0; i < phis.size(); ++i) {
        GainPhiRow row;
        row.phi = phis[i];
        row.gain_theory = analytic({row.phi}, 0.0).g2;
        row.input_measured = in.size;
        const ProtocolOutcome out = sim.run(signal, {row.phi});
        row.herald_probability = out.herald_probability;
        row.flagged = out.zero_herald || out.infinite_gain;
        row.output_ideal = out.state_size_out;
        row.output_model = options.herald_model ? apply_herald_model(row.output_ideal, *options.herald_model)
                                                : row.output_ideal;
        row.gain_ideal = ratio(row.output_ideal, in.size);
        row.gain_model = ratio(row.output_model, in_model);
        if (row.flagged) row.gain_ideal = row.gain_model = kNaN;

        if (options.counting.enabled() && !out.zero_herald) {
            std::mt19937_64 rng = point_rng(options.counting.seed, i);
            SampledSize si = sample_size(in.herald_probability, in_model, options.counting, rng);
            SampledSize so = sample_size(out.herald_probability, row.output_model, options.counting, rng);
            row.sampled = combine_gain(si, so);
        }
        sweep.rows.push_back(row);
    }
    return sweep;
}

FringeFit fit_fringe(std::span<const double> phases, std::span<const double> rates, std::span<const double> sigmas) {
    if (phases.size() != rates.size()) throw std::invalid_argument("fit_fringe: size mismatch");
    if (!sigmas.empty() && sigmas.size() != rates.size()) throw std::invalid_argument("fit_fringe: sigma size mismatch");
    FringeFit fit;
    const auto n = static_cast<Eigen::Index>(phases.size());
    if (n < 3) return fit;

    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = std::cos(phases[i]);
        x(i, 2) = std::sin(phases[i]);
        y(i) = rates[i];
        w(i) = sigmas.empty() ? 1.0 : 1.0 / (sigmas[i] * sigmas[i]);
    }
    if (y.cwiseAbs().maxCoeff() <= kZeroProbability) return fit;

    Eigen::Matrix3d normal = x.transpose() * w.asDiagonal() * x;
    Eigen::Vector3d beta = normal.ldlt().solve(x.transpose() * w.asDiagonal() * y);
    Eigen::Matrix3d cov = normal.inverse();
    if (sigmas.empty()) {
        const double rss = (y - x * beta).squaredNorm();
        cov *= n > 3 ? rss / static_cast<double>(n - 3) : 0.0;
    }

    fit.offset = beta(0);
    fit.amplitude = std::hypot(beta(1), beta(2));
    fit.phase = std::atan2(beta(2), beta(1));
    if (!(fit.offset > 0.0) || !std::isfinite(fit.amplitude)) return fit;
    fit.visibility = fit.amplitude / fit.offset;

    Eigen::Vector3d grad;
    grad(0) = -fit.visibility / fit.offset;
    if (fit.amplitude > 0.0) {
        grad(1) = beta(1) / (fit.offset * fit.amplitude);
        grad(2) = beta(2) / (fit.offset * fit.amplitude);
    } else {
        grad(1) = grad(2) = 0.0;
    }
    fit.visibility_error = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    fit.ok = std::isfinite(fit.visibility);
    return fit;
}

FringeScan visibility_experiment(const NlaSimulator& sim, double nominal_g2, double input_magnitude,
                                 std::span<const double> phases, const VisibilityOptions& options) {
    FringeScan scan;
    scan.gain_setting = nominal_g2;
    scan.input_magnitude = input_magnitude;
    const MeterSetting meter = phi_for_gain(nominal_g2);
    scan.phi = meter.phi;
    scan.classical_bound = nominal_g2 >= 1.0 ? classical_visibility_bound(nominal_g2) : kNaN;

    SignalSpec signal;
    signal.kind = options.signal_kind;
    signal.alpha = input_magnitude;
    if (options.bias_ratio) {
        scan.bias_ratio = *options.bias_ratio;
    } else if (options.calibrate) {
        const SizeMeasurement in = measure_input_size(sim, signal, MeasurementConvention::through_gate_reference);
        scan.bias_ratio = sim.run(signal, meter).state_size_out / in.size;
    } else {
        scan.bias_ratio = nominal_g2;
    }
    signal.bias = scan.bias_ratio;

    const ProtocolOutcome out = sim.run(signal, meter);
    scan.herald_probability = out.herald_probability;
    scan.phases.assign(phases.begin(), phases.end());
    if (out.zero_herald) return scan;

    const ModeLayout& layout = sim.options().layout;
    BasisPtr analysis = FockBasis::create(layout.signal_modes(), 1);
    Occupation h(2, 0), v(2, 0);
    h[analysis->position_of(layout.signal.h)] = 1;
    v[analysis->position_of(layout.signal.v)] = 1;
    for (double theta : phases) {
        Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(analysis->size()));
        amps(static_cast<Eigen::Index>(*analysis->index_of(h))) = 1.0 / std::numbers::sqrt2;
        amps(static_cast<Eigen::Index>(*analysis->index_of(v))) = std::polar(1.0 / std::numbers::sqrt2, theta);
        scan.rates.push_back(project(*out.conditional_state, StateVector(analysis, amps)).probability);
    }

    if (options.counting.enabled()) {
        std::vector<double> probs;
        for (double r : scan.rates) probs.push_back(r * out.herald_probability);
        scan.counts = simulate_counts(probs, options.counting, options.stream);
        std::vector<double> y, sigma;
        for (const auto& c : scan.counts) {
            y.push_back(static_cast<double>(c.count));
            sigma.push_back(std::sqrt(std::max<double>(static_cast<double>(c.count), 1.0)));
        }
        scan.fit = fit_fringe(phases, y, sigma);
    } else {
        scan.fit = fit_fringe(phases, scan.rates);
    }
    return scan;
}

double classical_visibility_bound(double g2) {
    if (!(g2 >= 1.0)) throw std::invalid_argument("classical_visibility_bound: gain must be >= 1");
    return 1.0 / std::sqrt(g2);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

}  // namespace nla
