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

#ifndef NLA_EXPERIMENT_HPP
#define NLA_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "nla/protocol.hpp"

namespace nla {

enum class MeasurementConvention {
    /// Meter prepared in |H> and analysed with <H| after the gate; the PPBS
    /// gate scales the measured size by 1/3.
    through_gate_reference,
    true_input,
};

struct HeraldingModel {
    double epsilon = 0.35;

    void validate() const;
};

struct CountingModel {
    /// 0 disables sampling.
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Expected counts per unit probability per shot.
    double rate_scale = 1.0;

    bool enabled() const { return shots > 0; }
};

/// Measured state size (p1/p0 of the vertical signal mode).
struct SizeMeasurement {
    double size = 0.0;
    double p1 = 0.0;
    double herald_probability = 0.0;
};

SizeMeasurement measure_input_size(const NlaSimulator& sim, const SignalSpec& signal,
                                   MeasurementConvention convention);

/// p / (1 + p / epsilon): unit slope at small p, saturating at epsilon.
double apply_herald_model(double p1_ideal, const HeraldingModel& model);

struct CountSample {
    double expected = 0.0;
    std::uint64_t count = 0;
    double error = 0.0;  // sqrt(count)
};

/// Independent generator for sweep point `stream`, derived from the root seed
/// so that results do not depend on evaluation order.
std::mt19937_64 point_rng(std::uint64_t seed, std::uint64_t stream);

/// Poisson counts with mean probability * rate_scale * shots each.
std::vector<CountSample> simulate_counts(std::span<const double> probabilities, const CountingModel& counting,
                                         std::uint64_t stream = 0);

/// Size estimate from heralded events split into signal-click (C) and
/// no-click (Z) counts: size = C / Z, relative error sqrt(1/C + 1/Z).
struct SampledSize {
    double value = 0.0;
    double error = 0.0;
    std::uint64_t clicks = 0;
    std::uint64_t heralds = 0;
};

SampledSize sample_size(double herald_probability, double size, const CountingModel& counting,
                        std::mt19937_64& rng);

struct SampledGain {
    SampledSize input;
    SampledSize output;
    double gain = 0.0;
    double gain_error = 0.0;
};

SampledGain combine_gain(const SampledSize& input, const SampledSize& output);

struct SweepOptions {
    SignalKind signal_kind = SignalKind::phase_averaged;
    MeasurementConvention convention = MeasurementConvention::through_gate_reference;
    std::optional<HeraldingModel> herald_model;
    CountingModel counting{};
};

struct GainSweepRow {
    double input_size = 0.0;      // requested |alpha'|^2
    double input_measured = 0.0;  // under the sweep's convention
    double output_ideal = 0.0;
    double output_model = 0.0;  // equals output_ideal without a herald model
    double herald_probability = 0.0;
    double gain_ideal = 0.0;
    double gain_model = 0.0;
    std::optional<SampledGain> sampled;
    double truncation_weight = 0.0;
    bool flagged = false;
};

struct GainSweep {
    double nominal_gain = 0.0;
    double phi = 0.0;
    std::vector<GainSweepRow> rows;
};

GainSweep gain_sweep(const NlaSimulator& sim, double nominal_g2, std::span<const double> input_sizes,
                     const SweepOptions& options = {});

struct GainPhiRow {
    double phi = 0.0;
    double gain_theory = 0.0;  // cot^2(phi/2)
    double gain_ideal = 0.0;
    double gain_model = 0.0;
    double input_measured = 0.0;
    double output_ideal = 0.0;
    double output_model = 0.0;
    double herald_probability = 0.0;
    std::optional<SampledGain> sampled;
    bool flagged = false;
};

struct GainPhiSweep {
    double input_size = 0.0;
    std::vector<GainPhiRow> rows;
};

GainPhiSweep gain_vs_phi(const NlaSimulator& sim, double input_size, std::span<const double> phis,
                         const SweepOptions& options = {});

struct FringeFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
    double visibility = 0.0;
    double visibility_error = 0.0;
    bool ok = false;
};

/// Least-squares fit of rate = offset + amplitude cos(theta - phase).
/// With `sigmas` the fit is weighted and errors follow from the weights;
/// otherwise they are scaled by the residual variance.
FringeFit fit_fringe(std::span<const double> phases, std::span<const double> rates,
                     std::span<const double> sigmas = {});

struct VisibilityOptions {
    SignalKind signal_kind = SignalKind::phase_averaged;
    CountingModel counting{};
    /// Use the simulated through-gate gain instead of the nominal one to set the bias.
    bool calibrate = false;
    /// Overrides the H:V bias ratio (the nominal |g|^2 by default).
    std::optional<double> bias_ratio;
    /// Generator stream for the sampled counts; give each scan its own.
    std::uint64_t stream = 0;
};

struct FringeScan {
    double gain_setting = 0.0;
    double phi = 0.0;
    double bias_ratio = 0.0;
    double input_magnitude = 0.0;
    double herald_probability = 0.0;
    std::vector<double> phases;
    /// Conditional probability of one signal photon in (|H> + e^{i theta}|V>)/sqrt(2).
    std::vector<double> rates;
    std::vector<CountSample> counts;  // empty unless sampling is enabled
    FringeFit fit;
    double classical_bound = 0.0;
};

FringeScan visibility_experiment(const NlaSimulator& sim, double nominal_g2, double input_magnitude,
                                 std::span<const double> phases, const VisibilityOptions& options = {});

/// Visibility reachable with a linear phase-preserving amplifier, 1/sqrt(g2).
double classical_visibility_bound(double g2);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace nla

#endif  // NLA_EXPERIMENT_HPP
