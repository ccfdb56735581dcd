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

#ifndef NLA_PROTOCOL_HPP
#define NLA_PROTOCOL_HPP

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "nla/elements.hpp"
#include "nla/fock.hpp"

namespace nla {

class TruncationError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Meter preparation angle phi. phi -> 0 gives unbounded gain and vanishing
/// success probability; negative values give the same |g|^2 as |phi|.
struct MeterSetting {
    double phi;
};

enum class GateKind { ideal, ppbs };

/// Which meter events count as a successful herald for the PPBS gate.
enum class HeraldRule {
    /// One meter photon in the analysed state and nothing leaked into the PPBS_H
    /// dump ports. Reproduces the nondeterministic-gate gain and success laws exactly.
    coincidence_basis,
    /// Any event with one meter photon in the analysed state; dump ports are
    /// traced out, so events where the meter photon leaked and the signal photon
    /// crossed into the meter arm also herald (an O(|alpha|^2) incoherent vacuum).
    meter_detection,
};

enum class SignalKind { coherent, phase_averaged, qubit_truncated, single_photon };

struct SignalSpec {
    SignalKind kind = SignalKind::phase_averaged;
    /// Amplitude in the vertical signal mode. Only |alpha| matters for the
    /// phase-averaged kind; unused for single_photon.
    Complex alpha{};
    /// Applied to the whole signal at preparation.
    LossSpec loss{};
    /// H:V intensity ratio set by HWP1; 0 puts the whole signal in s_V.
    double bias = 0.0;

    static SignalSpec coherent(Complex alpha) { return {SignalKind::coherent, alpha, {}, 0.0}; }
    static SignalSpec phase_averaged(double magnitude) { return {SignalKind::phase_averaged, magnitude, {}, 0.0}; }
    static SignalSpec qubit(Complex alpha) { return {SignalKind::qubit_truncated, alpha, {}, 0.0}; }
    static SignalSpec single_photon(double loss) { return {SignalKind::single_photon, 0.0, {loss}, 0.0}; }
};

struct SimulationOptions {
    /// Maximum photon number kept in the signal; the joint space adds the meter photon.
    int signal_cap = 3;
    HeraldRule herald = HeraldRule::coincidence_basis;
    /// Largest discarded Fock-tail probability accepted when preparing a signal.
    double truncation_bound = 1e-3;
    std::size_t max_basis_states = kDefaultMaxBasisStates;
    ModeLayout layout{};
};

struct TruncatedState {
    StateVector state;
    double truncation_weight;
};

struct TruncatedDensity {
    DensityOperator state;
    double truncation_weight;
};

/// (|H> + i e^{i phi}|V>)/sqrt(2) as one photon over the meter modes.
StateVector meter_state(double phi, const ModeLayout& layout = {});
/// (|H> - i|V>)/sqrt(2), the outcome that heralds amplification.
StateVector meter_projector(const ModeLayout& layout = {});
/// One horizontally polarized meter photon.
StateVector meter_horizontal(const ModeLayout& layout = {});

/// exp(-|a|^2/2) a^n / sqrt(n!) for n <= cap, renormalized; the dropped tail
/// probability is reported. Throws TruncationError when it exceeds `bound`.
TruncatedState truncated_coherent(Complex alpha, int cap, ModeId mode = 1, double bound = 1e-3);
/// Diagonal Poissonian state, renormalized after truncation.
TruncatedDensity phase_averaged_state(double magnitude, int cap, ModeId mode = 1, double bound = 1e-3);
/// (|0> + alpha|1>)/sqrt(1 + |alpha|^2) on a basis with the given cap.
StateVector qubit_truncated(Complex alpha, int cap, ModeId mode = 1);

/// Diagonal operator (-1)^{n_sV n_mV}; on the qubit subspace it flips only |1>_sV |V>_m.
FockOperator ideal_cz(const BasisPtr& basis, const ModeLayout& layout = {});

/// [PPBS_H on signal/dump, PPBS_V on signal/meter, PPBS_H on meter/dump]. The
/// signal and meter stay in the transmitted ports; conditional on one photon in
/// each of the signal and meter modes (dumps empty) it is CZ with amplitude 1/3.
std::vector<ModeTransform> ppbs_cz_circuit(const ModeLayout& layout = {});
ModeTransform compose(const std::vector<ModeTransform>& elements);

using SignalState = std::variant<StateVector, DensityOperator>;

struct PreparedSignal {
    SignalState state;  // on the two signal modes
    double truncation_weight = 0.0;
};

PreparedSignal prepare_signal(const SignalSpec& spec, const SimulationOptions& options = {});

struct ProtocolOutcome {
    /// Conditional signal state (both polarizations); empty on a zero herald.
    std::optional<DensityOperator> conditional_state;
    /// Set when the conditional state is pure.
    std::optional<StateVector> pure_state;
    double herald_probability = 0.0;
    /// Conditional photon-number probabilities of the vertical signal mode.
    double p0_out = 0.0;
    double p1_out = 0.0;
    /// p1_out / p0_out, equal to |g alpha|^2 for a truncated coherent output.
    double state_size_out = 0.0;
    /// The same quantities for the prepared input.
    double p1_in = 0.0;
    double state_size_in = 0.0;
    /// <1|psi> / (<0|psi> alpha) on the vertical mode, for pure runs.
    std::optional<Complex> amplitude_gain;
    double truncation_weight = 0.0;
    bool zero_herald = false;
    /// Vacuum weight vanished while the single-photon weight did not.
    bool infinite_gain = false;
};

/// Holds the lifted gate for one gate kind and option set so that many
/// parameter points can be simulated without re-lifting. Immutable after
/// construction and safe to share across threads.
class NlaSimulator {
   public:
    explicit NlaSimulator(GateKind gate, SimulationOptions options = {});

    GateKind gate() const { return gate_; }
    const SimulationOptions& options() const { return options_; }
    const FockOperator& gate_operator() const { return gate_op_; }

    /// Full protocol: meter_state(phi) in, meter_projector() out.
    ProtocolOutcome run(const SignalSpec& signal, MeterSetting meter) const;
    /// Through-gate reference: meter |H> in, <H| out (no interaction).
    ProtocolOutcome reference(const SignalSpec& signal) const;
    ProtocolOutcome run_prepared(const PreparedSignal& signal, const StateVector& meter_in,
                                 const StateVector& meter_out, Complex alpha_v = {}) const;

   private:
    GateKind gate_;
    SimulationOptions options_;
    BasisPtr joint_basis_;
    FockOperator gate_op_;
};

ProtocolOutcome run_nla(const SignalSpec& signal, MeterSetting meter, GateKind gate,
                        const SimulationOptions& options = {});

struct AnalyticPrediction {
    /// (1 + e^{i phi}) / (1 - e^{i phi}) = i cot(phi/2)
    Complex g;
    double g2;
    /// |g'|^2 = |g|^2 / 3 for the PPBS gate.
    double g2_nondet;
    /// Nondeterministic success probability, N^2/3 * (1 + |g'|^2 |a|^2) / (1 + 3|g'|^2),
    /// written in the equivalent form that stays finite at phi = 0.
    double p_success;
    /// The same law with the output normalization exp(-|g' a|^2) as prefactor.
    double p_success_out_norm;
    /// Deterministic-gate success probability N^2 sin^2(phi/2) (1 + |g|^2 |a|^2).
    double p_success_ideal;
    double norm_in;
    double norm_out;
    bool infinite_gain = false;
};

AnalyticPrediction analytic(MeterSetting meter, Complex alpha);

/// phi = 2 arccot(sqrt(g2)); g2 = 0 gives phi = pi.
MeterSetting phi_for_gain(double target_g2);

}  // namespace nla

#endif  // NLA_PROTOCOL_HPP
