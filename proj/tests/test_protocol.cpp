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

#include <catch2/catch_amalgamated.hpp>

#include <numbers>

#include "nla/experiment.hpp"
#include "nla/protocol.hpp"
#include "oracles.hpp"

using namespace nla;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;
const ModeLayout kLayout;

Occupation meter_occ(const FockBasis& b, bool vertical) {
    Occupation o(static_cast<std::size_t>(b.num_modes()), 0);
    o[static_cast<std::size_t>(b.position_of(vertical ? kLayout.meter.v : kLayout.meter.h))] = 1;
    return o;
}

// Amplitudes (H, V) of a one-photon meter state.
std::pair<Complex, Complex> meter_amps(const StateVector& s) {
    return {s.amplitude(meter_occ(s.basis(), false)), s.amplitude(meter_occ(s.basis(), true))};
}

const NlaSimulator& ideal_sim() {
    static const NlaSimulator sim(GateKind::ideal);
    return sim;
}

const NlaSimulator& ppbs_sim() {
    static const NlaSimulator sim(GateKind::ppbs);
    return sim;
}

}  // namespace

TEST_CASE("Meter states", "[protocol]") {
    const double s = 1.0 / std::sqrt(2.0);
    auto [h0, v0] = meter_amps(meter_state(0.0));
    CHECK_THAT(std::abs(h0 - s), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(v0 - Complex(0.0, s)), WithinAbs(0.0, 1e-15));

    auto [hp, vp] = meter_amps(meter_state(kPi));
    CHECK_THAT(std::abs(hp - s), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(vp - Complex(0.0, -s)), WithinAbs(0.0, 1e-15));

    auto [hh, vh] = meter_amps(meter_state(kPi / 2.0));
    CHECK_THAT(std::abs(vh / hh - Complex(-1.0, 0.0)), WithinAbs(0.0, 1e-15));

    const StateVector p = meter_projector();
    CHECK_THAT(p.norm(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::abs(p.inner(meter_state(kPi))), WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::abs(p.inner(meter_state(0.0))), WithinAbs(0.0, 1e-15));
}

TEST_CASE("Truncated coherent states", "[protocol]") {
    SECTION("zero amplitude is vacuum") {
        auto t = truncated_coherent(0.0, 3);
        CHECK_THAT(std::abs(t.state.amplitude({0})), WithinAbs(1.0, 1e-15));
        CHECK(t.truncation_weight == 0.0);
    }
    SECTION("ratio of the first two terms") {
        auto t = truncated_coherent(0.001, 3);
        CHECK_THAT(occupancy_probability(t.state, 1, 1) / occupancy_probability(t.state, 1, 0),
                   WithinRel(1e-6, 1e-12));
    }
    SECTION("single-photon weight at alpha 0.1") {
        auto t = truncated_coherent(0.1, 3);
        CHECK_THAT(occupancy_probability(t.state, 1, 1), WithinAbs(std::exp(-0.01) * 0.01, 1e-8));
        CHECK_THAT(occupancy_probability(t.state, 1, 1), WithinAbs(0.0099005, 1e-7));
    }
    SECTION("tail weight at alpha 0.3") {
        auto t = truncated_coherent(0.3, 3);
        double kept = 0.0;
        for (int n = 0; n <= 3; ++n) kept += std::exp(-0.09) * std::pow(0.09, n) / oracle::factorial(n);
        CHECK(t.truncation_weight < 2e-5);
        CHECK_THAT(t.truncation_weight, WithinRel(1.0 - kept, 1e-6));
        CHECK(t.state.is_normalized());
    }
    SECTION("truncation bound") {
        CHECK_THROWS_AS(truncated_coherent(1.5, 3), TruncationError);
        CHECK_NOTHROW(truncated_coherent(1.5, 3, 1, 0.5));
    }
}

TEST_CASE("Phase-averaged states", "[protocol]") {
    auto zero = phase_averaged_state(0.0, 3);
    CHECK_THAT(zero.state.matrix()(0, 0).real(), WithinAbs(1.0, 1e-15));

    for (double mag : {0.05, 0.2, 0.4}) {
        auto t = phase_averaged_state(mag, 4);
        const auto& m = t.state.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j)
                if (i != j) CHECK(m(i, j) == Complex(0.0));
        Eigen::MatrixXcd q = oracle::phase_average_by_quadrature(mag, 4, 64);
        q /= q.trace();
        CHECK((q - m).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("Ideal CZ", "[protocol]") {
    auto basis = build_basis(std::vector<ModeId>{kLayout.signal.v, kLayout.meter.h, kLayout.meter.v}, 2);
    auto cz = ideal_cz(basis);
    auto state = [&](int n, int h, int v) {
        Occupation o(3, 0);
        o[static_cast<std::size_t>(basis->position_of(kLayout.signal.v))] = n;
        o[static_cast<std::size_t>(basis->position_of(kLayout.meter.h))] = h;
        o[static_cast<std::size_t>(basis->position_of(kLayout.meter.v))] = v;
        return StateVector::basis_state(basis, o);
    };
    CHECK_THAT(apply(cz, state(0, 1, 0)).inner(state(0, 1, 0)).real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(apply(cz, state(1, 0, 1)).inner(state(1, 0, 1)).real(), WithinAbs(-1.0, 1e-15));
    CHECK_THAT(apply(cz, state(1, 1, 0)).inner(state(1, 1, 0)).real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(apply(cz, state(0, 0, 1)).inner(state(0, 0, 1)).real(), WithinAbs(1.0, 1e-15));
}

TEST_CASE("Ideal CZ on a qubit signal and the meter gives the intermediate state", "[protocol]") {
    // N/sqrt(2) [ |0>(|H> + i e^{i phi}|V>) + a|1>(|H> - i e^{i phi}|V>) ], expanded by hand.
    const Complex a(0.07, -0.03);
    const double phi = 1.1;
    const double norm = 1.0 / std::sqrt(1.0 + std::norm(a));
    const Complex ie = Complex(0.0, 1.0) * std::polar(1.0, phi);

    auto sig = qubit_truncated(a, 1, kLayout.signal.v);
    auto joint = tensor(sig, meter_state(phi)).state;
    auto out = apply(ideal_cz(joint.basis_ptr()), joint);
    auto amp = [&](int n, int h, int v) {
        Occupation o(3, 0);
        o[static_cast<std::size_t>(joint.basis().position_of(kLayout.signal.v))] = n;
        o[static_cast<std::size_t>(joint.basis().position_of(kLayout.meter.h))] = h;
        o[static_cast<std::size_t>(joint.basis().position_of(kLayout.meter.v))] = v;
        return out.amplitude(o);
    };
    const double r = norm / std::sqrt(2.0);
    CHECK(std::abs(amp(0, 1, 0) - r) < 1e-15);
    CHECK(std::abs(amp(0, 0, 1) - r * ie) < 1e-15);
    CHECK(std::abs(amp(1, 1, 0) - r * a) < 1e-15);
    CHECK(std::abs(amp(1, 0, 1) + r * a * ie) < 1e-15);
}

TEST_CASE("Three-PPBS circuit is a CZ with amplitude one third", "[protocol]") {
    auto basis = build_basis(kLayout.all_modes(), 2);
    FockOperator op = lift_mode_transform(compose(ppbs_cz_circuit()), basis);
    auto qubit = [&](bool s_v, bool m_v) {
        Occupation o(8, 0);
        o[static_cast<std::size_t>(basis->position_of(s_v ? kLayout.signal.v : kLayout.signal.h))] = 1;
        o[static_cast<std::size_t>(basis->position_of(m_v ? kLayout.meter.v : kLayout.meter.h))] = 1;
        return StateVector::basis_state(basis, o);
    };
    for (int in = 0; in < 4; ++in) {
        auto out = apply(op, qubit(in & 2, in & 1));
        double success = 0.0;
        for (int o = 0; o < 4; ++o) {
            const Complex amp = qubit(o & 2, o & 1).inner(out);
            success += std::norm(amp);
            const double expected = o != in ? 0.0 : (in == 3 ? -1.0 / 3.0 : 1.0 / 3.0);
            CHECK_THAT(std::abs(amp - expected), WithinAbs(0.0, 1e-12));
        }
        CHECK_THAT(success, WithinAbs(1.0 / 9.0, 1e-12));
    }
}

TEST_CASE("Protocol at phi = pi deamplifies to vacuum", "[protocol]") {
    const Complex a = 0.01;
    const double n2 = 1.0 / (1.0 + std::norm(a));
    auto ideal = ideal_sim().run(SignalSpec::qubit(a), {kPi});
    CHECK_THAT(ideal.herald_probability, WithinRel(n2, 1e-12));
    CHECK_THAT(ideal.p1_out, WithinAbs(0.0, 1e-15));
    auto ppbs = ppbs_sim().run(SignalSpec::qubit(a), {kPi});
    CHECK_THAT(ppbs.herald_probability, WithinRel(n2 / 3.0, 1e-12));
    CHECK_THAT(ppbs.p1_out, WithinAbs(0.0, 1e-15));
}

TEST_CASE("Unity gain at phi = pi/2 keeps the photon statistics", "[protocol]") {
    auto sig = SignalSpec::coherent(0.01);
    auto out = ideal_sim().run(sig, {kPi / 2.0});
    CHECK_THAT(out.p1_out, WithinAbs(out.p1_in, 1e-12));
    CHECK_THAT(out.state_size_out / out.state_size_in, WithinRel(1.0, 1e-12));
}

TEST_CASE("Ideal-gate output equals the amplified qubit state", "[protocol]") {
    for (double phi : {kPi / 6.0, kPi / 3.0, kPi / 2.0, 2.0}) {
        const Complex a(0.02, 0.01);
        auto out = ideal_sim().run(SignalSpec::qubit(a), {phi});
        REQUIRE(out.pure_state);
        const AnalyticPrediction pred = analytic({phi}, a);
        // <psi_P|Psi_I> = N (1 - e^{i phi}) / 2 (|0> + g a |1>)
        const double n2 = 1.0 / (1.0 + std::norm(a));
        const double expected_prob = n2 * std::norm(1.0 - std::polar(1.0, phi)) / 4.0 * (1.0 + std::norm(pred.g * a));
        CHECK_THAT(out.herald_probability, WithinRel(expected_prob, 1e-12));
        REQUIRE(out.amplitude_gain);
        CHECK(std::abs(*out.amplitude_gain - Complex(0.0, 1.0 / std::tan(phi / 2.0))) < 1e-12);
        CHECK(std::abs(pred.g - Complex(0.0, 1.0 / std::tan(phi / 2.0))) < 1e-12);
    }
}

TEST_CASE("PPBS-gate gain is a third of the ideal gain", "[protocol]") {
    for (double phi : {kPi / 4.0, kPi / 3.0, kPi / 2.0}) {
        auto out = ppbs_sim().run(SignalSpec::qubit(0.01), {phi});
        REQUIRE(out.amplitude_gain);
        CHECK_THAT(std::norm(*out.amplitude_gain), WithinRel(analytic({phi}, 0.0).g2 / 3.0, 1e-12));
    }
}

TEST_CASE("Herald probability follows the closed form", "[protocol]") {
    const double a2 = 1e-4;
    auto out = ppbs_sim().run(SignalSpec::coherent(std::sqrt(a2)), {kPi / 2.0});
    CHECK_THAT(out.herald_probability, WithinRel(analytic({kPi / 2.0}, std::sqrt(a2)).p_success, 1e-6));
}

TEST_CASE("Analytic predictions", "[protocol]") {
    CHECK_THAT(phi_for_gain(1.0).phi, WithinAbs(kPi / 2.0, 1e-15));
    CHECK_THAT(phi_for_gain(3.0).phi, WithinAbs(kPi / 3.0, 1e-15));
    CHECK_THAT(phi_for_gain(3.0).phi, WithinAbs(2.0 * std::atan(1.0 / std::sqrt(3.0)), 1e-15));
    CHECK(phi_for_gain(0.0).phi == kPi);
    CHECK_THROWS_AS(phi_for_gain(-1.0), std::invalid_argument);

    for (double g2 : {3.0 / std::sqrt(2.0), 3.0, 6.0}) {
        const AnalyticPrediction p = analytic(phi_for_gain(g2), 0.0);
        CHECK_THAT(p.g2, WithinRel(g2, 1e-12));
        CHECK_THAT(p.g2_nondet, WithinRel(g2 / 3.0, 1e-12));
        const double phi = phi_for_gain(g2).phi;
        CHECK_THAT(1.0 / (1.0 + 3.0 * p.g2_nondet), WithinAbs(std::pow(std::sin(phi / 2.0), 2), 1e-14));
    }
    const AnalyticPrediction inf = analytic({0.0}, 0.01);
    CHECK(inf.infinite_gain);
    CHECK(std::isfinite(inf.p_success));
}

TEST_CASE("Zero meter angle is flagged as infinite gain", "[protocol]") {
    auto out = ideal_sim().run(SignalSpec::coherent(0.01), {0.0});
    CHECK(out.infinite_gain);
    CHECK_FALSE(out.zero_herald);
}

TEST_CASE("Vacuum input at zero meter angle gives a zero herald", "[protocol]") {
    auto out = ideal_sim().run(SignalSpec::coherent(0.0), {0.0});
    CHECK(out.zero_herald);
    CHECK_FALSE(out.conditional_state.has_value());
}

TEST_CASE("Results do not depend on the input phase", "[protocol][property]") {
    const double mag = 0.03;
    for (GateKind gate : {GateKind::ideal, GateKind::ppbs}) {
        const NlaSimulator& sim = gate == GateKind::ideal ? ideal_sim() : ppbs_sim();
        auto base = sim.run(SignalSpec::coherent(mag), {kPi / 3.0});
        for (double theta : {0.4, 1.9, 3.0, 5.5}) {
            auto r = sim.run(SignalSpec::coherent(std::polar(mag, theta)), {kPi / 3.0});
            CHECK_THAT(r.p1_out, WithinAbs(base.p1_out, 1e-12));
            CHECK_THAT(r.herald_probability, WithinAbs(base.herald_probability, 1e-12));
        }
    }
}

TEST_CASE("Phase-averaged run equals the average over coherent runs", "[protocol][property]") {
    const double mag = 0.05;
    const int points = 32;
    for (GateKind gate : {GateKind::ideal, GateKind::ppbs}) {
        const NlaSimulator& sim = gate == GateKind::ideal ? ideal_sim() : ppbs_sim();
        auto avg = sim.run(SignalSpec::phase_averaged(mag), {kPi / 3.0});
        double herald = 0.0;
        Eigen::MatrixXcd weighted;
        for (int k = 0; k < points; ++k) {
            auto r = sim.run(SignalSpec::coherent(std::polar(mag, 2.0 * kPi * k / points)), {kPi / 3.0});
            herald += r.herald_probability / points;
            Eigen::MatrixXcd m = r.conditional_state->matrix() * (r.herald_probability / points);
            if (k == 0) {
                weighted = m;
            } else {
                weighted += m;
            }
        }
        CHECK_THAT(avg.herald_probability, WithinAbs(herald, 1e-9));
        CHECK((avg.conditional_state->matrix() - weighted / herald).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("Physical heralding adds an incoherent vacuum at order alpha squared", "[protocol]") {
    SimulationOptions phys;
    phys.herald = HeraldRule::meter_detection;
    const NlaSimulator sim(GateKind::ppbs, phys);
    for (double a2 : {1e-4, 1e-3}) {
        auto c = ppbs_sim().run(SignalSpec::qubit(std::sqrt(a2)), {kPi / 3.0});
        auto p = sim.run(SignalSpec::qubit(std::sqrt(a2)), {kPi / 3.0});
        CHECK(p.herald_probability > c.herald_probability);
        CHECK_THAT(p.herald_probability - c.herald_probability, WithinRel(a2 / (1.0 + a2) / 9.0, 1e-9));
        // Same one-photon weight, more vacuum: the measured gain drops.
        CHECK_THAT(p.p1_out * p.herald_probability, WithinRel(c.p1_out * c.herald_probability, 1e-9));
        CHECK(p.state_size_out < c.state_size_out);
    }
    auto c0 = ppbs_sim().run(SignalSpec::qubit(0.0), {kPi / 3.0});
    auto p0 = sim.run(SignalSpec::qubit(0.0), {kPi / 3.0});
    CHECK_THAT(p0.herald_probability, WithinAbs(c0.herald_probability, 1e-15));
}

TEST_CASE("Input measurement conventions", "[protocol]") {
    const NlaSimulator& sim = ppbs_sim();
    for (SignalKind kind : {SignalKind::coherent, SignalKind::phase_averaged}) {
        SignalSpec vac;
        vac.kind = kind;
        CHECK(measure_input_size(sim, vac, MeasurementConvention::true_input).size == 0.0);
        CHECK(measure_input_size(sim, vac, MeasurementConvention::through_gate_reference).size == 0.0);
        for (double p : {1e-6, 1e-4, 1e-3, 3e-3}) {
            SignalSpec s = vac;
            s.alpha = std::sqrt(p);
            const double truth = measure_input_size(sim, s, MeasurementConvention::true_input).size;
            const double through = measure_input_size(sim, s, MeasurementConvention::through_gate_reference).size;
            CHECK_THAT(truth, WithinRel(p, 1e-12));
            CHECK_THAT(through / truth, WithinRel(1.0 / 3.0, 1e-6));
        }
    }
    // The ideal gate does not scale the reference measurement.
    SignalSpec s = SignalSpec::phase_averaged(0.01);
    CHECK_THAT(measure_input_size(ideal_sim(), s, MeasurementConvention::through_gate_reference).size,
               WithinRel(1e-4, 1e-12));
}

TEST_CASE("Signal preparation", "[protocol]") {
    const SimulationOptions opts;
    SECTION("lossy single photon") {
        PreparedSignal p = prepare_signal(SignalSpec::single_photon(0.6), opts);
        const auto& rho = std::get<DensityOperator>(p.state);
        CHECK_THAT(occupancy_probability(rho, kLayout.signal.v, 0), WithinAbs(0.6, 1e-14));
        CHECK_THAT(occupancy_probability(rho, kLayout.signal.v, 1), WithinAbs(0.4, 1e-14));
    }
    SECTION("bias splits the intensity between polarizations") {
        SignalSpec s = SignalSpec::qubit(0.01);
        s.bias = 4.0;
        PreparedSignal p = prepare_signal(s, opts);
        const auto& psi = std::get<StateVector>(p.state);
        CHECK_THAT(occupancy_probability(psi, kLayout.signal.h, 1) / occupancy_probability(psi, kLayout.signal.v, 1),
                   WithinRel(4.0, 1e-12));
    }
    SECTION("loss shrinks a coherent state") {
        SignalSpec s = SignalSpec::phase_averaged(0.1);
        s.loss = {0.75};
        PreparedSignal p = prepare_signal(s, opts);
        const double p1 = std::visit([](const auto& st) { return occupancy_probability(st, kLayout.signal.v, 1); },
                                     p.state);
        const double p0 = std::visit([](const auto& st) { return occupancy_probability(st, kLayout.signal.v, 0); },
                                     p.state);
        // The cap drops n >= 4 terms that would decay into n = 1: relative error ~ x^3.
        CHECK_THAT(p1 / p0, WithinRel(0.25 * 0.01, 1e-6));
    }
}

TEST_CASE("Resource and truncation limits", "[protocol]") {
    SimulationOptions small;
    small.max_basis_states = 100;
    CHECK_THROWS_AS(NlaSimulator(GateKind::ppbs, small), ResourceError);
    CHECK_THROWS_AS(ppbs_sim().run(SignalSpec::coherent(1.5), {kPi / 3.0}), TruncationError);
    SimulationOptions bad;
    bad.signal_cap = 0;
    CHECK_THROWS_AS(NlaSimulator(GateKind::ideal, bad), std::invalid_argument);
}
