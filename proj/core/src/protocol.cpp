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

#include "nla/protocol.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nla {

namespace {

constexpr Complex kI{0.0, 1.0};

/// Poisson probabilities for n = 0..cap and the tail beyond cap.
std::pair<std::vector<double>, double> poisson_weights(double mean, int cap) {
    std::vector<double> p(cap + 1);
    double term = std::exp(-mean);
    for (int n = 0; n <= cap; ++n) {
        if (n > 0) term *= mean / n;
        p[n] = term;
    }
    // Summing the tail directly keeps it accurate when it is far below 1e-16.
    double tail = 0.0;
    for (int n = cap + 1; n < cap + 200; ++n) {
        term *= mean / n;
        tail += term;
        if (term < 1e-300 || term < tail * 1e-17) break;
    }
    return {p, tail};
}

void check_truncation(double tail, double bound) {
    if (tail > bound) {
        throw TruncationError("discarded Fock tail " + std::to_string(tail) + " exceeds the bound " +
                              std::to_string(bound) + "; raise the photon cap or shrink the signal");
    }
}

/// Copies a single-mode state into a larger basis with the other modes empty.
StateVector embed(const StateVector& psi, const BasisPtr& target) {
    ModeId mode = psi.basis().modes().front();
    int pos = target->position_of(mode);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(target->size()));
    Occupation occ(target->num_modes(), 0);
    for (std::size_t i = 0; i < psi.basis().size(); ++i) {
        occ[pos] = psi.basis().state(i)[0];
        amps(static_cast<Eigen::Index>(*target->index_of(occ))) = psi.amplitudes()(static_cast<Eigen::Index>(i));
    }
    return StateVector(target, std::move(amps));
}

DensityOperator embed(const DensityOperator& rho, const BasisPtr& target) {
    ModeId mode = rho.basis().modes().front();
    int pos = target->position_of(mode);
    const auto n = static_cast<Eigen::Index>(target->size());
    std::vector<Eigen::Index> idx(rho.basis().size());
    Occupation occ(target->num_modes(), 0);
    for (std::size_t i = 0; i < rho.basis().size(); ++i) {
        occ[pos] = rho.basis().state(i)[0];
        idx[i] = static_cast<Eigen::Index>(*target->index_of(occ));
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            m(idx[i], idx[j]) = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return DensityOperator(target, std::move(m));
}

double state_size(double p0, double p1) {
    if (p0 > kZeroProbability) return p1 / p0;
    return p1 > kZeroProbability ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

StateVector meter_state(double phi, const ModeLayout& layout) {
    BasisPtr b = FockBasis::create(layout.meter_modes(), 1);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b->size()));
    const double r = 1.0 / std::numbers::sqrt2;
    Occupation h(2, 0), v(2, 0);
    h[b->position_of(layout.meter.h)] = 1;
    v[b->position_of(layout.meter.v)] = 1;
    amps(static_cast<Eigen::Index>(*b->index_of(h))) = r;
    amps(static_cast<Eigen::Index>(*b->index_of(v))) = r * kI * std::polar(1.0, phi);
    return StateVector(b, std::move(amps));
}

StateVector meter_projector(const ModeLayout& layout) {
    // i e^{i pi} = -i
    return meter_state(std::numbers::pi, layout);
}

StateVector meter_horizontal(const ModeLayout& layout) {
    BasisPtr b = FockBasis::create(layout.meter_modes(), 1);
    Occupation h(2, 0);
    h[b->position_of(layout.meter.h)] = 1;
    return StateVector::basis_state(b, h);
}

TruncatedState truncated_coherent(Complex alpha, int cap, ModeId mode, double bound) {
    auto [p, tail] = poisson_weights(std::norm(alpha), cap);
    check_truncation(tail, bound);
    BasisPtr b = FockBasis::create({mode}, cap);
    Eigen::VectorXcd amps(cap + 1);
    const double norm = std::exp(-0.5 * std::norm(alpha));
    Complex power = 1.0;
    double fact = 1.0;
    for (int n = 0; n <= cap; ++n) {
        if (n > 0) {
            power *= alpha;
            fact *= n;
        }
        amps(n) = norm * power / std::sqrt(fact);
    }
    amps /= amps.norm();
    return {StateVector(b, std::move(amps)), tail};
}

TruncatedDensity phase_averaged_state(double magnitude, int cap, ModeId mode, double bound) {
    auto [p, tail] = poisson_weights(magnitude * magnitude, cap);
    check_truncation(tail, bound);
    BasisPtr b = FockBasis::create({mode}, cap);
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(p.data(), cap + 1);
    diag /= diag.sum();
    Eigen::MatrixXcd m = diag.cast<Complex>().asDiagonal();
    return {DensityOperator(b, std::move(m)), tail};
}

StateVector qubit_truncated(Complex alpha, int cap, ModeId mode) {
    if (cap < 1) throw std::invalid_argument("qubit_truncated: cap must be >= 1");
    BasisPtr b = FockBasis::create({mode}, cap);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(cap + 1);
    amps(0) = 1.0;
    amps(1) = alpha;
    amps /= amps.norm();
    return StateVector(b, std::move(amps));
}

FockOperator ideal_cz(const BasisPtr& basis, const ModeLayout& layout) {
    const int sv = basis->position_of(layout.signal.v);
    const int mv = basis->position_of(layout.meter.v);
    if (sv < 0 || mv < 0) throw std::invalid_argument("ideal_cz: basis lacks s_V or m_V");
    const auto n = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const Occupation& occ = basis->state(i);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = ((occ[sv] * occ[mv]) % 2 == 0) ? 1.0 : -1.0;
    }
    return FockOperator(basis, std::move(m));
}

std::vector<ModeTransform> ppbs_cz_circuit(const ModeLayout& layout) {
    layout.validate();
    return {
        ppbs(kPpbsH, layout.signal, layout.signal_dump),
        ppbs(kPpbsV, layout.signal, layout.meter),
        ppbs(kPpbsH, layout.meter, layout.meter_dump),
    };
}

ModeTransform compose(const std::vector<ModeTransform>& elements) {
    if (elements.empty()) throw std::invalid_argument("compose: empty element list");
    ModeTransform total = elements.front();
    for (std::size_t i = 1; i < elements.size(); ++i) total = total.then(elements[i]);
    return total;
}

PreparedSignal prepare_signal(const SignalSpec& spec, const SimulationOptions& options) {
    spec.loss.validate();
    if (!(spec.bias >= 0.0)) throw std::invalid_argument("SignalSpec: bias must be >= 0");
    const ModeLayout& layout = options.layout;
    const int cap = options.signal_cap;
    if (cap < 1) throw std::invalid_argument("signal_cap must be >= 1");

    BasisPtr basis = FockBasis::create(layout.signal_modes(), cap, options.max_basis_states);
    const bool biased = spec.bias > 0.0;
    const ModeId mode = biased ? layout.signal.h : layout.signal.v;
    const Complex a = spec.alpha * std::sqrt(1.0 + spec.bias);

    PreparedSignal out{StateVector::vacuum(basis), 0.0};
    switch (spec.kind) {
        case SignalKind::coherent: {
            auto t = truncated_coherent(a, cap, mode, options.truncation_bound);
            out = {embed(t.state, basis), t.truncation_weight};
            break;
        }
        case SignalKind::phase_averaged: {
            auto t = phase_averaged_state(std::abs(a), cap, mode, options.truncation_bound);
            out = {embed(t.state, basis), t.truncation_weight};
            break;
        }
        case SignalKind::qubit_truncated:
            out = {embed(qubit_truncated(a, cap, mode), basis), 0.0};
            break;
        case SignalKind::single_photon: {
            Occupation one(2, 0);
            one[basis->position_of(mode)] = 1;
            out = {StateVector::basis_state(basis, one), 0.0};
            break;
        }
    }

    if (spec.loss.loss > 0.0) {
        DensityOperator rho = std::holds_alternative<StateVector>(out.state)
                                  ? DensityOperator::from_pure(std::get<StateVector>(out.state))
                                  : std::get<DensityOperator>(out.state);
        out.state = loss_channel(spec.loss, mode, basis).apply(rho);
    }
    if (biased) {
        FockOperator u = lift_mode_transform(hwp(bias_hwp_angle(spec.bias), layout.signal), basis);
        std::visit([&](auto& s) { s = apply(u, s); }, out.state);
    }
    return out;
}

NlaSimulator::NlaSimulator(GateKind gate, SimulationOptions options)
    : gate_(gate),
      options_(std::move(options)),
      joint_basis_([&] {
          options_.layout.validate();
          if (options_.signal_cap < 1) throw std::invalid_argument("NlaSimulator: signal_cap must be >= 1");
          std::vector<ModeId> modes = options_.layout.signal_modes();
          for (ModeId m : options_.layout.meter_modes()) modes.push_back(m);
          if (gate == GateKind::ppbs) {
              for (ModeId m : options_.layout.dump_modes()) modes.push_back(m);
          }
          return FockBasis::create(modes, options_.signal_cap + 1, options_.max_basis_states);
      }()),
      gate_op_(gate == GateKind::ideal ? ideal_cz(joint_basis_, options_.layout)
                                       : lift_mode_transform(compose(ppbs_cz_circuit(options_.layout)),
                                                             joint_basis_)) {}

ProtocolOutcome NlaSimulator::run(const SignalSpec& signal, MeterSetting meter) const {
    return run_prepared(prepare_signal(signal, options_), meter_state(meter.phi, options_.layout),
                        meter_projector(options_.layout), signal.kind == SignalKind::single_photon ? 0.0 : signal.alpha);
}

ProtocolOutcome NlaSimulator::reference(const SignalSpec& signal) const {
    const StateVector h = meter_horizontal(options_.layout);
    return run_prepared(prepare_signal(signal, options_), h, h,
                        signal.kind == SignalKind::single_photon ? 0.0 : signal.alpha);
}

ProtocolOutcome NlaSimulator::run_prepared(const PreparedSignal& signal, const StateVector& meter_in,
                                           const StateVector& meter_out, Complex alpha_v) const {
    const ModeLayout& layout = options_.layout;

    // Mixed inputs are evolved branch by branch through their eigen-decomposition.
    std::vector<std::pair<double, StateVector>> branches;
    if (const auto* psi = std::get_if<StateVector>(&signal.state)) {
        branches.emplace_back(1.0, *psi);
    } else {
        const auto& rho = std::get<DensityOperator>(signal.state);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho.matrix() + rho.matrix().adjoint()));
        const double top = es.eigenvalues().maxCoeff();
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
            const double w = es.eigenvalues()(k);
            if (w > top * 1e-15) branches.emplace_back(w, StateVector(rho.basis_ptr(), es.eigenvectors().col(k)));
        }
    }

    std::optional<StateVector> dump_vacuum;
    if (gate_ == GateKind::ppbs) {
        dump_vacuum = StateVector::vacuum(FockBasis::create(layout.dump_modes(), 0));
    }
    const int joint_cap = joint_basis_->photon_cap();

    ProtocolOutcome out;
    out.truncation_weight = signal.truncation_weight;
    std::optional<Eigen::MatrixXcd> acc;
    BasisPtr signal_basis;
    std::optional<StateVector> single_pure;
    bool all_pure = true;
    int contributing = 0;

    for (const auto& [weight, psi] : branches) {
        TensorResult joint = tensor(psi, meter_in, joint_cap);
        if (dump_vacuum) joint = tensor(joint.state, *dump_vacuum, joint_cap);
        out.truncation_weight += weight * joint.truncation_weight;

        StateVector evolved = apply(gate_op_, joint.state);
        Conditional<StateVector> heralded = project(evolved, meter_out);
        if (heralded.flagged()) continue;

        double prob = weight * heralded.probability;
        std::optional<StateVector> pure;
        std::optional<DensityOperator> mixed;
        if (gate_ == GateKind::ideal) {
            pure = *heralded.state;
        } else if (options_.herald == HeraldRule::coincidence_basis) {
            Conditional<StateVector> clean = project(*heralded.state, *dump_vacuum);
            if (clean.flagged()) continue;
            prob *= clean.probability;
            pure = *clean.state;
        } else {
            mixed = partial_trace(DensityOperator::from_pure(*heralded.state), layout.dump_modes());
            all_pure = false;
        }

        const BasisPtr& b = pure ? pure->basis_ptr() : mixed->basis_ptr();
        Eigen::MatrixXcd contrib = pure ? Eigen::MatrixXcd(pure->amplitudes() * pure->amplitudes().adjoint())
                                        : mixed->matrix();
        if (!acc) {
            acc = Eigen::MatrixXcd::Zero(contrib.rows(), contrib.cols());
            signal_basis = b;
        }
        *acc += prob * contrib;
        out.herald_probability += prob;
        if (pure) single_pure = *pure;
        ++contributing;
    }

    if (out.herald_probability <= kZeroProbability || !acc) {
        out.herald_probability = std::max(out.herald_probability, 0.0);
        out.zero_herald = true;
    } else {
        DensityOperator rho(signal_basis, *acc / out.herald_probability);
        out.p0_out = occupancy_probability(rho, layout.signal.v, 0);
        out.p1_out = occupancy_probability(rho, layout.signal.v, 1);
        out.state_size_out = state_size(out.p0_out, out.p1_out);
        out.infinite_gain = std::isinf(out.state_size_out);
        if (all_pure && contributing == 1 && branches.size() == 1) {
            out.pure_state = single_pure;
            Occupation vac(2, 0), one(2, 0);
            one[signal_basis->position_of(layout.signal.v)] = 1;
            const Complex c0 = single_pure->amplitude(vac);
            const Complex c1 = single_pure->amplitude(one);
            if (alpha_v != Complex{} && std::abs(c0) > 0.0) out.amplitude_gain = c1 / (c0 * alpha_v);
        }
        out.conditional_state = std::move(rho);
    }

    const double p0_in = std::visit([&](const auto& s) { return occupancy_probability(s, layout.signal.v, 0); },
                                    signal.state);
    out.p1_in = std::visit([&](const auto& s) { return occupancy_probability(s, layout.signal.v, 1); },
                           signal.state);
    out.state_size_in = state_size(p0_in, out.p1_in);
    return out;
}

ProtocolOutcome run_nla(const SignalSpec& signal, MeterSetting meter, GateKind gate,
                        const SimulationOptions& options) {
    return NlaSimulator(gate, options).run(signal, meter);
}

AnalyticPrediction analytic(MeterSetting meter, Complex alpha) {
    const double phi = meter.phi;
    const double s = std::sin(0.5 * phi);
    const double c = std::cos(0.5 * phi);
    const double a2 = std::norm(alpha);
    const double n2 = std::exp(-a2);

    AnalyticPrediction p{};
    p.norm_in = std::exp(-0.5 * a2);
    if (std::abs(s) < 1e-15) {
        p.infinite_gain = true;
        p.g = Complex(0.0, std::numeric_limits<double>::infinity());
        p.g2 = std::numeric_limits<double>::infinity();
        p.g2_nondet = p.g2;
        p.norm_out = 0.0;
    } else {
        const Complex e = std::polar(1.0, phi);
        p.g = (1.0 + e) / (1.0 - e);
        p.g2 = (c * c) / (s * s);
        p.g2_nondet = p.g2 / 3.0;
        p.norm_out = std::exp(-0.5 * p.g2 * a2);
    }
    // 1 / (1 + 3|g'|^2) = sin^2(phi/2), so N^2/3 (1 + |g'|^2 a2) / (1 + 3|g'|^2)
    // = N^2/3 (sin^2 + cos^2 a2 / 3).
    const double shape = s * s + c * c * a2 / 3.0;
    p.p_success = n2 / 3.0 * shape;
    p.p_success_out_norm = p.infinite_gain ? 0.0 : std::exp(-p.g2_nondet * a2) / 3.0 * shape;
    p.p_success_ideal = n2 * (s * s + c * c * a2);
    return p;
}

MeterSetting phi_for_gain(double target_g2) {
    if (!(target_g2 >= 0.0) || std::isinf(target_g2)) {
        throw std::invalid_argument("phi_for_gain: target gain must be finite and >= 0");
    }
    if (target_g2 == 0.0) return {std::numbers::pi};
    return {2.0 * std::atan(1.0 / std::sqrt(target_g2))};
}

}  // namespace nla
