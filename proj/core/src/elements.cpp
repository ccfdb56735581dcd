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

#include "nla/elements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nla {

std::vector<ModeId> ModeLayout::all_modes() const {
    std::vector<ModeId> m = {signal.h, signal.v, meter.h, meter.v,
                             signal_dump.h, signal_dump.v, meter_dump.h, meter_dump.v};
    std::sort(m.begin(), m.end());
    return m;
}

void ModeLayout::validate() const {
    std::vector<ModeId> m = all_modes();
    if (std::adjacent_find(m.begin(), m.end()) != m.end()) {
        throw std::invalid_argument("ModeLayout: mode names must map to distinct indices");
    }
}

void PpbsSpec::validate() const {
    if (!(t_h >= 0.0 && t_h <= 1.0 && t_v >= 0.0 && t_v <= 1.0)) {
        throw std::invalid_argument("PpbsSpec: transmissivities must lie in [0, 1]");
    }
}

void LossSpec::validate() const {
    if (!(loss >= 0.0 && loss <= 1.0)) throw std::invalid_argument("LossSpec: loss must lie in [0, 1]");
}

WaveplateSetting WaveplateSetting::normalized() const {
    double a = std::fmod(angle, std::numbers::pi);
    if (a < 0.0) a += std::numbers::pi;
    return {kind, a};
}

ModeTransform beamsplitter(double transmissivity, ModeId a, ModeId b) {
    if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
        throw std::invalid_argument("beamsplitter: transmissivity must lie in [0, 1]");
    }
    const double t = std::sqrt(transmissivity);
    const double r = std::sqrt(1.0 - transmissivity);
    Eigen::MatrixXcd m(2, 2);
    m << t, -r, r, t;
    return ModeTransform(std::move(m), {a, b}, TransformKind::unitary);
}

ModeTransform ppbs(const PpbsSpec& spec, SpatialMode first, SpatialMode second) {
    spec.validate();
    return beamsplitter(spec.t_h, first.h, second.h).then(beamsplitter(spec.t_v, first.v, second.v));
}

ModeTransform hwp(double angle, SpatialMode mode) {
    const double c = std::cos(2.0 * angle);
    const double s = std::sin(2.0 * angle);
    Eigen::MatrixXcd m(2, 2);
    m << c, s, s, -c;
    return ModeTransform(std::move(m), {mode.h, mode.v}, TransformKind::unitary);
}

ModeTransform qwp(double angle, SpatialMode mode) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Eigen::Matrix2cd rot;
    rot << c, -s, s, c;
    Eigen::Matrix2cd retarder = Eigen::Matrix2cd::Zero();
    retarder(0, 0) = 1.0;
    retarder(1, 1) = Complex(0.0, 1.0);
    Eigen::MatrixXcd m = rot * retarder * rot.transpose();
    return ModeTransform(std::move(m), {mode.h, mode.v}, TransformKind::unitary);
}

ModeTransform waveplate(const WaveplateSetting& setting, SpatialMode mode) {
    WaveplateSetting w = setting.normalized();
    return w.kind == WaveplateKind::half ? hwp(w.angle, mode) : qwp(w.angle, mode);
}

ModeTransform phase_shift(double phase, ModeId mode) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = std::polar(1.0, phase);
    return ModeTransform(std::move(m), {mode}, TransformKind::unitary);
}

KrausChannel::KrausChannel(std::vector<FockOperator> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("KrausChannel: no operators");
    for (const auto& k : ops_) {
        if (!(k.basis() == ops_.front().basis())) throw std::invalid_argument("KrausChannel: basis mismatch");
    }
}

DensityOperator KrausChannel::apply(const DensityOperator& rho) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (const auto& k : ops_) {
        if (!(k.basis() == rho.basis())) throw std::invalid_argument("KrausChannel::apply: basis mismatch");
        out += k.matrix() * rho.matrix() * k.matrix().adjoint();
    }
    return DensityOperator(rho.basis_ptr(), std::move(out));
}

double KrausChannel::completeness_error() const {
    const auto n = ops_.front().matrix().rows();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& k : ops_) sum += k.matrix().adjoint() * k.matrix();
    return (sum - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

KrausChannel loss_channel(const LossSpec& spec, ModeId mode, const BasisPtr& basis) {
    spec.validate();
    const int p = basis->position_of(mode);
    if (p < 0) throw std::invalid_argument("loss_channel: mode not in basis");
    const double eta = 1.0 - spec.loss;
    const auto dim = static_cast<Eigen::Index>(basis->size());

    std::vector<FockOperator> ops;
    for (int k = 0; k <= basis->photon_cap(); ++k) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t i = 0; i < basis->size(); ++i) {
            const Occupation& occ = basis->state(i);
            const int n = occ[p];
            if (n < k) continue;
            Occupation out = occ;
            out[p] = n - k;
            const double binom = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
            const double amp = std::sqrt(binom * std::pow(eta, n - k) * std::pow(spec.loss, k));
            m(static_cast<Eigen::Index>(*basis->index_of(out)), static_cast<Eigen::Index>(i)) = amp;
        }
        ops.emplace_back(basis, std::move(m));
    }
    return KrausChannel(std::move(ops));
}

MeterWaveplates meter_waveplates(double phi) {
    // A QWP at pi/4 maps linear polarization at angle b to (|H> - i e^{2ib}|V>)/sqrt(2)
    // up to a global phase; an HWP at h rotates |H> to angle 2h.
    const double b = 0.5 * (phi - std::numbers::pi);
    return {0.5 * b, std::numbers::pi / 4.0};
}

double bias_hwp_angle(double h_to_v_ratio) {
    if (!(h_to_v_ratio >= 0.0)) throw std::invalid_argument("bias_hwp_angle: ratio must be >= 0");
    // cos(2a)^2 : sin(2a)^2 = r : 1
    return 0.5 * std::atan2(1.0, std::sqrt(h_to_v_ratio));
}

}  // namespace nla
