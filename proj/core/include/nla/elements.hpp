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

#ifndef NLA_ELEMENTS_HPP
#define NLA_ELEMENTS_HPP

#include <string>
#include <vector>

#include "nla/fock.hpp"

namespace nla {

/// A spatial mode carries two polarization modes.
struct SpatialMode {
    ModeId h;
    ModeId v;
};

/// Global mode assignment for the amplifier. The dump modes are the unused
/// ports of the two PPBS_H attenuators.
struct ModeLayout {
    SpatialMode signal{0, 1};
    SpatialMode meter{2, 3};
    SpatialMode signal_dump{4, 5};
    SpatialMode meter_dump{6, 7};

    static ModeLayout standard() { return ModeLayout{}; }

    std::vector<ModeId> signal_modes() const { return {signal.h, signal.v}; }
    std::vector<ModeId> meter_modes() const { return {meter.h, meter.v}; }
    std::vector<ModeId> dump_modes() const { return {signal_dump.h, signal_dump.v, meter_dump.h, meter_dump.v}; }
    std::vector<ModeId> all_modes() const;

    /// Throws if two names share an index.
    void validate() const;
};

struct PpbsSpec {
    double t_h;
    double t_v;

    void validate() const;
};

/// Working PPBS values: the interfering polarization is transmitted with 1/3.
inline constexpr double kPpbsTransmissivity = 1.0 / 3.0;
inline constexpr PpbsSpec kPpbsV{1.0, kPpbsTransmissivity};
inline constexpr PpbsSpec kPpbsH{kPpbsTransmissivity, 1.0};

struct LossSpec {
    double loss = 0.0;

    void validate() const;
};

enum class WaveplateKind { half, quarter };

struct WaveplateSetting {
    WaveplateKind kind;
    double angle;  // fast axis, radians

    /// Same setting with the angle folded into [0, pi).
    WaveplateSetting normalized() const;
};

/// [[sqrt(T), -sqrt(1-T)], [sqrt(1-T), sqrt(T)]] on (a, b). Two photons
/// entering opposite ports leave one per port with amplitude T - R.
ModeTransform beamsplitter(double transmissivity, ModeId a, ModeId b);

/// beamsplitter(t_h) on the H modes and beamsplitter(t_v) on the V modes.
ModeTransform ppbs(const PpbsSpec& spec, SpatialMode first, SpatialMode second);

/// Jones matrices in the {H, V} basis. HWP(0) leaves H unchanged.
ModeTransform hwp(double angle, SpatialMode mode);
ModeTransform qwp(double angle, SpatialMode mode);
ModeTransform waveplate(const WaveplateSetting& setting, SpatialMode mode);

ModeTransform phase_shift(double phase, ModeId mode);

/// Set of Kraus operators acting on density operators of one basis.
class KrausChannel {
   public:
    explicit KrausChannel(std::vector<FockOperator> ops);

    const std::vector<FockOperator>& operators() const { return ops_; }
    DensityOperator apply(const DensityOperator& rho) const;
    /// max |sum K^dag K - I| over matrix entries.
    double completeness_error() const;

   private:
    std::vector<FockOperator> ops_;
};

/// Pure loss on one mode: K_k |n> = sqrt(C(n,k) (1-L)^(n-k) L^k) |n-k>.
KrausChannel loss_channel(const LossSpec& spec, ModeId mode, const BasisPtr& basis);

/// Angles (HWP, QWP) that turn |H> into (|H> + i e^{i phi}|V>)/sqrt(2) up to a
/// global phase when the HWP is followed by the QWP.
struct MeterWaveplates {
    double hwp_angle;
    double qwp_angle;
};
MeterWaveplates meter_waveplates(double phi);

/// HWP angle that maps |H> to sqrt(r/(1+r)) |H> + sqrt(1/(1+r)) |V>, i.e. an
/// H:V intensity ratio of r.
double bias_hwp_angle(double h_to_v_ratio);

}  // namespace nla

#endif  // NLA_ELEMENTS_HPP
