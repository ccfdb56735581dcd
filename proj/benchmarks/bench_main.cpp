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

#include <benchmark/benchmark.h>

#include <numeric>
#include <numbers>
#include <random>

#include "nla/experiment.hpp"
#include "nla/fock.hpp"
#include "nla/protocol.hpp"

namespace {

Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    Eigen::MatrixXcd z(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) z(i, j) = nla::Complex(d(rng), d(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
}

void BM_Permanent(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXcd m = random_unitary(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(nla::permanent(m));
}
BENCHMARK(BM_Permanent)->DenseRange(2, 8, 2);

void BM_LiftModeTransform(benchmark::State& state) {
    const int modes = static_cast<int>(state.range(0));
    const int cap = static_cast<int>(state.range(1));
    auto basis = nla::build_basis(modes, cap);
    std::vector<nla::ModeId> ids(static_cast<std::size_t>(modes));
    std::iota(ids.begin(), ids.end(), 0);
    const nla::ModeTransform t(random_unitary(modes, 2), ids, nla::TransformKind::unitary);
    for (auto _ : state) benchmark::DoNotOptimize(nla::lift_mode_transform(t, basis));
    state.counters["basis"] = static_cast<double>(basis->size());
}
BENCHMARK(BM_LiftModeTransform)->Args({2, 3})->Args({4, 3})->Args({8, 2})->Args({8, 4})->Unit(benchmark::kMicrosecond);

void BM_SimulatorSetup(benchmark::State& state) {
    const auto gate = state.range(0) == 0 ? nla::GateKind::ideal : nla::GateKind::ppbs;
    for (auto _ : state) benchmark::DoNotOptimize(nla::NlaSimulator(gate));
}
BENCHMARK(BM_SimulatorSetup)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ProtocolRun(benchmark::State& state) {
    const nla::NlaSimulator sim(nla::GateKind::ppbs);
    const auto signal = state.range(0) == 0 ? nla::SignalSpec::coherent(0.03) : nla::SignalSpec::phase_averaged(0.03);
    for (auto _ : state) benchmark::DoNotOptimize(sim.run(signal, {std::numbers::pi / 3.0}));
}
BENCHMARK(BM_ProtocolRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GainSweep(benchmark::State& state) {
    const nla::NlaSimulator sim(nla::GateKind::ppbs);
    std::vector<double> inputs(20);
    for (std::size_t i = 0; i < inputs.size(); ++i) inputs[i] = 1e-5 * std::pow(1.3, static_cast<double>(i));
    nla::SweepOptions o;
    o.herald_model = nla::HeraldingModel{0.35};
    o.counting = nla::CountingModel{1000000, 1, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(nla::gain_sweep(sim, 3.0, inputs, o));
}
BENCHMARK(BM_GainSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
