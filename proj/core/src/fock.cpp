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

#include "nla/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>

namespace nla {

namespace {

void enumerate_states(int pos, int remaining, Occupation& current, std::vector<Occupation>& out) {
    if (pos == static_cast<int>(current.size())) {
        out.push_back(current);
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        current[pos] = v;
        enumerate_states(pos + 1, remaining - v, current, out);
    }
    current[pos] = 0;
}

double sqrt_factorial_product(const Occupation& occ) {
    double p = 1.0;
    for (int n : occ) {
        for (int k = 2; k <= n; ++k) p *= k;
    }
    return std::sqrt(p);
}

void require_same_basis(const FockBasis& a, const FockBasis& b, const char* what) {
    if (!(a == b)) throw std::invalid_argument(std::string(what) + ": basis mismatch");
}

std::vector<ModeId> sorted_unique(std::vector<ModeId> modes) {
    std::sort(modes.begin(), modes.end());
    if (std::adjacent_find(modes.begin(), modes.end()) != modes.end()) {
        throw std::invalid_argument("duplicate mode id");
    }
    return modes;
}

/// Splits every state of `full` into (kept, removed) parts and records the
/// index of each part in the matching sub-basis.
struct Split {
    std::vector<std::ptrdiff_t> kept_index;
    std::vector<std::ptrdiff_t> removed_index;
};

Split split_basis(const FockBasis& full, const FockBasis& kept, const FockBasis& removed) {
    std::vector<int> kept_pos, removed_pos;
    for (ModeId m : kept.modes()) kept_pos.push_back(full.position_of(m));
    for (ModeId m : removed.modes()) removed_pos.push_back(full.position_of(m));

    Split s;
    s.kept_index.resize(full.size());
    s.removed_index.resize(full.size());
    Occupation k(kept_pos.size()), r(removed_pos.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        const Occupation& occ = full.state(i);
        for (std::size_t a = 0; a < kept_pos.size(); ++a) k[a] = occ[kept_pos[a]];
        for (std::size_t a = 0; a < removed_pos.size(); ++a) r[a] = occ[removed_pos[a]];
        auto ki = kept.index_of(k);
        auto ri = removed.index_of(r);
        s.kept_index[i] = ki ? static_cast<std::ptrdiff_t>(*ki) : -1;
        s.removed_index[i] = ri ? static_cast<std::ptrdiff_t>(*ri) : -1;
    }
    return s;
}

std::vector<ModeId> complement_modes(const FockBasis& basis, const std::vector<ModeId>& removed) {
    std::vector<ModeId> kept;
    for (ModeId m : basis.modes()) {
        if (std::find(removed.begin(), removed.end(), m) == removed.end()) kept.push_back(m);
    }
    return kept;
}

}  // namespace

// ---------------------------------------------------------------------------
// FockBasis

FockBasis::FockBasis(std::vector<ModeId> modes, int photon_cap, std::vector<Occupation> states)
    : modes_(std::move(modes)), photon_cap_(photon_cap), states_(std::move(states)) {}

std::size_t FockBasis::count_states(int num_modes, int photon_cap) {
    // C(num_modes + photon_cap, num_modes), saturating.
    long double c = 1.0L;
    for (int k = 1; k <= num_modes; ++k) {
        c = c * (photon_cap + k) / k;
    }
    if (c > 1e18L) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(std::llround(static_cast<double>(c)));
}

std::shared_ptr<const FockBasis> FockBasis::create(std::vector<ModeId> modes, int photon_cap,
                                                   std::size_t max_states) {
    if (photon_cap < 0) throw std::invalid_argument("photon_cap must be >= 0");
    modes = sorted_unique(std::move(modes));
    std::size_t n = count_states(static_cast<int>(modes.size()), photon_cap);
    if (n > max_states) {
        throw ResourceError("Fock basis of " + std::to_string(n) + " states exceeds the limit of " +
                            std::to_string(max_states));
    }
    std::vector<Occupation> states;
    states.reserve(n);
    Occupation current(modes.size(), 0);
    enumerate_states(0, photon_cap, current, states);
    return std::shared_ptr<const FockBasis>(new FockBasis(std::move(modes), photon_cap, std::move(states)));
}

int FockBasis::total_photons(std::size_t i) const {
    return std::accumulate(states_[i].begin(), states_[i].end(), 0);
}

std::optional<std::size_t> FockBasis::index_of(std::span<const int> occupation) const {
    if (occupation.size() != modes_.size()) return std::nullopt;
    auto it = std::lower_bound(states_.begin(), states_.end(), occupation,
                               [](const Occupation& s, std::span<const int> key) {
                                   return std::lexicographical_compare(s.begin(), s.end(), key.begin(),
                                                                       key.end());
                               });
    if (it == states_.end() || !std::equal(it->begin(), it->end(), occupation.begin(), occupation.end())) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - states_.begin());
}

int FockBasis::position_of(ModeId mode) const {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end() || *it != mode) return -1;
    return static_cast<int>(it - modes_.begin());
}

BasisPtr build_basis(int num_modes, int photon_cap, std::size_t max_states) {
    if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
    std::vector<ModeId> modes(num_modes);
    std::iota(modes.begin(), modes.end(), 0);
    return FockBasis::create(std::move(modes), photon_cap, max_states);
}

BasisPtr build_basis(std::vector<ModeId> modes, int photon_cap, std::size_t max_states) {
    if (modes.empty()) throw std::invalid_argument("num_modes must be >= 1");
    return FockBasis::create(std::move(modes), photon_cap, max_states);
}

// ---------------------------------------------------------------------------
// StateVector / DensityOperator

StateVector::StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
    if (!basis_) throw std::invalid_argument("StateVector: null basis");
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_->size()) {
        throw std::invalid_argument("StateVector: amplitude count does not match basis size");
    }
}

StateVector StateVector::vacuum(BasisPtr basis) {
    return basis_state(basis, Occupation(basis->num_modes(), 0));
}

StateVector StateVector::basis_state(BasisPtr basis, const Occupation& occupation) {
    auto idx = basis->index_of(occupation);
    if (!idx) throw std::invalid_argument("basis_state: occupation not in basis");
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    amps(static_cast<Eigen::Index>(*idx)) = 1.0;
    return StateVector(std::move(basis), std::move(amps));
}

Complex StateVector::amplitude(const Occupation& occupation) const {
    auto idx = basis_->index_of(occupation);
    return idx ? amplitudes_(static_cast<Eigen::Index>(*idx)) : Complex{};
}

StateVector StateVector::normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize a zero state");
    return StateVector(basis_, amplitudes_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
    require_same_basis(*basis_, *other.basis_, "inner");
    return amplitudes_.dot(other.amplitudes_);
}

DensityOperator::DensityOperator(BasisPtr basis, Eigen::MatrixXcd matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    if (!basis_) throw std::invalid_argument("DensityOperator: null basis");
    auto n = static_cast<Eigen::Index>(basis_->size());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw std::invalid_argument("DensityOperator: matrix size does not match basis size");
    }
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
    return DensityOperator(psi.basis_ptr(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityOperator DensityOperator::normalized() const {
    double t = trace();
    if (t <= 0.0) throw std::domain_error("cannot normalize a density operator with non-positive trace");
    return DensityOperator(basis_, matrix_ / t);
}

double DensityOperator::hermiticity_error() const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
    Eigen::MatrixXcd h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool DensityOperator::is_physical(double tol, double eig_tol) const {
    return hermiticity_error() <= tol && std::abs(trace() - 1.0) <= tol && min_eigenvalue() >= -eig_tol;
}

// ---------------------------------------------------------------------------
// ModeTransform / FockOperator

ModeTransform::ModeTransform(Eigen::MatrixXcd matrix, std::vector<ModeId> modes, TransformKind kind)
    : matrix_(std::move(matrix)), modes_(std::move(modes)), kind_(kind) {
    if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("ModeTransform: matrix is not square");
    if (static_cast<std::size_t>(matrix_.rows()) != modes_.size()) {
        throw std::invalid_argument("ModeTransform: matrix size does not match mode count");
    }
    std::vector<ModeId> check = modes_;
    std::sort(check.begin(), check.end());
    if (std::adjacent_find(check.begin(), check.end()) != check.end()) {
        throw std::invalid_argument("ModeTransform: duplicate mode id");
    }
    const auto n = matrix_.rows();
    if (kind_ == TransformKind::unitary) {
        double err = (matrix_.adjoint() * matrix_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
        if (err > 1e-10) throw std::invalid_argument("ModeTransform: matrix flagged unitary is not unitary");
    } else if (kind_ == TransformKind::subunitary && n > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_);
        if (svd.singularValues().maxCoeff() > 1.0 + 1e-12) {
            throw std::invalid_argument("ModeTransform: singular value above 1 in subunitary transform");
        }
    }
}

ModeTransform ModeTransform::identity(std::vector<ModeId> modes) {
    auto n = static_cast<Eigen::Index>(modes.size());
    return ModeTransform(Eigen::MatrixXcd::Identity(n, n), std::move(modes), TransformKind::unitary);
}

Eigen::MatrixXcd ModeTransform::embedded(const std::vector<ModeId>& modes) const {
    auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(n, n);
    std::vector<Eigen::Index> pos(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        auto it = std::find(modes.begin(), modes.end(), modes_[k]);
        if (it == modes.end()) throw std::invalid_argument("ModeTransform::embedded: mode not in target list");
        pos[k] = it - modes.begin();
    }
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        full(pos[i], pos[i]) = 0.0;
    }
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            full(pos[i], pos[j]) = matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return full;
}

ModeTransform ModeTransform::then(const ModeTransform& next) const {
    std::vector<ModeId> all = modes_;
    all.insert(all.end(), next.modes_.begin(), next.modes_.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    Eigen::MatrixXcd m = next.embedded(all) * embedded(all);

    TransformKind kind = TransformKind::general;
    if (kind_ == TransformKind::unitary && next.kind_ == TransformKind::unitary) {
        kind = TransformKind::unitary;
    } else if (kind_ != TransformKind::general && next.kind_ != TransformKind::general) {
        kind = TransformKind::subunitary;
    }
    return ModeTransform(std::move(m), std::move(all), kind);
}

FockOperator::FockOperator(BasisPtr basis, Eigen::MatrixXcd matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    if (!basis_) throw std::invalid_argument("FockOperator: null basis");
    auto n = static_cast<Eigen::Index>(basis_->size());
    if (matrix_.rows() != n || matrix_.cols() != n) {
        throw std::invalid_argument("FockOperator: matrix size does not match basis size");
    }
}

FockOperator FockOperator::identity(BasisPtr basis) {
    auto n = static_cast<Eigen::Index>(basis->size());
    return FockOperator(std::move(basis), Eigen::MatrixXcd::Identity(n, n));
}

FockOperator FockOperator::after(const FockOperator& first) const {
    require_same_basis(*basis_, *first.basis_, "FockOperator::after");
    return FockOperator(basis_, matrix_ * first.matrix_);
}

// ---------------------------------------------------------------------------
// Operations

TensorResult tensor(const StateVector& a, const StateVector& b, int photon_cap) {
    const FockBasis& ba = a.basis();
    const FockBasis& bb = b.basis();
    for (ModeId m : ba.modes()) {
        if (bb.contains_mode(m)) throw std::invalid_argument("tensor: overlapping mode sets");
    }
    if (photon_cap < 0) photon_cap = ba.photon_cap() + bb.photon_cap();

    std::vector<ModeId> modes = ba.modes();
    modes.insert(modes.end(), bb.modes().begin(), bb.modes().end());
    BasisPtr out_basis = FockBasis::create(modes, photon_cap);

    std::vector<int> pos_a, pos_b;
    for (ModeId m : ba.modes()) pos_a.push_back(out_basis->position_of(m));
    for (ModeId m : bb.modes()) pos_b.push_back(out_basis->position_of(m));

    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out_basis->size()));
    double dropped = 0.0;
    Occupation occ(out_basis->num_modes());
    for (std::size_t i = 0; i < ba.size(); ++i) {
        Complex ai = a.amplitudes()(static_cast<Eigen::Index>(i));
        if (ai == Complex{}) continue;
        for (std::size_t j = 0; j < bb.size(); ++j) {
            Complex bj = b.amplitudes()(static_cast<Eigen::Index>(j));
            if (bj == Complex{}) continue;
            for (std::size_t k = 0; k < pos_a.size(); ++k) occ[pos_a[k]] = ba.state(i)[k];
            for (std::size_t k = 0; k < pos_b.size(); ++k) occ[pos_b[k]] = bb.state(j)[k];
            Complex prod = ai * bj;
            if (ba.total_photons(i) + bb.total_photons(j) > photon_cap) {
                dropped += std::norm(prod);
                continue;
            }
            amps(static_cast<Eigen::Index>(*out_basis->index_of(occ))) += prod;
        }
    }
    return TensorResult{StateVector(std::move(out_basis), std::move(amps)), dropped};
}

FockOperator lift_mode_transform(const ModeTransform& t, const BasisPtr& basis) {
    const auto& modes = t.modes();
    if (static_cast<int>(modes.size()) > basis->num_modes()) {
        throw std::invalid_argument("lift_mode_transform: transform has more modes than the basis");
    }
    std::vector<int> touched;
    for (ModeId m : modes) {
        int p = basis->position_of(m);
        if (p < 0) throw std::invalid_argument("lift_mode_transform: mode " + std::to_string(m) + " not in basis");
        touched.push_back(p);
    }
    std::vector<int> untouched;
    for (int p = 0; p < basis->num_modes(); ++p) {
        if (std::find(touched.begin(), touched.end(), p) == touched.end()) untouched.push_back(p);
    }

    // Matrix elements only connect states agreeing on untouched modes and
    // carrying the same photon number on the touched ones.
    std::map<Occupation, std::vector<std::size_t>> groups;
    std::vector<std::vector<Eigen::Index>> photon_modes(basis->size());
    std::vector<double> norms(basis->size());
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const Occupation& occ = basis->state(i);
        Occupation key;
        key.reserve(untouched.size() + 1);
        for (int p : untouched) key.push_back(occ[p]);
        int total = 0;
        Occupation local;
        for (std::size_t k = 0; k < touched.size(); ++k) {
            int n = occ[touched[k]];
            total += n;
            local.push_back(n);
            for (int c = 0; c < n; ++c) photon_modes[i].push_back(static_cast<Eigen::Index>(k));
        }
        key.push_back(total);
        norms[i] = sqrt_factorial_product(local);
        groups[key].push_back(i);
    }

    const Eigen::MatrixXcd& u = t.matrix();
    const auto dim = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd sub;
    for (const auto& [key, members] : groups) {
        const auto n = static_cast<Eigen::Index>(key.back());
        sub.resize(n, n);
        for (std::size_t col : members) {
            const auto& cols = photon_modes[col];
            for (std::size_t row : members) {
                const auto& rows = photon_modes[row];
                for (Eigen::Index r = 0; r < n; ++r) {
                    for (Eigen::Index c = 0; c < n; ++c) sub(r, c) = u(rows[r], cols[c]);
                }
                out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                    permanent(sub) / (norms[row] * norms[col]);
            }
        }
    }
    return FockOperator(basis, std::move(out));
}

StateVector apply(const FockOperator& op, const StateVector& state) {
    require_same_basis(op.basis(), state.basis(), "apply");
    return StateVector(state.basis_ptr(), op.matrix() * state.amplitudes());
}

DensityOperator apply(const FockOperator& op, const DensityOperator& rho) {
    require_same_basis(op.basis(), rho.basis(), "apply");
    return DensityOperator(rho.basis_ptr(), op.matrix() * rho.matrix() * op.matrix().adjoint());
}

namespace {

struct ProjectionMap {
    BasisPtr remaining;
    // (remaining index, full index, coefficient) triples.
    std::vector<std::tuple<Eigen::Index, Eigen::Index, Complex>> entries;
};

ProjectionMap projection_map(const FockBasis& full, const StateVector& projector) {
    const FockBasis& pb = projector.basis();
    for (ModeId m : pb.modes()) {
        if (!full.contains_mode(m)) throw std::invalid_argument("project: projector mode not in state basis");
    }
    if (!projector.is_normalized(1e-10)) throw std::invalid_argument("project: projector is not normalized");

    std::vector<ModeId> kept = complement_modes(full, pb.modes());
    BasisPtr remaining = FockBasis::create(kept, full.photon_cap());
    Split s = split_basis(full, *remaining, pb);

    ProjectionMap map{remaining, {}};
    for (std::size_t i = 0; i < full.size(); ++i) {
        if (s.removed_index[i] < 0) continue;
        Complex c = std::conj(projector.amplitudes()(s.removed_index[i]));
        if (c == Complex{}) continue;
        map.entries.emplace_back(s.kept_index[i], static_cast<Eigen::Index>(i), c);
    }
    return map;
}

}  // namespace

Conditional<StateVector> project(const StateVector& state, const StateVector& projector) {
    ProjectionMap map = projection_map(state.basis(), projector);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(map.remaining->size()));
    for (const auto& [r, i, c] : map.entries) out(r) += c * state.amplitudes()(i);

    Conditional<StateVector> result;
    result.probability = out.squaredNorm();
    if (result.probability > kZeroProbability) {
        result.state = StateVector(map.remaining, out / std::sqrt(result.probability));
    }
    return result;
}

Conditional<DensityOperator> project(const DensityOperator& rho, const StateVector& projector) {
    ProjectionMap map = projection_map(rho.basis(), projector);
    const auto dim = static_cast<Eigen::Index>(map.remaining->size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [r, i, c] : map.entries) {
        for (const auto& [r2, i2, c2] : map.entries) {
            out(r, r2) += c * rho.matrix()(i, i2) * std::conj(c2);
        }
    }
    Conditional<DensityOperator> result;
    // Rounding can leave the trace of a positive block a hair below zero.
    result.probability = std::max(0.0, out.trace().real());
    if (result.probability > kZeroProbability) {
        result.state = DensityOperator(map.remaining, out / result.probability);
    }
    return result;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<ModeId>& modes) {
    const FockBasis& full = rho.basis();
    for (ModeId m : modes) {
        if (!full.contains_mode(m)) throw std::invalid_argument("partial_trace: mode not in basis");
    }
    std::vector<ModeId> kept = complement_modes(full, modes);
    BasisPtr kept_basis = FockBasis::create(kept, full.photon_cap());
    BasisPtr traced_basis = FockBasis::create(sorted_unique(modes), full.photon_cap());
    Split s = split_basis(full, *kept_basis, *traced_basis);

    // Bucket full indices by their traced-mode configuration.
    std::vector<std::vector<std::size_t>> buckets(traced_basis->size());
    for (std::size_t i = 0; i < full.size(); ++i) buckets[s.removed_index[i]].push_back(i);

    const auto dim = static_cast<Eigen::Index>(kept_basis->size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& bucket : buckets) {
        for (std::size_t i : bucket) {
            for (std::size_t j : bucket) {
                out(s.kept_index[i], s.kept_index[j]) +=
                    rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return DensityOperator(std::move(kept_basis), std::move(out));
}

double occupancy_probability(const StateVector& state, ModeId mode, int n) {
    int p = state.basis().position_of(mode);
    if (p < 0) throw std::invalid_argument("occupancy_probability: mode not in basis");
    double total = 0.0;
    for (std::size_t i = 0; i < state.basis().size(); ++i) {
        if (state.basis().state(i)[p] == n) total += std::norm(state.amplitudes()(static_cast<Eigen::Index>(i)));
    }
    return total;
}

double occupancy_probability(const DensityOperator& rho, ModeId mode, int n) {
    int p = rho.basis().position_of(mode);
    if (p < 0) throw std::invalid_argument("occupancy_probability: mode not in basis");
    double total = 0.0;
    for (std::size_t i = 0; i < rho.basis().size(); ++i) {
        auto k = static_cast<Eigen::Index>(i);
        if (rho.basis().state(i)[p] == n) total += rho.matrix()(k, k).real();
    }
    return total;
}

Complex permanent(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("permanent: matrix is not square");
    const auto n = m.rows();
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) + m(0, 1) * m(1, 0);
    if (n > 30) throw ResourceError("permanent: matrix too large");

    Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
    Complex total{};
    std::uint64_t prev = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        std::uint64_t gray = k ^ (k >> 1);
        std::uint64_t flipped = gray ^ prev;
        auto col = static_cast<Eigen::Index>(std::countr_zero(flipped));
        if (gray & flipped) {
            row_sums += m.col(col);
        } else {
            row_sums -= m.col(col);
        }
        prev = gray;
        Complex prod = row_sums.prod();
        total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
    }
    return (n % 2 == 0) ? total : -total;
}

}  // namespace nla
