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

#ifndef NLA_FOCK_HPP
#define NLA_FOCK_HPP

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nla {

using Complex = std::complex<double>;
using ModeId = int;
/// Photon numbers per mode, aligned with FockBasis::modes().
using Occupation = std::vector<int>;

inline constexpr std::size_t kDefaultMaxBasisStates = 250000;
/// Probabilities at or below this are treated as exact zeros by projections.
inline constexpr double kZeroProbability = 1e-24;

class ResourceError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Truncated multimode Fock basis: every occupation vector over `modes` with
/// total photon number <= photon_cap, in ascending lexicographic order.
///
/// Modes carry global ids so that states living on different mode subsets can
/// be combined (tensor) and split (project, partial_trace). The id list is
/// kept sorted ascending.
class FockBasis {
   public:
    static std::shared_ptr<const FockBasis> create(std::vector<ModeId> modes, int photon_cap,
                                                   std::size_t max_states = kDefaultMaxBasisStates);

    int num_modes() const { return static_cast<int>(modes_.size()); }
    int photon_cap() const { return photon_cap_; }
    const std::vector<ModeId>& modes() const { return modes_; }
    std::size_t size() const { return states_.size(); }
    const Occupation& state(std::size_t i) const { return states_[i]; }
    const std::vector<Occupation>& states() const { return states_; }
    int total_photons(std::size_t i) const;

    std::optional<std::size_t> index_of(std::span<const int> occupation) const;
    /// Position of a global mode id inside occupation vectors, or -1.
    int position_of(ModeId mode) const;
    bool contains_mode(ModeId mode) const { return position_of(mode) >= 0; }

    bool operator==(const FockBasis& other) const {
        return photon_cap_ == other.photon_cap_ && modes_ == other.modes_;
    }

    /// Number of occupation vectors over `num_modes` modes with total <= cap.
    static std::size_t count_states(int num_modes, int photon_cap);

   private:
    FockBasis(std::vector<ModeId> modes, int photon_cap, std::vector<Occupation> states);

    std::vector<ModeId> modes_;
    int photon_cap_;
    std::vector<Occupation> states_;
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// Basis over modes 0..num_modes-1.
BasisPtr build_basis(int num_modes, int photon_cap, std::size_t max_states = kDefaultMaxBasisStates);
BasisPtr build_basis(std::vector<ModeId> modes, int photon_cap,
                     std::size_t max_states = kDefaultMaxBasisStates);

class StateVector {
   public:
    StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes);

    static StateVector vacuum(BasisPtr basis);
    static StateVector basis_state(BasisPtr basis, const Occupation& occupation);

    const FockBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    Complex amplitude(const Occupation& occupation) const;

    double norm() const { return amplitudes_.norm(); }
    double squared_norm() const { return amplitudes_.squaredNorm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
    StateVector normalized() const;
    /// <this|other>
    Complex inner(const StateVector& other) const;

   private:
    BasisPtr basis_;
    Eigen::VectorXcd amplitudes_;
};

class DensityOperator {
   public:
    DensityOperator(BasisPtr basis, Eigen::MatrixXcd matrix);

    static DensityOperator from_pure(const StateVector& psi);

    const FockBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    double trace() const { return matrix_.trace().real(); }
    DensityOperator normalized() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// Hermitian, unit trace and PSD within the given tolerances.
    bool is_physical(double tol = 1e-12, double eig_tol = 1e-10) const;

   private:
    BasisPtr basis_;
    Eigen::MatrixXcd matrix_;
};

enum class TransformKind { unitary, subunitary, general };

/// Linear map a_j^dag -> sum_i M(i, j) a_i^dag on the listed global modes.
class ModeTransform {
   public:
    ModeTransform(Eigen::MatrixXcd matrix, std::vector<ModeId> modes,
                  TransformKind kind = TransformKind::general);

    static ModeTransform identity(std::vector<ModeId> modes);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const std::vector<ModeId>& modes() const { return modes_; }
    TransformKind kind() const { return kind_; }

    /// `next` applied after `*this`, over the union of both mode sets.
    ModeTransform then(const ModeTransform& next) const;
    /// Full matrix over an explicit (superset) mode list.
    Eigen::MatrixXcd embedded(const std::vector<ModeId>& modes) const;

   private:
    Eigen::MatrixXcd matrix_;
    std::vector<ModeId> modes_;
    TransformKind kind_;
};

/// Dense operator on a truncated Fock space.
class FockOperator {
   public:
    FockOperator(BasisPtr basis, Eigen::MatrixXcd matrix);

    static FockOperator identity(BasisPtr basis);

    const FockBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    /// (*this) after `first`.
    FockOperator after(const FockOperator& first) const;

   private:
    BasisPtr basis_;
    Eigen::MatrixXcd matrix_;
};

struct TensorResult {
    StateVector state;
    /// Probability weight of product amplitudes dropped for exceeding the cap.
    double truncation_weight = 0.0;
};

/// Product state on the union of two disjoint mode sets. A negative cap means
/// a.cap + b.cap (nothing is dropped).
TensorResult tensor(const StateVector& a, const StateVector& b, int photon_cap = -1);

/// <m|U|n> = per(U[m, n]) / sqrt(prod m_i! prod n_j!) on the touched modes and
/// identity on every other mode.
FockOperator lift_mode_transform(const ModeTransform& t, const BasisPtr& basis);

StateVector apply(const FockOperator& op, const StateVector& state);
DensityOperator apply(const FockOperator& op, const DensityOperator& rho);

template <class State>
struct Conditional {
    /// Renormalized conditional state; empty when the outcome has zero probability.
    std::optional<State> state;
    double probability = 0.0;

    bool flagged() const { return !state.has_value(); }
};

/// Projects the modes of `projector` onto it. The conditional state lives on
/// the remaining modes with the same photon cap as the input.
Conditional<StateVector> project(const StateVector& state, const StateVector& projector);
Conditional<DensityOperator> project(const DensityOperator& rho, const StateVector& projector);

/// Traces out `modes`; tracing every mode leaves a 1x1 operator holding the trace.
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<ModeId>& modes);

/// Probability of exactly n photons in `mode` (unnormalized states give the raw weight).
double occupancy_probability(const StateVector& state, ModeId mode, int n);
double occupancy_probability(const DensityOperator& rho, ModeId mode, int n);

/// Matrix permanent (Ryser formula with Gray-code updates).
Complex permanent(const Eigen::MatrixXcd& m);

}  // namespace nla

#endif  // NLA_FOCK_HPP
