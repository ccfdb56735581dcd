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

// Reference implementations used only by the tests. They share no code with
// the library: lifting is done by expanding products of creation operators,
// permanents by summing over permutations, and phase averages by quadrature.

#ifndef NLA_TESTS_ORACLES_HPP
#define NLA_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Complex = std::complex<double>;
using Exponents = std::vector<int>;

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// All occupation vectors over `modes` modes with total <= cap, by nested counting.
inline std::vector<Exponents> enumerate(int modes, int cap) {
    std::vector<Exponents> out;
    if (modes == 0) return {Exponents{}};
    Exponents occ(static_cast<std::size_t>(modes), 0);
    while (true) {
        int total = std::accumulate(occ.begin(), occ.end(), 0);
        if (total <= cap) out.push_back(occ);
        int i = modes - 1;
        while (i >= 0 && occ[static_cast<std::size_t>(i)] == cap) occ[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
        ++occ[static_cast<std::size_t>(i)];
    }
    return out;
}

inline Complex permanent_by_permutations(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) return 1.0;
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Complex sum = 0.0;
    do {
        Complex prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= m(i, perm[static_cast<std::size_t>(i)]);
        sum += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum;
}

/// Output amplitudes of U acting on |n>, where a_j^dag -> sum_i U(i, j) a_i^dag.
/// Expands the product of transformed creation operators term by term.
inline std::map<Exponents, Complex> expand_creation_operators(const Eigen::MatrixXcd& u, const Exponents& n) {
    const int modes = static_cast<int>(u.rows());
    std::map<Exponents, Complex> poly;
    double norm = 1.0;
    for (int v : n) norm *= factorial(v);
    poly[Exponents(static_cast<std::size_t>(modes), 0)] = 1.0 / std::sqrt(norm);
    for (int j = 0; j < modes; ++j) {
        for (int rep = 0; rep < n[static_cast<std::size_t>(j)]; ++rep) {
            std::map<Exponents, Complex> next;
            for (const auto& [mono, coeff] : poly) {
                for (int i = 0; i < modes; ++i) {
                    if (u(i, j) == Complex(0.0)) continue;
                    Exponents e = mono;
                    ++e[static_cast<std::size_t>(i)];
                    next[e] += coeff * u(i, j);
                }
            }
            poly = std::move(next);
        }
    }
    std::map<Exponents, Complex> out;
    for (const auto& [mono, coeff] : poly) {
        double f = 1.0;
        for (int v : mono) f *= factorial(v);
        out[mono] = coeff * std::sqrt(f);
    }
    return out;
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
inline Eigen::MatrixXcd haar_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng)) / std::sqrt(2.0);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(u(rng), u(rng));
    return m;
}

/// Photon-number distribution of |alpha e^{i theta}> averaged over theta with
/// an N-point trapezoid rule, including off-diagonal elements.
inline Eigen::MatrixXcd phase_average_by_quadrature(double magnitude, int cap, int points) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cap + 1, cap + 1);
    for (int k = 0; k < points; ++k) {
        const double theta = 2.0 * M_PI * k / points;
        Eigen::VectorXcd psi(cap + 1);
        Complex power = 1.0;
        for (int n = 0; n <= cap; ++n) {
            psi(n) = std::exp(-magnitude * magnitude / 2.0) * power / std::sqrt(factorial(n));
            power *= std::polar(magnitude, theta);
        }
        rho += psi * psi.adjoint();
    }
    return rho / static_cast<double>(points);
}

}  // namespace oracle

#endif  // NLA_TESTS_ORACLES_HPP
