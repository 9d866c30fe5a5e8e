// Copyright 2026 The rabisim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Test-only brute-force propagator: dense Hamiltonian, eigendecomposition,
// exact matrix exponential. Independent of the split-step engine.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

#include "rabisim/engine.hpp"
#include "rabisim/hamiltonian.hpp"

namespace rabisim::testing {

inline Eigen::MatrixXd dense_hamiltonian(const CouplingTable& table) {
    const std::size_t n = table.num_spins;
    const std::size_t dim = std::size_t{1} << n;
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

    for (std::size_t i = 0; i < dim; ++i) {
        double diag = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double mj = (i >> j) & 1 ? -0.5 : 0.5;
            diag += two_pi * table.local_z[j] * mj;
        }
        for (const PairCoupling& pair : table.pairs) {
            const double mj = (i >> pair.j) & 1 ? -0.5 : 0.5;
            const double mk = (i >> pair.k) & 1 ? -0.5 : 0.5;
            diag += two_pi * pair.zz * mj * mk;
        }
        h(i, i) = diag;
        for (std::size_t j = 0; j < n; ++j)
            h(i ^ (std::size_t{1} << j), i) += two_pi * table.drive_x[j] * 0.5;
        for (const PairCoupling& pair : table.pairs) {
            const bool bj = (i >> pair.j) & 1;
            const bool bk = (i >> pair.k) & 1;
            if (bj != bk) {
                const std::size_t flipped =
                    i ^ (std::size_t{1} << pair.j) ^ (std::size_t{1} << pair.k);
                h(flipped, i) += two_pi * pair.xxyy * 0.5;
            }
        }
    }
    return h;
}

/// exp(-i H t) |state> through the spectral decomposition.
inline StateVector dense_evolve(const StateVector& state, const CouplingTable& table,
                                double t) {
    const Eigen::MatrixXd h = dense_hamiltonian(table);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const Eigen::MatrixXd& vectors = solver.eigenvectors();
    const Eigen::VectorXd& values = solver.eigenvalues();

    const std::size_t dim = state.dim();
    Eigen::VectorXcd psi(dim);
    for (std::size_t i = 0; i < dim; ++i)
        psi(i) = std::complex<double>(state.re[i], state.im[i]);

    Eigen::VectorXcd coeff = vectors.transpose() * psi;
    for (std::size_t k = 0; k < dim; ++k)
        coeff(k) *= std::exp(std::complex<double>(0.0, -values(k) * t));
    psi = vectors * coeff;

    StateVector out = state;
    for (std::size_t i = 0; i < dim; ++i) {
        out.re[i] = psi(i).real();
        out.im[i] = psi(i).imag();
    }
    return out;
}

inline double state_distance(const StateVector& a, const StateVector& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double dr = a.re[i] - b.re[i];
        const double di = a.im[i] - b.im[i];
        sum += dr * dr + di * di;
    }
    return std::sqrt(sum);
}

} // namespace rabisim::testing
