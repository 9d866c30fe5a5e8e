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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rabisim/hamiltonian.hpp"

namespace rabisim {

/// Hard cap on the spin count; memory is 16 B * 2^L.
inline constexpr std::size_t kMaxSpins = 30;

/// 2^L complex amplitudes over the Sz product basis, split into real and
/// imaginary parts. Bit j of a basis index is spin j; bit value 0 means
/// m_j = +1/2. Norm stays within 1e-10 of unity under evolution.
struct StateVector {
    std::size_t num_spins = 0;
    std::vector<double> re;
    std::vector<double> im;

    std::size_t dim() const { return re.size(); }
    double norm() const;
};

enum class ProductAxis { ZPlus, XPlus };

/// All spins aligned along +z (the all-up basis state) or +x (uniform
/// superposition with amplitudes 2^{-L/2}).
StateVector init_product_state(std::size_t num_spins, ProductAxis axis);

struct Magnetization {
    double mx = 0.0;
    double my = 0.0;
    double mz = 0.0;
};

/// Exact expectation values of M^x, M^y, M^z (no sampling noise).
Magnetization measure(const StateVector& state);

/// <H>/(2*pi*hbar) in MHz for the given coupling table.
double energy_expectation(const StateVector& state, const CouplingTable& table);

struct EvolutionPlan {
    double dt = 1e-5;               // us per step
    std::size_t n_steps = 0;
    std::size_t record_every = 100; // step stride between trace records

    void validate() const;
};

/// Time series of magnetization and energy expectation values.
struct Trace {
    std::vector<double> times;  // us
    std::vector<double> mx, my, mz;
    std::vector<double> energy; // MHz

    std::size_t size() const { return times.size(); }
};

/// Second-order split-step propagator with exact sub-step unitaries.
///
/// The Hamiltonian is split into (A) single-spin terms, (B) zz pair terms
/// and (C) xxyy pair terms. One step applies the palindrome
///   A(dt/2) B(dt/2) C(dt/2,forward) C(dt/2,reverse) B(dt/2) A(dt/2).
/// A factorizes into exact 2x2 rotations, B is a diagonal phase, and each
/// xxyy term is an exact rotation in the {01,10} subspace of its pair; the
/// forward/reverse sweep keeps the whole sequence palindromic even though
/// xxyy terms sharing a spin do not commute. Every sub-step is unitary, so
/// the norm is conserved regardless of dt.
class SplitStepEvolver {
  public:
    SplitStepEvolver(const CouplingTable& table, double dt);

    double dt() const { return dt_; }
    std::size_t num_spins() const { return num_spins_; }

    /// One full step; state must share the table's spin count.
    void step(StateVector& state) const;

    /// n steps, algebraically identical to n step() calls but with the
    /// adjacent half applications of A merged.
    void advance(StateVector& state, std::size_t n) const;

  private:
    struct SingleRot {
        double c = 1.0; // cos(pi*Omega*h)
        double z = 0.0; // (cz/Omega) sin(pi*Omega*h)
        double x = 0.0; // (cx/Omega) sin(pi*Omega*h)
    };
    struct PairRot {
        std::size_t lo_bit = 0;
        std::size_t hi_bit = 0;
        double c = 1.0; // cos(pi*cxy*h)
        double s = 0.0; // sin(pi*cxy*h)
    };

    static SingleRot make_single(double cz, double cx, double h);

    void apply_singles(StateVector& state, const std::vector<SingleRot>& rots) const;
    void apply_zz_half(StateVector& state) const;
    void apply_pairs_half(StateVector& state, bool reverse) const;
    void core(StateVector& state) const;

    std::size_t num_spins_ = 0;
    double dt_ = 0.0;
    std::vector<SingleRot> singles_half_;
    std::vector<SingleRot> singles_full_;
    std::vector<PairRot> pair_rots_;
    std::vector<double> zz_phase_re_; // per-index phase factor for dt/2
    std::vector<double> zz_phase_im_;
    bool has_zz_ = false;
};

/// Convenience single step with a throwaway evolver.
void step(StateVector& state, const CouplingTable& table, double dt);

/// Repeated stepping with records every plan.record_every steps (plus t = 0
/// and the final step). The state is evolved in place.
Trace evolve_and_record(StateVector& state, const CouplingTable& table,
                        const EvolutionPlan& plan);

} // namespace rabisim
