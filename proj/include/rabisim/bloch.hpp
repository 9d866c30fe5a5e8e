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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "rabisim/geometry.hpp"

namespace rabisim {

/// Averaged-local-Bloch model: a driven, detuned single spin with
/// phenomenological decay times plus per-sample disorder,
///   d<S>/dt = A <S> + b,  b = S_eq / T1.
/// T1 and T2 may be infinite (rate zero).
struct BlochParams {
    double t1_us = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    double larmor_mhz = 9700.0;   // F0
    double rabi_mhz = 55.96;      // F_R
    double drive_amplitude = 1.0; // h_p
    double xi_x = 0.0, xi_y = 0.0, xi_z = 0.0, zeta = 0.0;
    std::array<double, 3> s_eq = {0.0, 0.0, 0.5};

    double t1_rate() const { return std::isinf(t1_us) ? 0.0 : 1.0 / t1_us; }
    double t2_rate() const { return std::isinf(t2_us) ? 0.0 : 1.0 / t2_us; }
    /// Detuning a = 2 pi xi_z F0, in rad/us.
    double detuning() const;
    /// Drive b = pi h_p (1+zeta)(2+xi_x+xi_y) F_R, in rad/us.
    double drive() const;

    void validate() const;
};

struct BlochState {
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.5;
};

/// One split step e^{tau A1/2} e^{tau A2} e^{tau A1/2} with the source term
/// folded exactly into the decay half-steps: A1 is the diagonal decay, A2 the
/// exact rotation generated by the detuning/drive pair. Exact orthogonal
/// rotation when both rates vanish; O(tau^3) splitting error otherwise.
BlochState bloch_step(const BlochState& state, const BlochParams& params, double tau);

struct BlochTrace {
    std::vector<double> times;
    std::vector<double> sx, sy, sz;

    std::size_t size() const { return times.size(); }
};

/// Integrates from t_grid.front() == 0 through the grid, stepping with
/// sub-steps of length at most tau within each grid interval.
BlochTrace bloch_solve(const BlochParams& params, const std::vector<double>& t_grid,
                       const BlochState& init, double tau = 1e-5);

/// Disorder-averaged solve: per sample, xi_x/xi_y/xi_z are drawn from g_spec
/// and zeta from mw_spec with the sub-seeded generator; solutions are
/// averaged in sample-index order.
BlochTrace bloch_ensemble(const BlochParams& base, const LorentzianSpec& g_spec,
                          const LorentzianSpec& mw_spec, std::size_t n_samples,
                          const std::vector<double>& t_grid, const BlochState& init,
                          std::uint64_t seed, double tau = 1e-5);

/// Exact solution of the no-disorder model (xi = zeta = 0, finite or
/// infinite T2, 1/T1 = 0, sy(0) = 0): the transverse component decays at
/// 1/T2 and the longitudinal envelope at 1/(2 T2) with the shifted frequency
/// sqrt(b^2 - (1/(2 T2))^2).
BlochState bloch_nodisorder_exact(double t, const BlochParams& params,
                                  const BlochState& init);

} // namespace rabisim
