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
#include <stdexcept>
#include <string>
#include <vector>

#include "rabisim/geometry.hpp"

namespace rabisim {

/// Model constants. Linear frequencies in MHz, time in us, distances in
/// Angstrom; every generator is scaled by 2*pi inside the engine, so
/// MHz * us products count cycles.
struct ModelParams {
    double larmor_mhz = 9700.0;        // F0
    double rabi_mhz = 55.96;           // F_R at unit drive amplitude
    double dipolar_mhz_a3 = 51880.0;   // D0, MHz * Angstrom^3
    double drive_amplitude = 1.0;      // h_p
    bool dipolar_enabled = true;

    void validate() const;
};

/// Dipolar coupling between spins j < k, in MHz.
struct PairCoupling {
    std::size_t j = 0;
    std::size_t k = 0;
    double zz = 0.0;    // coefficient of Sz_j Sz_k
    double xxyy = 0.0;  // coefficient of (Sx_j Sx_k + Sy_j Sy_k)
};

/// Rotating-frame secular Hamiltonian as real coefficients:
///   H / (2*pi*hbar) = sum_j local_z[j] Sz_j + drive_x[j] Sx_j
///                   + sum_{j<k} zz Sz_j Sz_k + xxyy (Sx_j Sx_k + Sy_j Sy_k)
/// with every entry in MHz. Immutable after construction.
struct CouplingTable {
    std::size_t num_spins = 0;
    std::vector<double> local_z;       // -F0 * xi_z[j]
    std::vector<double> drive_x;       // -h_p*F_R*(1+zeta)(2+xi_x+xi_y)/2
    std::vector<PairCoupling> pairs;   // all j<k pairs; zero when dipolar off
    bool dipolar_enabled = true;
    bool has_g_disorder = false;       // any xi != 0 at build time
};

class CoincidentSpinsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

CouplingTable build_couplings(const Realization& real, const ModelParams& params);

/// Structural self-check report. `ok()` is false when any finite-ness or
/// structural rule is violated; `b4_identity_max_dev` holds
/// max |xxyy + zz/2| over pairs and applies only to tables built without
/// g-factor disorder.
struct TableReport {
    bool all_finite = true;
    bool pairs_zero_when_disabled = true;
    bool b4_identity_applicable = false;
    double b4_identity_max_dev = 0.0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

TableReport consistency_check(const CouplingTable& table);

} // namespace rabisim
