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

#include "rabisim/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace rabisim {

void ModelParams::validate() const {
    if (larmor_mhz < 0.0 || rabi_mhz < 0.0 || dipolar_mhz_a3 < 0.0)
        throw std::invalid_argument("ModelParams: frequencies must be >= 0");
    if (drive_amplitude < 0.0)
        throw std::invalid_argument("ModelParams: drive amplitude must be >= 0");
}

CouplingTable build_couplings(const Realization& real, const ModelParams& params) {
    params.validate();
    const std::size_t n = real.num_spins();
    if (n == 0)
        throw std::invalid_argument("build_couplings: empty realization");

    CouplingTable table;
    table.num_spins = n;
    table.dipolar_enabled = params.dipolar_enabled;
    table.local_z.resize(n);
    table.drive_x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        table.local_z[j] = -params.larmor_mhz * real.xi_z[j];
        table.drive_x[j] = -params.drive_amplitude * params.rabi_mhz *
                           (1.0 + real.zeta[j]) *
                           (2.0 + real.xi_x[j] + real.xi_y[j]) / 2.0;
        if (real.xi_x[j] != 0.0 || real.xi_y[j] != 0.0 || real.xi_z[j] != 0.0)
            table.has_g_disorder = true;
    }

    table.pairs.reserve(n * (n - 1) / 2);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            PairCoupling pair;
            pair.j = j;
            pair.k = k;
            if (params.dipolar_enabled) {
                const double dx = real.positions[k][0] - real.positions[j][0];
                const double dy = real.positions[k][1] - real.positions[j][1];
                const double dz = real.positions[k][2] - real.positions[j][2];
                const double r2 = dx * dx + dy * dy + dz * dz;
                if (r2 == 0.0) {
                    std::ostringstream msg;
                    msg << "build_couplings: spins " << j << " and " << k
                        << " are coincident";
                    throw CoincidentSpinsError(msg.str());
                }
                const double r3 = r2 * std::sqrt(r2);
                const double d0 = params.dipolar_mhz_a3;
                pair.zz = d0 * (1.0 + real.xi_z[j]) * (1.0 + real.xi_z[k]) *
                          (1.0 - 3.0 * dz * dz / r2) / r3;
                pair.xxyy = d0 *
                            ((1.0 + real.xi_x[j]) * (1.0 + real.xi_x[k]) *
                                 (1.0 - 3.0 * dx * dx / r2) +
                             (1.0 + real.xi_y[j]) * (1.0 + real.xi_y[k]) *
                                 (1.0 - 3.0 * dy * dy / r2)) /
                            (2.0 * r3);
            }
            table.pairs.push_back(pair);
        }
    }
    return table;
}

TableReport consistency_check(const CouplingTable& table) {
    TableReport report;

    auto check_finite = [&](double v, const char* what) {
        if (!std::isfinite(v)) {
            report.all_finite = false;
            report.violations.push_back(std::string("non-finite ") + what);
        }
    };
    for (double v : table.local_z)
        check_finite(v, "local_z");
    for (double v : table.drive_x)
        check_finite(v, "drive_x");
    for (const PairCoupling& p : table.pairs) {
        check_finite(p.zz, "pair zz");
        check_finite(p.xxyy, "pair xxyy");
        if (p.j >= p.k)
            report.violations.push_back("pair indices not ordered j < k");
        if (!table.dipolar_enabled && (p.zz != 0.0 || p.xxyy != 0.0)) {
            report.pairs_zero_when_disabled = false;
            report.violations.push_back("nonzero pair term with dipolar disabled");
        }
    }

    // Without g disorder the angular factors obey
    // (1-3x^2/r^2) + (1-3y^2/r^2) = -(1-3z^2/r^2), hence xxyy = -zz/2.
    if (!table.has_g_disorder && table.dipolar_enabled) {
        report.b4_identity_applicable = true;
        for (const PairCoupling& p : table.pairs) {
            const double dev = std::abs(p.xxyy + 0.5 * p.zz);
            report.b4_identity_max_dev = std::max(report.b4_identity_max_dev, dev);
            const double scale = std::max(1.0, std::abs(p.zz));
            if (dev > 1e-12 * scale)
                report.violations.push_back("pair violates xxyy = -zz/2");
        }
    }
    return report;
}

} // namespace rabisim
