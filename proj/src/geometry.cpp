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

#include "rabisim/geometry.hpp"

#include <cmath>
#include <sstream>

namespace rabisim {

double LatticeSpec::nearest_neighbor_distance() const {
    return lattice_parameter * std::sqrt(3.0) / 4.0;
}

void LorentzianSpec::validate() const {
    if (width < 0.0)
        throw std::invalid_argument("LorentzianSpec: width must be >= 0");
    if (cutoff <= 0.0)
        throw std::invalid_argument("LorentzianSpec: cutoff must be > 0");
}

double sample_lorentzian(double u, const LorentzianSpec& spec) {
    spec.validate();
    if (spec.width == 0.0)
        return 0.0;
    const double half_angle = std::atan(spec.cutoff / spec.width);
    return spec.width * std::tan((2.0 * u - 1.0) * half_angle);
}

double lorentzian_pdf(double x, const LorentzianSpec& spec) {
    spec.validate();
    if (std::abs(x) > spec.cutoff)
        return 0.0;
    const double norm = 2.0 * std::atan(spec.cutoff / spec.width);
    return spec.width / (norm * (x * x + spec.width * spec.width));
}

double lorentzian_cdf(double x, const LorentzianSpec& spec) {
    spec.validate();
    if (x <= -spec.cutoff)
        return 0.0;
    if (x >= spec.cutoff)
        return 1.0;
    return std::atan(x / spec.width) / (2.0 * std::atan(spec.cutoff / spec.width)) + 0.5;
}

namespace {

// The eight sites of the conventional diamond cell, in units of the lattice
// parameter: the fcc positions and the fcc positions shifted by (1/4,1/4,1/4).
constexpr std::array<Vec3, 8> kDiamondBasis = {{
    {0.00, 0.00, 0.00},
    {0.00, 0.50, 0.50},
    {0.50, 0.00, 0.50},
    {0.50, 0.50, 0.00},
    {0.25, 0.25, 0.25},
    {0.25, 0.75, 0.75},
    {0.75, 0.25, 0.75},
    {0.75, 0.75, 0.25},
}};

std::vector<Vec3> candidate_sites(double box_side, const LatticeSpec& lattice) {
    const double a = lattice.lattice_parameter;
    const int n_cells = static_cast<int>(std::ceil(box_side / a));
    std::vector<Vec3> sites;
    sites.reserve(static_cast<std::size_t>(8) * n_cells * n_cells * n_cells);
    for (int cx = 0; cx < n_cells; ++cx)
        for (int cy = 0; cy < n_cells; ++cy)
            for (int cz = 0; cz < n_cells; ++cz)
                for (const Vec3& b : kDiamondBasis) {
                    const Vec3 site = {(cx + b[0]) * a, (cy + b[1]) * a, (cz + b[2]) * a};
                    if (site[0] < box_side && site[1] < box_side && site[2] < box_side)
                        sites.push_back(site);
                }
    return sites;
}

} // namespace

std::vector<Vec3> place_spins(std::size_t count, double concentration,
                              const LatticeSpec& lattice, std::uint64_t seed) {
    if (count < 1)
        throw std::invalid_argument("place_spins: need at least one spin");
    if (concentration <= 0.0)
        throw std::invalid_argument("place_spins: concentration must be > 0");
    if (lattice.lattice_parameter <= 0.0)
        throw std::invalid_argument("place_spins: lattice parameter must be > 0");

    const double box_side = std::cbrt(static_cast<double>(count) / concentration);
    const std::vector<Vec3> sites = candidate_sites(box_side, lattice);
    if (sites.size() < count) {
        std::ostringstream msg;
        msg << "place_spins: box of side " << box_side << " A holds only "
            << sites.size() << " lattice sites, need " << count;
        throw BoxTooSmallError(msg.str());
    }

    // Uniform sampling without replacement by rejection.
    SplitMix64 rng(seed);
    std::vector<bool> taken(sites.size(), false);
    std::vector<Vec3> chosen;
    chosen.reserve(count);
    while (chosen.size() < count) {
        const std::size_t idx = static_cast<std::size_t>(rng.next_u64() % sites.size());
        if (taken[idx])
            continue;
        taken[idx] = true;
        chosen.push_back(sites[idx]);
    }
    return chosen;
}

Realization draw_realization(std::size_t count, double concentration,
                             const LorentzianSpec& g_spec,
                             const LorentzianSpec& mw_spec,
                             std::uint64_t seed,
                             const LatticeSpec& lattice) {
    g_spec.validate();
    mw_spec.validate();

    Realization real;
    real.seed = seed;
    real.positions = place_spins(count, concentration, lattice, sub_seed(seed, 0));

    SplitMix64 rng(sub_seed(seed, 1));
    real.xi_x.resize(count);
    real.xi_y.resize(count);
    real.xi_z.resize(count);
    real.zeta.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        real.xi_x[j] = sample_lorentzian(rng.next_open01(), g_spec);
        real.xi_y[j] = sample_lorentzian(rng.next_open01(), g_spec);
        real.xi_z[j] = sample_lorentzian(rng.next_open01(), g_spec);
        real.zeta[j] = sample_lorentzian(rng.next_open01(), mw_spec);
    }
    return real;
}

std::string format_realization(const Realization& real) {
    std::ostringstream out;
    out.precision(17);
    out << "seed " << real.seed << "\n";
    out << "spins " << real.num_spins() << "\n";
    for (std::size_t j = 0; j < real.num_spins(); ++j) {
        out << "spin " << j
            << " pos " << real.positions[j][0] << " " << real.positions[j][1]
            << " " << real.positions[j][2]
            << " xi " << real.xi_x[j] << " " << real.xi_y[j] << " " << real.xi_z[j]
            << " zeta " << real.zeta[j] << "\n";
    }
    return out.str();
}

} // namespace rabisim
