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
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rabisim/prng.hpp"

namespace rabisim {

using Vec3 = std::array<double, 3>;

/// Diluted diamond host lattice. Distances are in Angstrom.
struct LatticeSpec {
    double lattice_parameter = 5.43;

    /// Nearest-neighbour distance, a*sqrt(3)/4.
    double nearest_neighbor_distance() const;
};

/// Truncated Lorentzian: density ~ width / (x^2 + width^2) on [-cutoff, cutoff].
/// width == 0 degenerates to a point mass at 0.
struct LorentzianSpec {
    double width = 0.0;
    double cutoff = 1.0;

    void validate() const;
};

/// One disorder sample: spin positions plus per-spin g-factor (xi) and
/// microwave-amplitude (zeta) fractional deviations. All fields are fixed by
/// (inputs, seed); equal seeds give bit-identical realizations.
struct Realization {
    std::vector<Vec3> positions;   // Angstrom
    std::vector<double> xi_x, xi_y, xi_z;
    std::vector<double> zeta;
    std::uint64_t seed = 0;

    std::size_t num_spins() const { return positions.size(); }
};

class BoxTooSmallError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Inverse-transform sample of the truncated Lorentzian:
///   width * tan((2u - 1) * arctan(cutoff / width)),  u in (0,1).
double sample_lorentzian(double u, const LorentzianSpec& spec);

/// Density of the truncated Lorentzian (normalized on [-cutoff, cutoff]).
double lorentzian_pdf(double x, const LorentzianSpec& spec);

/// CDF of the truncated Lorentzian:
///   arctan(x/width) / (2 arctan(cutoff/width)) + 1/2.
double lorentzian_cdf(double x, const LorentzianSpec& spec);

/// Places `count` spins on distinct diamond-lattice sites sampled uniformly
/// without replacement from a cubic box of volume count/concentration with
/// open boundaries. Throws BoxTooSmallError if the box holds fewer sites.
std::vector<Vec3> place_spins(std::size_t count, double concentration,
                              const LatticeSpec& lattice, std::uint64_t seed);

/// Draws a full disorder realization: positions, then per spin the sequence
/// xi_x, xi_y, xi_z (g_spec) and zeta (mw_spec).
Realization draw_realization(std::size_t count, double concentration,
                             const LorentzianSpec& g_spec,
                             const LorentzianSpec& mw_spec,
                             std::uint64_t seed,
                             const LatticeSpec& lattice = {});

/// Structured text record of a realization (positions in Angstrom, xi, zeta,
/// seed), suitable for replay.
std::string format_realization(const Realization& real);

} // namespace rabisim
