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

#include "rabisim/geometry.hpp"
#include "rabisim/quadrature.hpp"

namespace rabisim::oracles {

/// Closed-form and quadrature results for non-interacting spins. Closed
/// forms drop the Lorentzian cutoff; quadrature variants honor it.
struct OracleParams {
    double larmor_mhz = 9700.0;   // F0
    double rabi_mhz = 55.96;      // F_R
    double drive_amplitude = 1.0; // h_p
    double gamma_g = 0.0;         // g-factor width (Gamma)
    double gamma_mw = 0.0;        // microwave width (gamma)
    double xi0 = 0.0;             // g cutoff; <=0 means 10*Gamma
    double zeta0 = 0.0;           // microwave cutoff; <=0 means 10*gamma

    double drive_mhz() const { return drive_amplitude * rabi_mhz; } // h_p F_R
    double gz_mhz() const { return gamma_g * larmor_mhz; }          // Gamma F0
    double rabi_angular() const;                                    // 2 pi h_p F_R

    LorentzianSpec g_spec() const;
    LorentzianSpec mw_spec() const;
};

/// J0 to absolute error <= 1e-10: power series up to |x| = 14, Hankel
/// asymptotics beyond.
double bessel_j0(double x);

/// Characteristic function of the truncated Lorentzian,
/// integral of p(x) cos(v x) over [-cutoff, cutoff]. Equals 1 at v = 0.
double truncated_charfn(double v, const LorentzianSpec& spec,
                        const QuadratureOptions& opts = {});

/// Undamped Rabi oscillation, cos(Omega_R t) / 2.
double rabi_ideal(double t, const OracleParams& p);

/// Microwave-amplitude disorder, no cutoff: (1/2) e^{-gamma Omega_R t} cos(Omega_R t).
double rabi_mw_disorder(double t, const OracleParams& p);

/// Same average against the truncated density.
double rabi_mw_disorder_quad(double t, const OracleParams& p,
                             const QuadratureOptions& opts = {});

/// (g_x, g_y) disorder, no cutoff: (1/2) e^{-Gamma Omega_R t} cos(Omega_R t).
double rabi_gxy_disorder(double t, const OracleParams& p);

double rabi_gxy_disorder_quad(double t, const OracleParams& p,
                              const QuadratureOptions& opts = {});

/// g_z disorder, z-aligned start: <Sz>, <Sy>; x-aligned start: <Sx>.
/// Default evaluation integrates the nutation-cone average against the
/// truncated density; this path is real and branch-free for any parameters.
double sz_gz_disorder(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});
double sy_gz_disorder(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});
double sx_gz_disorder(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});

/// No-cutoff closed forms (Bessel-kernel convolutions); require
/// h_p F_R > Gamma F0 and are used for cross-checking only.
double sz_gz_nocutoff(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});
double sy_gz_nocutoff(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});
double sx_gz_nocutoff(double t, const OracleParams& p,
                      const QuadratureOptions& opts = {});

/// No-cutoff long-time averages under g_z disorder: the z-start vector and
/// the x-start transverse component.
struct LongTimeAverages {
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;       // z-start offset, (1/2) g/(w + g)
    double sx_xstart = 0.0;  // x-start offset, (1/2) w/(w + g)
};

LongTimeAverages longtime_averages(const OracleParams& p);

} // namespace rabisim::oracles
