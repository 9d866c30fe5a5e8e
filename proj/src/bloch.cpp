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

#include "rabisim/bloch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rabisim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// (1 - e^{-h r}) / r, finite as r -> 0.
double decay_integral(double h, double rate) {
    if (rate == 0.0)
        return h;
    return -std::expm1(-h * rate) / rate;
}
} // namespace

double BlochParams::detuning() const { return kTwoPi * xi_z * larmor_mhz; }

double BlochParams::drive() const {
    return std::numbers::pi * drive_amplitude * (1.0 + zeta) *
           (2.0 + xi_x + xi_y) * rabi_mhz;
}

void BlochParams::validate() const {
    if (!(t1_us > 0.0) || !(t2_us > 0.0))
        throw std::invalid_argument("BlochParams: T1 and T2 must be positive (or infinite)");
}

BlochState bloch_step(const BlochState& state, const BlochParams& params, double tau) {
    if (!(tau > 0.0))
        throw std::invalid_argument("bloch_step: tau must be > 0");
    params.validate();

    const double r2 = params.t2_rate();
    const double r1 = params.t1_rate();
    const double half = 0.5 * tau;
    const double ex = std::exp(-half * r2);
    const double ez = std::exp(-half * r1);
    const double bx = params.s_eq[0] * r1;
    const double by = params.s_eq[1] * r1;
    const double bz = params.s_eq[2] * r1;
    const double dx = bx * decay_integral(half, r2);
    const double dy = by * decay_integral(half, r2);
    const double dz = bz * decay_integral(half, r1);

    BlochState s = state;
    // e^{(tau/2) A1} with the exact source integral.
    s.sx = ex * s.sx + dx;
    s.sy = ex * s.sy + dy;
    s.sz = ez * s.sz + dz;

    // e^{tau A2}: Rodrigues form of the rotation generated by
    // A2 = [[0,a,0],[-a,0,b],[0,-b,0]].
    const double a = params.detuning();
    const double b = params.drive();
    const double omega = std::hypot(a, b);
    if (omega > 0.0) {
        const double theta = tau * omega;
        const double c1 = std::sin(theta) / omega;
        const double c2 = (1.0 - std::cos(theta)) / (omega * omega);
        const double w1x = a * s.sy;
        const double w1y = -a * s.sx + b * s.sz;
        const double w1z = -b * s.sy;
        const double w2x = -a * a * s.sx + a * b * s.sz;
        const double w2y = -(a * a + b * b) * s.sy;
        const double w2z = a * b * s.sx - b * b * s.sz;
        s.sx += c1 * w1x + c2 * w2x;
        s.sy += c1 * w1y + c2 * w2y;
        s.sz += c1 * w1z + c2 * w2z;
    }

    s.sx = ex * s.sx + dx;
    s.sy = ex * s.sy + dy;
    s.sz = ez * s.sz + dz;
    return s;
}

BlochTrace bloch_solve(const BlochParams& params, const std::vector<double>& t_grid,
                       const BlochState& init, double tau) {
    if (t_grid.empty())
        throw std::invalid_argument("bloch_solve: empty time grid");
    if (t_grid.front() < 0.0)
        throw std::invalid_argument("bloch_solve: grid must start at t >= 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("bloch_solve: grid must increase monotonically");

    BlochTrace trace;
    trace.times.reserve(t_grid.size());
    trace.sx.reserve(t_grid.size());
    trace.sy.reserve(t_grid.size());
    trace.sz.reserve(t_grid.size());

    BlochState s = init;
    double t = 0.0;
    for (double target : t_grid) {
        const double span = target - t;
        if (span > 0.0) {
            const std::size_t n = static_cast<std::size_t>(std::ceil(span / tau - 1e-12));
            const double tau_eff = span / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k)
                s = bloch_step(s, params, tau_eff);
            t = target;
        }
        trace.times.push_back(target);
        trace.sx.push_back(s.sx);
        trace.sy.push_back(s.sy);
        trace.sz.push_back(s.sz);
    }
    return trace;
}

BlochTrace bloch_ensemble(const BlochParams& base, const LorentzianSpec& g_spec,
                          const LorentzianSpec& mw_spec, std::size_t n_samples,
                          const std::vector<double>& t_grid, const BlochState& init,
                          std::uint64_t seed, double tau) {
    if (n_samples < 1)
        throw std::invalid_argument("bloch_ensemble: need at least one sample");
    g_spec.validate();
    mw_spec.validate();

    BlochTrace mean;
    mean.times = t_grid;
    mean.sx.assign(t_grid.size(), 0.0);
    mean.sy.assign(t_grid.size(), 0.0);
    mean.sz.assign(t_grid.size(), 0.0);

    for (std::size_t sample = 0; sample < n_samples; ++sample) {
        SplitMix64 rng(sub_seed(seed, sample));
        BlochParams params = base;
        params.xi_x = sample_lorentzian(rng.next_open01(), g_spec);
        params.xi_y = sample_lorentzian(rng.next_open01(), g_spec);
        params.xi_z = sample_lorentzian(rng.next_open01(), g_spec);
        params.zeta = sample_lorentzian(rng.next_open01(), mw_spec);
        const BlochTrace trace = bloch_solve(params, t_grid, init, tau);
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            mean.sx[i] += trace.sx[i];
            mean.sy[i] += trace.sy[i];
            mean.sz[i] += trace.sz[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(n_samples);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        mean.sx[i] *= inv;
        mean.sy[i] *= inv;
        mean.sz[i] *= inv;
    }
    return mean;
}

BlochState bloch_nodisorder_exact(double t, const BlochParams& params,
                                  const BlochState& init) {
    params.validate();
    if (params.xi_x != 0.0 || params.xi_y != 0.0 || params.xi_z != 0.0 ||
        params.zeta != 0.0)
        throw std::invalid_argument("bloch_nodisorder_exact: disorder must be zero");
    if (params.t1_rate() != 0.0)
        throw std::invalid_argument("bloch_nodisorder_exact: requires 1/T1 = 0");
    if (init.sy != 0.0)
        throw std::invalid_argument("bloch_nodisorder_exact: requires sy(0) = 0");

    const double alpha = params.t2_rate();
    const double b = params.drive();
    BlochState s;
    s.sx = std::exp(-alpha * t) * init.sx;
    if (b == 0.0) {
        s.sy = 0.0;
        s.sz = init.sz;
        return s;
    }
    const double half_alpha = 0.5 * alpha;
    if (!(b > half_alpha))
        throw std::domain_error("bloch_nodisorder_exact: overdamped regime not supported");
    const double omega = std::sqrt(b * b - half_alpha * half_alpha);
    const double env = std::exp(-half_alpha * t);
    s.sz = init.sz * env *
           (std::cos(omega * t) + (half_alpha / omega) * std::sin(omega * t));
    s.sy = init.sz * env * (b / omega) * std::sin(omega * t);
    return s;
}

} // namespace rabisim
