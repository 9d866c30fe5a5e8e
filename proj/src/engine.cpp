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

#include "rabisim/engine.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace rabisim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double StateVector::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i)
        s += re[i] * re[i] + im[i] * im[i];
    return std::sqrt(s);
}

StateVector init_product_state(std::size_t num_spins, ProductAxis axis) {
    if (num_spins < 1)
        throw std::invalid_argument("init_product_state: need at least one spin");
    if (num_spins > kMaxSpins)
        throw std::invalid_argument("init_product_state: spin count exceeds hard cap");
    StateVector state;
    state.num_spins = num_spins;
    const std::size_t dim = std::size_t{1} << num_spins;
    state.re.assign(dim, 0.0);
    state.im.assign(dim, 0.0);
    if (axis == ProductAxis::ZPlus) {
        state.re[0] = 1.0;
    } else {
        const double amp = std::pow(2.0, -0.5 * static_cast<double>(num_spins));
        for (std::size_t i = 0; i < dim; ++i)
            state.re[i] = amp;
    }
    return state;
}

Magnetization measure(const StateVector& state) {
    const std::size_t dim = state.dim();
    const std::size_t n = state.num_spins;
    const double* re = state.re.data();
    const double* im = state.im.data();

    Magnetization m;
    const double half_n = 0.5 * static_cast<double>(n);
    for (std::size_t i = 0; i < dim; ++i) {
        const double p = re[i] * re[i] + im[i] * im[i];
        m.mz += (half_n - static_cast<double>(std::popcount(i))) * p;
    }

    // <Sx_j> = sum over bit_j=0 of Re(conj(a_i) a_{i^bit}),
    // <Sy_j> = sum over bit_j=0 of Im(conj(a_i) a_{i^bit}).
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t stride = std::size_t{1} << j;
        double sx = 0.0, sy = 0.0;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                sx += re[i0] * re[i1] + im[i0] * im[i1];
                sy += re[i0] * im[i1] - im[i0] * re[i1];
            }
        }
        m.mx += sx;
        m.my += sy;
    }
    return m;
}

double energy_expectation(const StateVector& state, const CouplingTable& table) {
    const std::size_t dim = state.dim();
    const std::size_t n = state.num_spins;
    const double* re = state.re.data();
    const double* im = state.im.data();

    double energy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t stride = std::size_t{1} << j;
        double sz = 0.0, sx = 0.0;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                const double p0 = re[i0] * re[i0] + im[i0] * im[i0];
                const double p1 = re[i1] * re[i1] + im[i1] * im[i1];
                sz += 0.5 * (p0 - p1);
                sx += re[i0] * re[i1] + im[i0] * im[i1];
            }
        }
        energy += table.local_z[j] * sz + table.drive_x[j] * sx;
    }

    for (const PairCoupling& pair : table.pairs) {
        if (pair.zz == 0.0 && pair.xxyy == 0.0)
            continue;
        const std::size_t lo = std::size_t{1} << std::min(pair.j, pair.k);
        const std::size_t hi = std::size_t{1} << std::max(pair.j, pair.k);
        double zz = 0.0, ff = 0.0;
        for (std::size_t a = 0; a < dim; a += 2 * hi) {
            for (std::size_t b = a; b < a + hi; b += 2 * lo) {
                for (std::size_t c = b; c < b + lo; ++c) {
                    const std::size_t i00 = c;
                    const std::size_t i01 = c + lo;
                    const std::size_t i10 = c + hi;
                    const std::size_t i11 = c + lo + hi;
                    const double p00 = re[i00] * re[i00] + im[i00] * im[i00];
                    const double p01 = re[i01] * re[i01] + im[i01] * im[i01];
                    const double p10 = re[i10] * re[i10] + im[i10] * im[i10];
                    const double p11 = re[i11] * re[i11] + im[i11] * im[i11];
                    zz += 0.25 * (p00 + p11 - p01 - p10);
                    ff += re[i01] * re[i10] + im[i01] * im[i10];
                }
            }
        }
        energy += pair.zz * zz + pair.xxyy * ff;
    }
    return energy;
}

void EvolutionPlan::validate() const {
    if (dt <= 0.0)
        throw std::invalid_argument("EvolutionPlan: dt must be > 0");
    if (record_every == 0)
        throw std::invalid_argument("EvolutionPlan: record_every must be > 0");
}

SplitStepEvolver::SingleRot SplitStepEvolver::make_single(double cz, double cx,
                                                          double h) {
    SingleRot rot;
    const double omega = std::hypot(cz, cx);
    if (omega == 0.0)
        return rot;
    const double half_phase = std::numbers::pi * omega * h;
    const double s = std::sin(half_phase);
    rot.c = std::cos(half_phase);
    rot.z = s * cz / omega;
    rot.x = s * cx / omega;
    return rot;
}

SplitStepEvolver::SplitStepEvolver(const CouplingTable& table, double dt)
    : num_spins_(table.num_spins), dt_(dt) {
    if (dt <= 0.0)
        throw std::invalid_argument("SplitStepEvolver: dt must be > 0");
    if (num_spins_ < 1 || num_spins_ > kMaxSpins)
        throw std::invalid_argument("SplitStepEvolver: bad spin count");

    singles_half_.reserve(num_spins_);
    singles_full_.reserve(num_spins_);
    for (std::size_t j = 0; j < num_spins_; ++j) {
        singles_half_.push_back(make_single(table.local_z[j], table.drive_x[j], 0.5 * dt));
        singles_full_.push_back(make_single(table.local_z[j], table.drive_x[j], dt));
    }

    for (const PairCoupling& pair : table.pairs) {
        if (pair.xxyy == 0.0)
            continue;
        PairRot rot;
        rot.lo_bit = std::min(pair.j, pair.k);
        rot.hi_bit = std::max(pair.j, pair.k);
        const double half_phase = std::numbers::pi * pair.xxyy * 0.5 * dt;
        rot.c = std::cos(half_phase);
        rot.s = std::sin(half_phase);
        pair_rots_.push_back(rot);
    }

    // Diagonal zz phases for a half step, one factor per basis index.
    const std::size_t dim = std::size_t{1} << num_spins_;
    std::vector<double> zz_energy;
    for (const PairCoupling& pair : table.pairs) {
        if (pair.zz == 0.0)
            continue;
        if (zz_energy.empty())
            zz_energy.assign(dim, 0.0);
        const std::size_t mj = std::size_t{1} << pair.j;
        const std::size_t mk = std::size_t{1} << pair.k;
        const double quarter = 0.25 * pair.zz;
        for (std::size_t i = 0; i < dim; ++i) {
            const bool differ = ((i & mj) != 0) != ((i & mk) != 0);
            zz_energy[i] += differ ? -quarter : quarter;
        }
    }
    if (!zz_energy.empty()) {
        has_zz_ = true;
        zz_phase_re_.resize(dim);
        zz_phase_im_.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            const double phase = -kTwoPi * 0.5 * dt * zz_energy[i];
            zz_phase_re_[i] = std::cos(phase);
            zz_phase_im_[i] = std::sin(phase);
        }
    }
}

void SplitStepEvolver::apply_singles(StateVector& state,
                                     const std::vector<SingleRot>& rots) const {
    double* __restrict re = state.re.data();
    double* __restrict im = state.im.data();
    const std::size_t dim = state.dim();
    for (std::size_t j = 0; j < num_spins_; ++j) {
        const SingleRot rot = rots[j];
        if (rot.z == 0.0 && rot.x == 0.0 && rot.c == 1.0)
            continue;
        const double c = rot.c, z = rot.z, x = rot.x;
        const std::size_t stride = std::size_t{1} << j;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                const double r0 = re[i0], v0 = im[i0];
                const double r1 = re[i1], v1 = im[i1];
                re[i0] = c * r0 + z * v0 + x * v1;
                im[i0] = c * v0 - z * r0 - x * r1;
                re[i1] = c * r1 - z * v1 + x * v0;
                im[i1] = c * v1 + z * r1 - x * r0;
            }
        }
    }
}

void SplitStepEvolver::apply_zz_half(StateVector& state) const {
    if (!has_zz_)
        return;
    double* __restrict re = state.re.data();
    double* __restrict im = state.im.data();
    const double* __restrict pr = zz_phase_re_.data();
    const double* __restrict pi = zz_phase_im_.data();
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        const double r = re[i], v = im[i];
        re[i] = r * pr[i] - v * pi[i];
        im[i] = r * pi[i] + v * pr[i];
    }
}

void SplitStepEvolver::apply_pairs_half(StateVector& state, bool reverse) const {
    double* __restrict re = state.re.data();
    double* __restrict im = state.im.data();
    const std::size_t dim = state.dim();
    const std::size_t count = pair_rots_.size();
    for (std::size_t p = 0; p < count; ++p) {
        const PairRot rot = pair_rots_[reverse ? count - 1 - p : p];
        const double c = rot.c, s = rot.s;
        const std::size_t lo = std::size_t{1} << rot.lo_bit;
        const std::size_t hi = std::size_t{1} << rot.hi_bit;
        for (std::size_t a = 0; a < dim; a += 2 * hi) {
            for (std::size_t b = a; b < a + hi; b += 2 * lo) {
                for (std::size_t idx = b; idx < b + lo; ++idx) {
                    const std::size_t i1 = idx + lo;
                    const std::size_t i2 = idx + hi;
                    const double r1 = re[i1], v1 = im[i1];
                    const double r2 = re[i2], v2 = im[i2];
                    re[i1] = c * r1 + s * v2;
                    im[i1] = c * v1 - s * r2;
                    re[i2] = c * r2 + s * v1;
                    im[i2] = c * v2 - s * r1;
                }
            }
        }
    }
}

void SplitStepEvolver::core(StateVector& state) const {
    apply_zz_half(state);
    apply_pairs_half(state, false);
    apply_pairs_half(state, true);
    apply_zz_half(state);
}

void SplitStepEvolver::step(StateVector& state) const {
    if (state.num_spins != num_spins_)
        throw std::invalid_argument("step: state and table spin counts differ");
    apply_singles(state, singles_half_);
    core(state);
    apply_singles(state, singles_half_);
}

void SplitStepEvolver::advance(StateVector& state, std::size_t n) const {
    if (n == 0)
        return;
    if (state.num_spins != num_spins_)
        throw std::invalid_argument("advance: state and table spin counts differ");
    apply_singles(state, singles_half_);
    for (std::size_t s = 0; s + 1 < n; ++s) {
        core(state);
        apply_singles(state, singles_full_);
    }
    core(state);
    apply_singles(state, singles_half_);
}

void step(StateVector& state, const CouplingTable& table, double dt) {
    SplitStepEvolver(table, dt).step(state);
}

Trace evolve_and_record(StateVector& state, const CouplingTable& table,
                        const EvolutionPlan& plan) {
    plan.validate();
    const SplitStepEvolver evolver(table, plan.dt);

    Trace trace;
    const std::size_t n_records = plan.n_steps / plan.record_every + 2;
    trace.times.reserve(n_records);
    trace.mx.reserve(n_records);
    trace.my.reserve(n_records);
    trace.mz.reserve(n_records);
    trace.energy.reserve(n_records);

    auto record = [&](std::size_t at_step) {
        const Magnetization m = measure(state);
        trace.times.push_back(static_cast<double>(at_step) * plan.dt);
        trace.mx.push_back(m.mx);
        trace.my.push_back(m.my);
        trace.mz.push_back(m.mz);
        trace.energy.push_back(energy_expectation(state, table));
    };

    record(0);
    std::size_t done = 0;
    while (done < plan.n_steps) {
        const std::size_t chunk = std::min(plan.record_every, plan.n_steps - done);
        evolver.advance(state, chunk);
        done += chunk;
        record(done);
    }
    return trace;
}

} // namespace rabisim
