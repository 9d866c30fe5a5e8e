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

#include <doctest.h>

#include <cmath>

#include "rabisim/hamiltonian.hpp"

using namespace rabisim;

namespace {

Realization two_spins(const Vec3& a, const Vec3& b) {
    Realization real;
    real.positions = {a, b};
    real.xi_x.assign(2, 0.0);
    real.xi_y.assign(2, 0.0);
    real.xi_z.assign(2, 0.0);
    real.zeta.assign(2, 0.0);
    return real;
}

} // namespace

TEST_CASE("pair along z at 10 A gives zz = -103.76 MHz") {
    const auto real = two_spins({0, 0, 0}, {0, 0, 10});
    const auto table = build_couplings(real, ModelParams{});
    REQUIRE(table.pairs.size() == 1);
    CHECK(table.pairs[0].zz == doctest::Approx(-103.76).epsilon(1e-12));
    CHECK(table.pairs[0].xxyy == doctest::Approx(51.88).epsilon(1e-12));
}

TEST_CASE("pair along x at 10 A gives zz = +D0/r^3") {
    const auto real = two_spins({0, 0, 0}, {10, 0, 0});
    const auto table = build_couplings(real, ModelParams{});
    CHECK(table.pairs[0].zz == doctest::Approx(51.88).epsilon(1e-12));
}

TEST_CASE("single clean spin at h_p = 1 drives at -55.96 MHz") {
    Realization real;
    real.positions = {{0, 0, 0}};
    real.xi_x = {0.0};
    real.xi_y = {0.0};
    real.xi_z = {0.0};
    real.zeta = {0.0};
    const auto table = build_couplings(real, ModelParams{});
    CHECK(table.local_z[0] == 0.0);
    CHECK(table.drive_x[0] == doctest::Approx(-55.96).epsilon(1e-14));
}

TEST_CASE("disorder factors enter every coefficient") {
    auto real = two_spins({0, 0, 0}, {0, 0, 10});
    real.xi_z = {0.1, -0.2};
    real.xi_x = {0.05, 0.0};
    real.xi_y = {0.0, -0.03};
    real.zeta = {0.02, 0.0};
    ModelParams params;
    params.drive_amplitude = 2.0;
    const auto table = build_couplings(real, params);
    CHECK(table.local_z[0] == doctest::Approx(-9700.0 * 0.1));
    CHECK(table.local_z[1] == doctest::Approx(-9700.0 * -0.2));
    CHECK(table.drive_x[0] ==
          doctest::Approx(-2.0 * 55.96 * 1.02 * (2.0 + 0.05) / 2.0));
    CHECK(table.pairs[0].zz ==
          doctest::Approx(51880.0 * 1.1 * 0.8 * (1.0 - 3.0) / 1000.0));
    CHECK(table.pairs[0].xxyy ==
          doctest::Approx(51880.0 * (1.05 * 1.0 + 1.0 * 0.97) / 2000.0));
    CHECK(table.has_g_disorder);
}

TEST_CASE("no-disorder table satisfies xxyy = -zz/2 for every pair") {
    Realization real;
    SplitMix64 rng(5);
    real.positions = place_spins(8, 1e-4, LatticeSpec{}, 17);
    real.xi_x.assign(8, 0.0);
    real.xi_y.assign(8, 0.0);
    real.xi_z.assign(8, 0.0);
    real.zeta.assign(8, 0.0);
    const auto table = build_couplings(real, ModelParams{});
    const auto report = consistency_check(table);
    CHECK(report.ok());
    CHECK(report.b4_identity_applicable);
    CHECK(report.b4_identity_max_dev <= 1e-12);
    for (const auto& pair : table.pairs)
        CHECK(pair.xxyy == doctest::Approx(-0.5 * pair.zz).epsilon(1e-12));
}

TEST_CASE("disabled dipolar coupling zeroes all pair terms") {
    auto real = two_spins({0, 0, 0}, {0, 0, 10});
    ModelParams params;
    params.dipolar_enabled = false;
    const auto table = build_couplings(real, params);
    for (const auto& pair : table.pairs) {
        CHECK(pair.zz == 0.0);
        CHECK(pair.xxyy == 0.0);
    }
    CHECK(consistency_check(table).ok());
}

TEST_CASE("rebuilding from the same realization is deterministic") {
    const auto real = draw_realization(6, 1e-4, LorentzianSpec{0.001, 0.01},
                                       LorentzianSpec{0.01, 0.1}, 77);
    const auto a = build_couplings(real, ModelParams{});
    const auto b = build_couplings(real, ModelParams{});
    CHECK(a.local_z == b.local_z);
    CHECK(a.drive_x == b.drive_x);
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].zz == b.pairs[i].zz);
        CHECK(a.pairs[i].xxyy == b.pairs[i].xxyy);
    }
}

TEST_CASE("scaling all distances by s scales pair terms by s^-3") {
    auto real = draw_realization(5, 1e-4, LorentzianSpec{0.001, 0.01},
                                 LorentzianSpec{}, 3);
    const auto table = build_couplings(real, ModelParams{});
    const double s = 2.0;
    for (auto& pos : real.positions)
        for (double& c : pos)
            c *= s;
    const auto scaled = build_couplings(real, ModelParams{});
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        CHECK(scaled.pairs[i].zz ==
              doctest::Approx(table.pairs[i].zz / (s * s * s)).epsilon(1e-12));
        CHECK(scaled.pairs[i].xxyy ==
              doctest::Approx(table.pairs[i].xxyy / (s * s * s)).epsilon(1e-12));
    }
}

TEST_CASE("coincident spins are rejected") {
    const auto real = two_spins({1, 2, 3}, {1, 2, 3});
    CHECK_THROWS_AS(build_couplings(real, ModelParams{}), CoincidentSpinsError);
}
