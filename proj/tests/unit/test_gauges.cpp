/*
   Copyright 2026 The sfs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "sfs/gauges.hpp"
#include "sfs/integrator.hpp"

using namespace sfs;

namespace {

NoiseVectors unit_noise(int which, int axis)
{
    NoiseVectors nv;
    AxisVector* slots[] = {&nv.f, &nv.f_dag, &nv.g, &nv.g_dag};
    (*slots[which])[axis] = 1.0;
    return nv;
}

}  // namespace

TEST_SUITE("gauges") {

TEST_CASE("adaptive drift gauge follows the sign of the inversion")
{
    const Scenario s = test::lambda_system(3);
    LevelMatrix rho = LevelMatrix::Zero(3, 3);
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.1;
    rho(2, 2) = Complex{0.4, 3.0};  // only the real part counts
    // 0.4 - 0.1 >= 0 for the second ground level
    CHECK(drift_gauge_active(rho, s.system, GaugePolicy::adaptive).active);
    rho(1, 1) = 0.45;
    CHECK_FALSE(drift_gauge_active(rho, s.system, GaugePolicy::adaptive).active);
    rho(1, 1) = 0.4;  // zero inversion still gauges
    CHECK(drift_gauge_active(rho, s.system, GaugePolicy::adaptive).active);
    CHECK(drift_gauge_active(rho, s.system, GaugePolicy::always_on).active);
    CHECK_FALSE(drift_gauge_active(LevelMatrix::Identity(3, 3), s.system, GaugePolicy::off).active);
}

TEST_CASE("weight increments: fast and literal routes agree")
{
    std::mt19937_64 srng(67);
    Rng rng(71);
    for (Scenario s : {test::two_level(3, 1.0), test::v_system(5), test::lambda_system(7)}) {
        const BlochSystem bs(s);
        for (int k = 0; k < 20; ++k) {
            EffectiveState st;
            st.rho = test::random_matrix(s.system.size(), srng);
            const NoiseVectors nv = sample_noise(rng, 0.01, {0.7, 2.0}, {1.3, 0.4}, {true, true});
            const Complex a = weight_increment(st, nv, s.system, s.gamma, s.n_atoms);
            CHECK(std::abs(a - weight_increment(bs, st.rho, nv)) < 1e-12 * (1.0 + std::abs(a)));
            CHECK(std::abs(a - weight_increment_fast(bs, st.rho, nv)) < 1e-12 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("weight does not move on the Hermitian manifold or for one atom")
{
    std::mt19937_64 srng(73);
    Rng rng(79);
    const Scenario s = test::v_system(6);
    const BlochSystem bs(s);
    Scenario one = test::v_system(1);
    const BlochSystem bs1(one);
    for (int k = 0; k < 20; ++k) {
        const LevelMatrix h = test::random_density(3, srng);
        const LevelMatrix a = test::random_matrix(3, srng);
        const NoiseVectors nv = sample_noise(rng, 0.01, {1.0, 1.0}, {1.0, 1.0}, {true, true});
        CHECK(std::abs(weight_increment(bs, h, nv)) < 1e-12);
        CHECK(std::abs(weight_increment(bs1, a, nv)) == 0.0);
    }
}

TEST_CASE("weight noise compensates the hermitized drift")
{
    // Ito cross-correlation of the weight with the state noise must equal the
    // drift removed by hermitizing the dipole sums:
    //   E[dC0 F] dt = A(rho) - A_herm(rho)
    // Only <f f^dagger> and <g g^dagger> pairs survive the average.
    std::mt19937_64 srng(83);
    for (Scenario s : {test::two_level(4, 1.0), test::v_system(5), test::lambda_system(9)}) {
        const BlochSystem bs(s);
        const int m = s.system.size();
        for (int k = 0; k < 5; ++k) {
            const LevelMatrix rho = test::random_matrix(m, srng);
            LevelMatrix cross = LevelMatrix::Zero(m, m);
            for (int axis = 0; axis < kAxes; ++axis) {
                for (auto [state, weight] : {std::pair{0, 1}, std::pair{2, 3}}) {
                    LevelMatrix f;
                    noise_increment(bs, rho, unit_noise(state, axis), f);
                    cross += weight_increment(bs, rho, unit_noise(weight, axis)) * f;
                }
            }
            LevelMatrix plain, herm;
            bs.rhs(rho, 0.0, false, plain);
            bs.rhs(rho, 0.0, true, herm);
            CHECK(test::max_abs(cross - (plain - herm)) < 1e-12);
        }
    }
}

TEST_CASE("ground-manifold start never accumulates weight")
{
    for (Scenario s : {test::two_level(6, 0.0, 3.0), test::lambda_system(4)}) {
        if (s.system.size() == 3) {
            s.initial.setZero();
            s.initial(0, 0) = 0.5;
            s.initial(1, 1) = 0.5;
        }
        s.gauge_policy = GaugePolicy::adaptive;
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const TrajectoryRecord rec = run_trajectory(s, seed);
            REQUIRE(rec.status == TrajectoryRecord::Status::completed);
            for (const auto& snap : rec.snapshots) CHECK(snap.c0 == Complex{});
        }
    }
}

}  // TEST_SUITE gauges
