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
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "sfs/integrator.hpp"
#include "sfs/observables.hpp"

using namespace sfs;

namespace {

EnsembleOptions threads(int n)
{
    EnsembleOptions o;
    o.threads = n;
    return o;
}

bool same_moments(const EnsembleResult& a, const EnsembleResult& b)
{
    if (a.moments.n_times() != b.moments.n_times()) return false;
    for (int j = 0; j < a.moments.n_times(); ++j) {
        for (int c = 0; c < a.layout.size(); ++c) {
            const auto x = a.moments.estimate(j, c);
            const auto y = b.moments.estimate(j, c);
            if (x.mean != y.mean || x.stderr_re != y.stderr_re || x.stderr_im != y.stderr_im)
                return false;
        }
    }
    return a.completed == b.completed && a.omitted == b.omitted;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("trajectory seeds are distinct and reproducible")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(trajectory_seed(42, i));
    CHECK(seen.size() == 10000);
    CHECK(trajectory_seed(42, 7) == trajectory_seed(42, 7));
    CHECK(trajectory_seed(42, 7) != trajectory_seed(43, 7));
}

TEST_CASE("substeps respect the step cap and land on the grid")
{
    Scenario s = test::two_level(3, 1.0, 2.0, 7);
    s.grid.step_cap = 0.04;
    const Propagator prop(s);
    REQUIRE(prop.substeps().size() == 6);
    for (size_t j = 0; j < prop.substeps().size(); ++j) {
        const double span = prop.times()[j + 1] - prop.times()[j];
        CHECK(span / prop.substeps()[j] <= 0.04 + 1e-15);
        CHECK(span / (prop.substeps()[j] - 1) > 0.04);
    }
    const TrajectoryRecord rec = run_trajectory(s, 5);
    REQUIRE(rec.snapshots.size() == 7);
    for (size_t j = 0; j < 7; ++j) CHECK(rec.snapshots[j].t == prop.times()[j]);
}

TEST_CASE("ensembles are bit-identical across thread counts")
{
    Scenario s = test::v_system(4);
    s.ensemble.trajectories = 700;  // not a multiple of the chunk size
    const EnsembleResult one = run_ensemble(s, threads(1));
    const EnsembleResult three = run_ensemble(s, threads(3));
    CHECK(same_moments(one, three));
    CHECK(same_moments(one, run_ensemble(s, threads(1))));
}

TEST_CASE("splitting an ensemble into ranges and merging is exact")
{
    Scenario s = test::two_level(3, 1.0, 1.0, 11);
    s.ensemble.trajectories = 512;
    const EnsembleResult whole = run_ensemble(s, threads(1));
    EnsembleResult a = run_ensemble_range(s, 0, 256, threads(1));
    const EnsembleResult b = run_ensemble_range(s, 256, 256, threads(1));
    a.merge(b);
    CHECK(same_moments(whole, a));
    CHECK(a.total == 512);
}

TEST_CASE("different seeds give different trajectories")
{
    Scenario s = test::two_level(3, 1.0, 1.0, 11);
    s.ensemble.trajectories = 64;
    const EnsembleResult a = run_ensemble(s, threads(1));
    s.ensemble.seed += 1;
    const EnsembleResult b = run_ensemble(s, threads(1));
    CHECK_FALSE(same_moments(a, b));
}

TEST_CASE("trace is conserved along every trajectory")
{
    for (Scenario s : {test::two_level(3, 1.0, 3.0, 31), test::v_system(3), test::lambda_system(2)}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const TrajectoryRecord rec = run_trajectory(s, seed);
            for (const auto& snap : rec.snapshots) CHECK(std::abs(snap.rho.trace() - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("single emitter ensemble reproduces exponential decay")
{
    // The N = 1 drift is linear, so the ensemble mean is exactly exp(-t).
    // Late times are left out: the multiplicative noise gives the estimator
    // heavy tails there and a 5 sigma band is no longer meaningful.
    Scenario s = test::two_level(1, 1.0, 1.5, 16);
    s.ensemble.trajectories = 2000;
    const EnsembleResult r = run_ensemble(s, threads(1));
    const ObservableSeries p2 = population(r, 1, "p_2");
    for (size_t j = 0; j < p2.size(); ++j) {
        const double want = std::exp(-p2.t[j]);
        CHECK(std::abs(p2.mean[j].real() - want) <= 5.0 * p2.stderr_re[j] + 1e-6);
    }
}

TEST_CASE("one noisy step is unbiased around the deterministic flow")
{
    std::mt19937_64 srng(109);
    for (Scenario s : {test::two_level(5, 1.0), test::v_system(4), test::lambda_system(3)}) {
        const int m = s.system.size();
        LevelMatrix rho = test::random_matrix(m, srng) * 0.2 + test::random_density(m, srng);
        rho /= rho.trace();
        s.initial = Eigen::MatrixXcd::Identity(m, m) / double(m);  // unused by step()
        for (GaugePolicy policy : {GaugePolicy::off, GaugePolicy::always_on}) {
            s.gauge_policy = policy;
            const Propagator prop(s);
            const double dt = 1e-3;
            EffectiveState det;
            det.rho = rho;
            StepWorkspace ws;
            prop.advance_deterministic(det, dt, policy == GaugePolicy::always_on, ws);
            Rng rng(113);
            const int draws = 20000;
            LevelMatrix sum = LevelMatrix::Zero(m, m);
            Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(m, m);
            for (int k = 0; k < draws; ++k) {
                EffectiveState st;
                st.rho = rho;
                StepWorkspace w2;
                REQUIRE(prop.step(st, dt, rng, w2));
                const LevelMatrix d = st.rho - det.rho;
                sum += d;
                sq += d.cwiseAbs2();
            }
            const LevelMatrix mean = sum / double(draws);
            for (int p = 0; p < m; ++p) {
                for (int q = 0; q < m; ++q) {
                    const double se = std::sqrt(sq(p, q) / draws / draws);
                    CHECK(std::abs(mean(p, q)) <= 5.0 * se + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("divergence detection")
{
    const Scenario s = test::two_level(2, 1.0);
    const Propagator prop(s);
    EffectiveState st = prop.initial_state();
    CHECK_FALSE(prop.diverged(st));
    st.rho(0, 1) = 1e4;
    CHECK(prop.diverged(st));
    st.rho(0, 1) = 0.0;
    st.rho(1, 1) = std::nan("");
    CHECK(prop.diverged(st));
    st.rho(1, 1) = 1.0;
    st.c0 = {std::numeric_limits<double>::infinity(), 0.0};
    CHECK(prop.diverged(st));
}

TEST_CASE("omitted trajectories are counted and capped")
{
    Scenario s = test::two_level(3, 1.0, 1.0, 11);
    s.ensemble.trajectories = 40;
    s.ensemble.divergence_threshold = 0.999;  // the first step crosses it
    EnsembleOptions o = threads(1);
    o.enforce_cap = false;
    const EnsembleResult r = run_ensemble(s, o);
    CHECK(r.omitted + r.completed == 40);
    CHECK(r.omitted == static_cast<long long>(r.omitted_list.size()));
    CHECK(r.omitted > 0);
    CHECK_THROWS_AS(run_ensemble(s, threads(1)), DivergenceCapError);
    // no omitted trajectory contributes to any time point
    for (int j = 1; j < r.moments.n_times(); ++j) CHECK(r.moments.count(j) == r.completed);
}

TEST_CASE("weighted moments match a direct computation")
{
    std::mt19937_64 rng(89);
    std::normal_distribution<double> n;
    const int count = 1000;
    MomentAccumulator acc(1, 1, {Complex{0.3, 0.0}});
    MomentAccumulator first(1, 1, {Complex{0.3, 0.0}}), second(1, 1, {Complex{0.3, 0.0}});
    Complex sw{}, swx{};
    for (int k = 0; k < count; ++k) {
        const Complex w = std::exp(Complex{0.2 * n(rng), 0.2 * n(rng)});
        const Complex x{1.0 + n(rng), 0.5 * n(rng)};
        acc.add(0, w, &x, k % 2 == 0);
        (k < 400 ? first : second).add(0, w, &x, k % 2 == 0);
        sw += w;
        swx += w * x;
    }
    const auto e = acc.estimate(0, 0);
    CHECK(std::abs(e.mean - swx / sw) < 1e-12);
    CHECK(acc.count(0) == count);
    CHECK(acc.gauge_active_fraction(0) == doctest::Approx(0.5));
    first.merge(second);
    const auto m = first.estimate(0, 0);
    CHECK(std::abs(m.mean - e.mean) < 1e-12);
    CHECK(m.stderr_re == doctest::Approx(e.stderr_re).epsilon(1e-10));
}

TEST_CASE("unit weights give the textbook standard error")
{
    MomentAccumulator acc(1, 1, {Complex{}});
    const double xs[] = {1.0, 2.0, 4.0, 7.0};
    double mean = 3.5, var = 0.0;
    for (double x : xs) {
        const Complex v{x, -x};
        acc.add(0, 1.0, &v, false);
        var += (x - mean) * (x - mean);
    }
    var /= 3.0;
    const auto e = acc.estimate(0, 0);
    CHECK(e.mean.real() == doctest::Approx(3.5));
    CHECK(e.stderr_re == doctest::Approx(std::sqrt(var / 4.0)));
    CHECK(e.stderr_im == doctest::Approx(std::sqrt(var / 4.0)));
}

}  // TEST_SUITE integrator
