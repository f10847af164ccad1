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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "sfs/integrator.hpp"
#include "sfs/observables.hpp"

using namespace sfs;

namespace {

ObservableSeries make(const std::string& name, std::vector<double> t, std::vector<Complex> mean,
                      std::vector<double> se, std::vector<long long> n)
{
    ObservableSeries s;
    s.name = name;
    s.t = std::move(t);
    s.mean = std::move(mean);
    s.stderr_re = se;
    s.stderr_im = se;
    s.n_completed = std::move(n);
    return s;
}

std::vector<ObservableSeries> golden_series()
{
    return {make("p_2", {0.0, 0.5, 1.0}, {{1.0, 0.0}, {0.55, -0.001}, {0.1, 2.5e-5}},
                 {0.0, 0.0125, 0.003}, {1000, 998, 997}),
            make("I", {0.0, 0.5, 1.0}, {{2.0, 0.0}, {1.5, 0.25}, {0.1 + 0.2, -0.0}},
                 {0.0, 0.125, 1e-10}, {1000, 998, 997})};
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ObservableSeries sampled(const std::string& name, double dt, int n, double (*f)(double))
{
    ObservableSeries s;
    s.name = name;
    for (int j = 0; j < n; ++j) {
        s.t.push_back(j * dt);
        s.mean.push_back(f(j * dt));
        s.stderr_re.push_back(0.0);
        s.stderr_im.push_back(0.0);
        s.n_completed.push_back(1);
    }
    return s;
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("csv output matches the pinned schema byte for byte")
{
    CsvMeta meta;
    meta.config_hash = "00112233aabbccdd";
    meta.seed = 20240101;
    meta.n_omitted = 3;
    std::ostringstream os;
    write_csv(os, golden_series(), meta);
    CHECK(os.str() == slurp(std::string(SFS_TEST_DATA_DIR) + "/golden_v1.csv"));
}

TEST_CASE("csv round trip is lossless")
{
    CsvMeta meta;
    meta.source = "oracle";
    meta.config_hash = "feedface00000000";
    meta.seed = 99;
    std::vector<ObservableSeries> in = golden_series();
    in[0].mean[1] = {1.0 / 3.0, -2.0 / 7.0};
    std::stringstream ss;
    write_csv(ss, in, meta);
    CsvMeta back;
    const auto out = read_csv(ss, &back);
    CHECK(back.source == "oracle");
    CHECK(back.config_hash == "feedface00000000");
    CHECK(back.seed == 99);
    REQUIRE(out.size() == 2);
    CHECK(out[0].name == "p_2");
    CHECK(out[0].mean[1] == in[0].mean[1]);  // shortest round-trip formatting
    CHECK(out[1].t == in[1].t);
}

TEST_CASE("csv reader rejects foreign files")
{
    std::istringstream wrong_schema("# sfs-csv schema=2\nt,observable,re,im,stderr,n_completed,n_omitted\n");
    CHECK_THROWS_AS(read_csv(wrong_schema), ParseError);
    std::istringstream no_header("0,p_2,1,0,0,1,0\n");
    CHECK_THROWS_AS(read_csv(no_header), ParseError);
    std::istringstream short_row(
        "# sfs-csv schema=1\nt,observable,re,im,stderr,n_completed,n_omitted\n0,p_2,1\n");
    CHECK_THROWS_AS(read_csv(short_row), ParseError);
}

TEST_CASE("normalisation to the maximum")
{
    const auto s = golden_series()[1];
    const ObservableSeries n = normalized_to_max(s, "I_norm");
    CHECK(n.name == "I_norm");
    CHECK(n.mean[0].real() == doctest::Approx(1.0));
    CHECK(n.mean[1].real() == doctest::Approx(0.75));
    CHECK(n.stderr_re[1] == doctest::Approx(0.0625));
}

TEST_CASE("imaginary-part diagnostics")
{
    auto s = golden_series();
    CHECK(s[0].max_abs_imag() == doctest::Approx(0.001));
    // |Im| within 3 stderr everywhere: 0.25 <= 3 * 0.125
    CHECK(s[0].converged());
    CHECK(s[1].converged());
    s[1].mean[1].imag(0.4);
    CHECK_FALSE(s[1].converged());
}

TEST_CASE("series comparison")
{
    auto a = golden_series();
    auto b = golden_series();
    b[0].mean[2] += 0.04;
    const auto d = compare_series(a, b);
    REQUIRE(d.size() == 2);
    CHECK(d[0].name == "p_2");
    CHECK(d[0].max_abs_diff == doctest::Approx(0.04));
    CHECK(d[1].max_abs_diff == 0.0);
    CHECK(find_series(a, "I") == &a[1]);
    CHECK(find_series(a, "nope") == nullptr);
}

TEST_CASE("beat power ratio separates modulated from smooth decay")
{
    const double delta = 15.0;
    auto beating = [](double t) { return std::exp(-t) * (1.0 + 0.5 * std::cos(15.0 * t)); };
    auto smooth = [](double t) { return std::exp(-t) * (1.0 + 0.3 * t); };
    const double rb = beat_power_ratio(sampled("I", 0.01, 501, beating), delta);
    const double rs = beat_power_ratio(sampled("I", 0.01, 501, smooth), delta);
    CHECK(rb > 10.0);
    CHECK(rs < 1e-2);
    CHECK(rb > 1e3 * rs);
}

TEST_CASE("dominant frequency of a damped beat")
{
    auto f = [](double t) { return std::exp(-0.8 * t) * (1.0 + 0.3 * std::cos(14.2 * t)); };
    const double w = dominant_frequency(sampled("I", 0.01, 501, f), 15.0);
    CHECK(w == doctest::Approx(14.2).epsilon(0.01));
}

TEST_CASE("beat power ratio refuses unusable grids")
{
    auto f = [](double t) { return std::cos(t); };
    // Nyquist of dt = 0.5 is 2 pi
    CHECK_THROWS(beat_power_ratio(sampled("I", 0.5, 64, f), 15.0));
    ObservableSeries uneven = sampled("I", 0.01, 200, f);
    uneven.t[100] += 0.003;
    CHECK_THROWS(beat_power_ratio(uneven, 15.0));
}

TEST_CASE("intensity channel equals the collective expectation on product states")
{
    // Tr(P^- P^+ rho^{(x)N}) built directly from operators.
    std::mt19937_64 rng(97);
    for (Scenario s : {test::v_system(3), test::lambda_system(2), test::two_level(4, 1.0)}) {
        const int m = s.system.size();
        const int n = s.n_atoms;
        const BlochSystem bs(s);
        const ChannelLayout layout(s);
        const Eigen::MatrixXcd rho = test::random_density(m, rng);
        std::vector<Complex> values(layout.size());
        layout.evaluate(bs, rho, values.data());
        const Eigen::MatrixXcd full = test::power_product(rho, n);
        Complex total{};
        for (int axis = 0; axis < 2; ++axis) {
            Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(full.rows(), full.cols());
            for (int a = 0; a < n; ++a) lower += test::on_atom(test::lowering(s.system, axis), n, a);
            const Complex want = (lower.adjoint() * lower * full).trace();
            CHECK(std::abs(values[layout.intensity(axis)] - want) < 1e-12);
            total += want;
        }
        CHECK(std::abs(values[layout.intensity(-1)] - total) < 1e-12);
        CHECK(std::abs(values[layout.coherence(1, 0)] - rho(1, 0)) < 1e-15);
    }
}

TEST_CASE("standard observables carry the documented names")
{
    Scenario s = test::v_system(3);
    s.ensemble.trajectories = 16;
    EnsembleOptions o;
    o.threads = 1;
    const EnsembleResult r = run_ensemble(s, o);
    const auto obs = standard_observables(r, s, true);
    for (const char* name : {"p_1", "p_2", "p_3", "I_x", "I_y", "I", "I_norm", "triple"}) {
        CAPTURE(name);
        CHECK(find_series(obs, name) != nullptr);
    }
    const auto raw = standard_observables(r, s, false);
    CHECK(find_series(raw, "I_norm") == nullptr);
    // population channel at t = 0 is the initial state exactly
    CHECK(find_series(obs, "p_2")->mean[0] == Complex{0.6, 0.0});
}

}  // TEST_SUITE observables
