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


// Embedded explicit Runge-Kutta pairs with adaptive step control.
//
// The state type is any Eigen dense object; the right-hand side is called
// as f(t, y, dydt) and must fully overwrite dydt.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace sfs::rk {

/// Dormand-Prince 5(4).
struct DormandPrince54 {
    static constexpr int stages = 7;
    static constexpr int order = 5;  // order of the propagated solution
    static constexpr std::array<double, stages> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5,
                                                  8.0 / 9, 1.0, 1.0};
    static constexpr double a[stages][stages] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    static constexpr std::array<double, stages> b{
        35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
    // b - b_hat, where b_hat is the embedded fourth-order solution.
    static constexpr std::array<double, stages> e{
        71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525,
        -1.0 / 40};
};

/// Bogacki-Shampine 3(2).
struct BogackiShampine32 {
    static constexpr int stages = 4;
    static constexpr int order = 3;
    static constexpr std::array<double, stages> c{0.0, 1.0 / 2, 3.0 / 4, 1.0};
    static constexpr double a[stages][stages] = {
        {},
        {1.0 / 2},
        {0.0, 3.0 / 4},
        {2.0 / 9, 1.0 / 3, 4.0 / 9},
    };
    static constexpr std::array<double, stages> b{2.0 / 9, 1.0 / 3, 4.0 / 9, 0.0};
    static constexpr std::array<double, stages> e{
        2.0 / 9 - 7.0 / 24, 1.0 / 3 - 1.0 / 4, 4.0 / 9 - 1.0 / 3, -1.0 / 8};
};

struct Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    double initial_step = 0.0;  ///< 0: try the whole interval first
    long max_steps = 1'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
    double last_step = 0.0;       ///< size of the last accepted step
    double suggested_step = 0.0;  ///< controller proposal for the next call
};

/// Integrates y from t0 to t1 in place. Step sizes follow the usual
/// error-per-step controller on the max-norm of the scaled error estimate.
template<class Tableau, class State, class Rhs>
void integrate(Rhs&& f, double t0, double t1, State& y, const Options& opt,
               Stats& stats)
{
    constexpr int S = Tableau::stages;
    const double span = t1 - t0;
    if (!(span > 0.0)) return;

    std::array<State, S> k;
    State y_stage = y;
    State y_new = y;
    State err = y;

    double h = opt.initial_step > 0.0 ? std::min(opt.initial_step, span) : span;
    double t = t0;
    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) {
            throw std::runtime_error("step limit exceeded in adaptive integrator");
        }
        bool last = false;
        double h_free = h;
        if (t + h >= t1 || (t1 - (t + h)) < 1e-12 * span) {
            h = t1 - t;
            last = true;
        }
        f(t, y, k[0]);
        for (int s = 1; s < S; ++s) {
            y_stage = y;
            for (int j = 0; j < s; ++j) {
                if (Tableau::a[s][j] != 0.0) y_stage += (h * Tableau::a[s][j]) * k[j];
            }
            f(t + Tableau::c[s] * h, y_stage, k[s]);
        }
        stats.evaluations += S;
        y_new = y;
        err.setZero();
        for (int s = 0; s < S; ++s) {
            if (Tableau::b[s] != 0.0) y_new += (h * Tableau::b[s]) * k[s];
            if (Tableau::e[s] != 0.0) err += (h * Tableau::e[s]) * k[s];
        }

        // Squared magnitudes avoid a hypot call per entry.
        double norm2 = 0.0;
        const auto* pe = err.data();
        const auto* py = y.data();
        const auto* pn = y_new.data();
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            double mag = std::sqrt(std::max(std::norm(py[i]), std::norm(pn[i])));
            double scale = opt.atol + opt.rtol * mag;
            norm2 = std::max(norm2, std::norm(pe[i]) / (scale * scale));
        }
        double norm = std::isfinite(norm2) ? std::sqrt(norm2) : 1e10;

        if (norm <= 1.0) {
            t = last ? t1 : t + h;
            y.swap(y_new);
            ++stats.accepted;
            stats.last_step = h;
            double fac = norm == 0.0 ? 5.0
                                     : std::clamp(0.9 * std::pow(norm, -1.0 / Tableau::order),
                                                  0.2, 5.0);
            h *= fac;
            // A step clipped to hit t1 says nothing about the scale of the
            // dynamics; keep the unclipped proposal in that case.
            stats.suggested_step = last ? std::max(h, h_free) : h;
        } else {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(norm, -1.0 / Tableau::order));
            if (h < 1e-14 * span) {
                throw std::runtime_error("step size underflow in adaptive integrator");
            }
        }
    }
}

}  // namespace sfs::rk
