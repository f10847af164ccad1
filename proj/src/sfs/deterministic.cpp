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

#include "sfs/deterministic.hpp"

namespace sfs {
namespace {

void check_dim(const LevelMatrix& rho, int m)
{
    if (rho.rows() != m || rho.cols() != m) {
        throw std::invalid_argument("state dimension does not match level count");
    }
}

void add_rate(std::vector<double>& g, int m, const RateEntry& e, double value)
{
    g[((static_cast<size_t>(e.p) * m + e.q) * m + e.r) * m + e.s] += value;
}

}  // namespace

std::vector<double> rate_tensor(const Scenario& s, double t)
{
    const int m = s.system.size();
    std::vector<double> g(static_cast<size_t>(m) * m * m * m, 0.0);
    for (const auto& e : s.channels.expand()) add_rate(g, m, e, e.rate(t));
    return g;
}

FieldPair assemble_fields(const EffectiveState& state, const Scenario& s,
                          bool hermitized)
{
    const auto& sys = s.system;
    const int m = sys.size();
    check_dim(state.rho, m);
    const auto& rho = state.rho;

    AxisVector sum_plus{};   // sum_{e,g} d_ge rho_eg
    AxisVector sum_minus{};  // sum_{g,e} d_eg rho_ge
    for (int e = 0; e < m; ++e) {
        for (int g = 0; g < m; ++g) {
            AxisVector d_ge = sys.d_ground_excited(g, e);
            AxisVector d_eg = sys.d_excited_ground(e, g);
            for (int a = 0; a < kAxes; ++a) {
                if (hermitized) {
                    sum_plus[a] += d_ge[a] * 0.5 * (rho(e, g) + std::conj(rho(g, e)));
                    sum_minus[a] += d_eg[a] * 0.5 * (rho(g, e) + std::conj(rho(e, g)));
                } else {
                    sum_plus[a] += d_ge[a] * rho(e, g);
                    sum_minus[a] += d_eg[a] * rho(g, e);
                }
            }
        }
    }
    AxisVector in_plus = s.field.plus(state.t);
    const double k = 0.5 * s.gamma * (s.n_atoms - 1);
    FieldPair f;
    for (int a = 0; a < kAxes; ++a) {
        f.plus[a] = in_plus[a] + kI * k * sum_plus[a];
        f.minus[a] = std::conj(in_plus[a]) - kI * k * sum_minus[a];
    }
    return f;
}

LevelMatrix free_term(const LevelMatrix& rho, const LevelSystem& sys)
{
    const int m = sys.size();
    LevelMatrix out(m, m);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            out(p, q) = -kI * (sys.detuning[p] - sys.detuning[q]) * rho(p, q);
        }
    }
    return out;
}

LevelMatrix incoherent_term(const LevelMatrix& rho, const std::vector<double>& rates)
{
    const int m = static_cast<int>(rho.rows());
    auto G = [&](int p, int q, int r, int s) {
        return rates[((static_cast<size_t>(p) * m + q) * m + r) * m + s];
    };
    LevelMatrix out = LevelMatrix::Zero(m, m);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            Complex acc{};
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    acc += 2.0 * G(p, i, q, j) * rho(i, j) - G(i, j, i, p) * rho(j, q)
                           - rho(p, j) * G(i, q, i, j);
                }
            }
            out(p, q) = 0.5 * acc;
        }
    }
    return out;
}

LevelMatrix collective_term(const LevelMatrix& rho, const LevelSystem& sys,
                            double gamma)
{
    const int m = sys.size();
    LevelMatrix out = LevelMatrix::Zero(m, m);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            Complex acc{};
            for (int r = 0; r < m; ++r) {
                for (int s = 0; s < m; ++s) {
                    acc += 2.0 * rho(r, s)
                               * dot(sys.d_ground_excited(p, r), sys.d_excited_ground(s, q))
                           - dot(sys.d_excited_ground(p, r), sys.d_ground_excited(r, s))
                                 * rho(s, q)
                           - rho(p, r)
                                 * dot(sys.d_excited_ground(r, s), sys.d_ground_excited(s, q));
                }
            }
            out(p, q) = 0.5 * gamma * acc;
        }
    }
    return out;
}

LevelMatrix field_term(const LevelMatrix& rho, const FieldPair& fields,
                       const LevelSystem& sys)
{
    const int m = sys.size();
    LevelMatrix out = LevelMatrix::Zero(m, m);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            AxisVector down{};
            AxisVector up{};
            for (int r = 0; r < m; ++r) {
                AxisVector a1 = sys.d_excited_ground(p, r);
                AxisVector a2 = sys.d_excited_ground(r, q);
                AxisVector b1 = sys.d_ground_excited(p, r);
                AxisVector b2 = sys.d_ground_excited(r, q);
                for (int a = 0; a < kAxes; ++a) {
                    down[a] += a1[a] * rho(r, q) - rho(p, r) * a2[a];
                    up[a] += b1[a] * rho(r, q) - rho(p, r) * b2[a];
                }
            }
            out(p, q) = kI * dot(fields.plus, down) + kI * dot(fields.minus, up);
        }
    }
    return out;
}

LevelMatrix bloch_rhs(const EffectiveState& state, const FieldPair& fields,
                      const Scenario& s)
{
    const auto& sys = s.system;
    check_dim(state.rho, sys.size());
    LevelMatrix out = free_term(state.rho, sys);
    out += incoherent_term(state.rho, rate_tensor(s, state.t));
    out += collective_term(state.rho, sys, s.gamma);
    out += field_term(state.rho, fields, sys);
    return out;
}

//---------------------------------------------------------------------------//

BlochSystem::BlochSystem(const Scenario& s)
    : dim_(s.system.size()), n_atoms_(s.n_atoms), gamma_(s.gamma), drive_(s.field)
{
    const auto& sys = s.system;
    const int m = dim_;
    for (const auto& dp : sys.dipoles) {
        if (!sys.is_excited(dp.upper) || !sys.is_ground(dp.lower)) continue;
        if (dp.d[0] == Complex{} && dp.d[1] == Complex{}) continue;
        links_.push_back({dp.upper, dp.lower, dp.d});
        for (int a = 0; a < kAxes; ++a) {
            if (dp.d[a] != Complex{}) active_axes_[a] = true;
        }
    }

    // Linear map rho -> f(rho) as a sparse coefficient list, found by
    // applying f to each matrix unit.
    auto compile = [m](auto&& f) {
        std::vector<Term> terms;
        LevelMatrix unit = LevelMatrix::Zero(m, m);
        for (int in = 0; in < m * m; ++in) {
            unit.data()[in] = 1.0;
            LevelMatrix col = f(unit);
            unit.data()[in] = 0.0;
            for (int out = 0; out < m * m; ++out) {
                Complex c = col.data()[out];
                if (c != Complex{}) terms.push_back({out, in, c});
            }
        }
        return terms;
    };

    // Constant channels are folded into the static map; each time-dependent
    // channel keeps its own unit-rate map scaled at evaluation time.
    std::vector<double> static_rates(static_cast<size_t>(m) * m * m * m, 0.0);
    for (const auto& e : s.channels.expand()) {
        if (e.rate.shape == RateProfile::Shape::constant) {
            add_rate(static_rates, m, e, e.rate.amplitude);
            continue;
        }
        std::vector<double> unit_rates(static_rates.size(), 0.0);
        add_rate(unit_rates, m, e, 1.0);
        TimedTerms tt;
        tt.rate = e.rate;
        tt.terms = compile([&](const LevelMatrix& u) { return incoherent_term(u, unit_rates); });
        timed_.push_back(std::move(tt));
    }
    const double gamma = gamma_;
    static_terms_ = compile([&](const LevelMatrix& u) {
        LevelMatrix r = free_term(u, sys);
        r += incoherent_term(u, static_rates);
        r += collective_term(u, sys, gamma);
        return r;
    });
}

}  // namespace sfs
