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


// Drift gauge: when active, the fields are built from the Hermitian part of
// the dipole sums and the trajectory carries a compensating weight
// Omega = exp(C0).

#pragma once

#include "sfs/stochastic.hpp"

namespace sfs {

struct GaugeDecision {
    enum class Reason { inversion_nonneg, inversion_negative, forced_on, forced_off };

    bool active = false;
    Reason reason = Reason::forced_off;
};

/// Under the adaptive policy the gauge is on when Re(rho_ee - rho_gg) >= 0
/// for at least one excited/ground pair.
template<class Mat>
GaugeDecision drift_gauge_active(const Mat& rho, const LevelSystem& sys, GaugePolicy policy)
{
    using R = GaugeDecision::Reason;
    if (policy == GaugePolicy::always_on) return {true, R::forced_on};
    if (policy == GaugePolicy::off) return {false, R::forced_off};
    const int m = sys.size();
    for (int e = 0; e < m; ++e) {
        if (!sys.is_excited(e)) continue;
        for (int g = 0; g < m; ++g) {
            if (!sys.is_ground(g)) continue;
            if (rho(e, e).real() - rho(g, g).real() >= 0.0) {
                return {true, R::inversion_nonneg};
            }
        }
    }
    return {false, R::inversion_negative};
}

/// dC0/dt by direct index loops.
Complex weight_increment(const EffectiveState& state, const NoiseVectors& nv,
                         const LevelSystem& sys, double gamma, int n_atoms);

/// dC0/dt from the compiled transition list.
Complex weight_increment(const BlochSystem& bs, const LevelMatrix& rho,
                         const NoiseVectors& nv);

template<class Mat>
Complex weight_increment_fast(const BlochSystem& bs, const Mat& rho, const NoiseVectors& nv)
{
    AxisVector pp = bs.dipole_plus(rho);
    AxisVector pm = bs.dipole_minus(rho);
    Complex acc{};
    for (int a = 0; a < kAxes; ++a) {
        acc += nv.f_dag[a] * (pm[a] - std::conj(pp[a]))
               + nv.g_dag[a] * (pp[a] - std::conj(pm[a]));
    }
    return 0.5 * (bs.n_atoms() - 1) * std::sqrt(0.5 * bs.gamma()) * acc;
}

}  // namespace sfs
