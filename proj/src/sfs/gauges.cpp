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


#include "sfs/gauges.hpp"

#include <cmath>

namespace sfs {

Complex weight_increment(const EffectiveState& state, const NoiseVectors& nv,
                         const LevelSystem& sys, double gamma, int n_atoms)
{
    const int m = sys.size();
    const auto& rho = state.rho;
    Complex acc{};
    for (int g = 0; g < m; ++g) {
        for (int e = 0; e < m; ++e) {
            AxisVector d_eg = sys.d_excited_ground(e, g);
            AxisVector d_ge = sys.d_ground_excited(g, e);
            for (int a = 0; a < kAxes; ++a) {
                acc += nv.f_dag[a] * d_eg[a] * (rho(g, e) - std::conj(rho(e, g)));
                acc += nv.g_dag[a] * d_ge[a] * (rho(e, g) - std::conj(rho(g, e)));
            }
        }
    }
    return 0.5 * (n_atoms - 1) * std::sqrt(0.5 * gamma) * acc;
}

Complex weight_increment(const BlochSystem& bs, const LevelMatrix& rho,
                         const NoiseVectors& nv)
{
    return weight_increment_fast(bs, rho, nv);
}

}  // namespace sfs
