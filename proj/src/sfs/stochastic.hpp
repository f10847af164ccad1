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

// Noise terms: elementary complex white noises with diffusion-gauge scaling,
// the matrix increment F they drive, and the two-emitter correlator chi that
// the increment has to reproduce on average.

#pragma once

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "sfs/deterministic.hpp"

namespace sfs {

using Rng = std::mt19937_64;

/// One step's elementary noises (already divided by sqrt(dt)). f_dag and
/// g_dag are independent entries, not conjugates of f and g, once the gauge
/// scalings differ from one.
struct NoiseVectors {
    AxisVector f{};
    AxisVector f_dag{};
    AxisVector g{};
    AxisVector g_dag{};
    AxisReal eta{1.0, 1.0};
    AxisReal theta{1.0, 1.0};
};

struct DiffusionGauge {
    AxisReal eta{1.0, 1.0};
    AxisReal theta{1.0, 1.0};
};

inline constexpr double kGaugeMin = 1e-3;
inline constexpr double kGaugeMax = 1e3;
inline constexpr double kGaugeDenominatorFloor = 1e-30;

/// Gauge scalings that minimize the growth of the anti-Hermitian dipole
/// moment, evaluated from the level-indexed tensors by direct loops.
DiffusionGauge diffusion_gauge_params(const LevelMatrix& rho, const LevelSystem& sys);

/// Same quantity, computed from the compiled transition list.
DiffusionGauge diffusion_gauge_params(const LevelMatrix& rho, const BlochSystem& bs);

namespace detail {

using Tensor2 = std::array<std::array<Complex, kAxes>, kAxes>;

struct GaugeTensors {
    Tensor2 gg{}, ge{}, eg{}, ee{};
    AxisVector plus{}, minus{};
};

DiffusionGauge gauge_from_tensors(const GaugeTensors& t);

}  // namespace detail

/// Link-based gauge for any column-major matrix type. Axes without dipole
/// components contribute nothing and are skipped.
template<class Mat>
DiffusionGauge diffusion_gauge_fast(const Mat& rho, const BlochSystem& bs)
{
    detail::GaugeTensors t;
    t.plus = bs.dipole_plus(rho);
    t.minus = bs.dipole_minus(rho);
    const auto& axes = bs.active_axes();
    for (const auto& l1 : bs.links()) {
        for (const auto& l2 : bs.links()) {
            const Complex r_gg = rho(l1.g, l2.g);
            const Complex r_ge = rho(l1.g, l2.e);
            const Complex r_eg = rho(l1.e, l2.g);
            const Complex r_ee = rho(l1.e, l2.e);
            for (int a = 0; a < kAxes; ++a) {
                if (!axes[a]) continue;
                const Complex d1 = l1.d[a];
                const Complex d1c = std::conj(d1);
                for (int b = 0; b < kAxes; ++b) {
                    if (!axes[b]) continue;
                    const Complex d2 = l2.d[b];
                    const Complex d2c = std::conj(d2);
                    t.gg[a][b] += d1 * r_gg * d2c;
                    t.ge[a][b] += d1 * r_ge * d2;
                    t.eg[a][b] += d1c * r_eg * d2c;
                    t.ee[a][b] += d1c * r_ee * d2;
                }
            }
        }
    }
    return detail::gauge_from_tensors(t);
}

/// Draws f1, f2, g1, g2 ~ N(0, 1) per axis, in that order, and scales them
/// by 1/sqrt(dt). Axes masked off draw nothing and stay zero.
NoiseVectors sample_noise(Rng& rng, double dt, const AxisReal& eta,
                          const AxisReal& theta,
                          const std::array<bool, kAxes>& axes = {true, true});

/// Noise increment F_pq by direct index loops.
LevelMatrix noise_increment(const EffectiveState& state, const NoiseVectors& nv,
                            const LevelSystem& sys, double gamma);

/// Noise increment from the compiled transition list; writes into `out`.
void noise_increment(const BlochSystem& bs, const LevelMatrix& rho,
                     const NoiseVectors& nv, LevelMatrix& out);

/// F = k [L rho + rho R - s rho] with L = Gf - Gg + Gg_dag and
/// R = Gg + Gf_dag - Gf, where G* are the noise-weighted dipole operators.
template<class Mat>
void noise_increment_fast(const BlochSystem& bs, const Mat& rho, const NoiseVectors& nv,
                          Mat& out)
{
    const int m = bs.dim();
    const double k = std::sqrt(0.5 * bs.gamma());
    AxisVector pp = bs.dipole_plus(rho);
    AxisVector pm = bs.dipole_minus(rho);
    Complex s{};
    for (int a = 0; a < kAxes; ++a) s += nv.f_dag[a] * pm[a] + nv.g_dag[a] * pp[a];
    out.noalias() = (-k * s) * rho;
    for (const auto& l : bs.links()) {
        Complex down{}, up{}, down_r{}, up_r{};
        for (int a = 0; a < kAxes; ++a) {
            const Complex d = l.d[a];
            const Complex dc = std::conj(d);
            up += (nv.f[a] + nv.g_dag[a]) * dc;       // L(g, e)
            down -= nv.g[a] * d;                        // L(e, g)
            down_r += (nv.g[a] + nv.f_dag[a]) * d;     // R(e, g)
            up_r -= nv.f[a] * dc;                       // R(g, e)
        }
        up *= k;
        down *= k;
        down_r *= k;
        up_r *= k;
        for (int q = 0; q < m; ++q) {
            out(l.g, q) += up * rho(l.e, q);
            out(l.e, q) += down * rho(l.g, q);
        }
        for (int p = 0; p < m; ++p) {
            out(p, l.g) += rho(p, l.e) * down_r;
            out(p, l.e) += rho(p, l.g) * up_r;
        }
    }
}

/// chi_pqrs, flat index ((p*M + q)*M + r)*M + s.
struct CovarianceTensor {
    int dim = 0;
    std::vector<Complex> chi;

    Complex operator()(int p, int q, int r, int s) const
    {
        return chi[((static_cast<size_t>(p) * dim + q) * dim + r) * dim + s];
    }
};

CovarianceTensor chi_covariance(const EffectiveState& state, const LevelSystem& sys,
                                double gamma);

}  // namespace sfs
