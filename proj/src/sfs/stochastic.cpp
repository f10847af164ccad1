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

#include "sfs/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/random/normal_distribution.hpp>

namespace sfs {
namespace {

double quartic_root_clamped(double num, double den)
{
    if (den < kGaugeDenominatorFloor) return 1.0;
    double v = std::sqrt(std::sqrt(num / den));
    return std::clamp(v, kGaugeMin, kGaugeMax);
}

}  // namespace

namespace detail {

DiffusionGauge gauge_from_tensors(const GaugeTensors& t)
{
    DiffusionGauge out;
    for (int b = 0; b < kAxes; ++b) {
        double eta_num = 0.0, eta_den = 0.0, th_num = 0.0, th_den = 0.0;
        for (int a = 0; a < kAxes; ++a) {
            eta_num += std::norm(t.ee[a][b] - t.plus[a] * t.minus[b])
                       + std::norm(t.ge[a][b] - t.minus[a] * t.minus[b]);
            eta_den += std::norm(t.eg[b][a] - t.eg[a][b])
                       + std::norm(t.ee[b][a] - t.gg[a][b]);
            th_num += std::norm(t.eg[b][a] - t.plus[a] * t.plus[b])
                      + std::norm(t.ee[b][a] - t.minus[a] * t.plus[b]);
            th_den += std::norm(t.ge[a][b] - t.ge[b][a])
                      + std::norm(t.ee[a][b] - t.gg[b][a]);
        }
        out.eta[b] = quartic_root_clamped(eta_num, eta_den);
        out.theta[b] = quartic_root_clamped(th_num, th_den);
    }
    return out;
}

}  // namespace detail

DiffusionGauge diffusion_gauge_params(const LevelMatrix& rho, const LevelSystem& sys)
{
    const int m = sys.size();
    detail::GaugeTensors t;
    for (int e = 0; e < m; ++e) {
        for (int g = 0; g < m; ++g) {
            AxisVector d_eg = sys.d_excited_ground(e, g);
            AxisVector d_ge = sys.d_ground_excited(g, e);
            for (int a = 0; a < kAxes; ++a) {
                t.plus[a] += d_ge[a] * rho(e, g);
                t.minus[a] += d_eg[a] * rho(g, e);
            }
            for (int e2 = 0; e2 < m; ++e2) {
                for (int g2 = 0; g2 < m; ++g2) {
                    AxisVector d_e2g2 = sys.d_excited_ground(e2, g2);
                    AxisVector d_g2e2 = sys.d_ground_excited(g2, e2);
                    for (int a = 0; a < kAxes; ++a) {
                        for (int b = 0; b < kAxes; ++b) {
                            t.gg[a][b] += d_eg[a] * rho(g, g2) * d_g2e2[b];
                            t.ge[a][b] += d_eg[a] * rho(g, e2) * d_e2g2[b];
                            t.eg[a][b] += d_ge[a] * rho(e, g2) * d_g2e2[b];
                            t.ee[a][b] += d_ge[a] * rho(e, e2) * d_e2g2[b];
                        }
                    }
                }
            }
        }
    }
    return detail::gauge_from_tensors(t);
}

DiffusionGauge diffusion_gauge_params(const LevelMatrix& rho, const BlochSystem& bs)
{
    return diffusion_gauge_fast(rho, bs);
}

NoiseVectors sample_noise(Rng& rng, double dt, const AxisReal& eta,
                          const AxisReal& theta, const std::array<bool, kAxes>& axes)
{
    boost::random::normal_distribution<double> normal;
    const double k = 1.0 / std::sqrt(2.0 * dt);
    NoiseVectors nv;
    nv.eta = eta;
    nv.theta = theta;
    for (int a = 0; a < kAxes; ++a) {
        if (!axes[a]) continue;
        double f1 = normal(rng);
        double f2 = normal(rng);
        double g1 = normal(rng);
        double g2 = normal(rng);
        Complex fbar{k * f1, k * f2};
        Complex gbar{k * g1, k * g2};
        nv.f[a] = eta[a] * fbar;
        nv.f_dag[a] = std::conj(fbar) / eta[a];
        nv.g[a] = theta[a] * gbar;
        nv.g_dag[a] = std::conj(gbar) / theta[a];
    }
    return nv;
}

LevelMatrix noise_increment(const EffectiveState& state, const NoiseVectors& nv,
                            const LevelSystem& sys, double gamma)
{
    const int m = sys.size();
    const auto& rho = state.rho;
    AxisVector sum_minus{};  // sum_{g,e} d_eg rho_ge
    AxisVector sum_plus{};   // sum_{e,g} d_ge rho_eg
    for (int e = 0; e < m; ++e) {
        for (int g = 0; g < m; ++g) {
            AxisVector d_eg = sys.d_excited_ground(e, g);
            AxisVector d_ge = sys.d_ground_excited(g, e);
            for (int a = 0; a < kAxes; ++a) {
                sum_minus[a] += d_eg[a] * rho(g, e);
                sum_plus[a] += d_ge[a] * rho(e, g);
            }
        }
    }
    const double k = std::sqrt(0.5 * gamma);
    LevelMatrix out(m, m);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            AxisVector cf{}, cg{}, cfd{}, cgd{};
            for (int r = 0; r < m; ++r) {
                AxisVector d_p_lt_r = sys.d_ground_excited(p, r);
                AxisVector d_r_lt_q = sys.d_ground_excited(r, q);
                AxisVector d_r_gt_q = sys.d_excited_ground(r, q);
                AxisVector d_p_gt_r = sys.d_excited_ground(p, r);
                for (int a = 0; a < kAxes; ++a) {
                    cf[a] += d_p_lt_r[a] * rho(r, q) - rho(p, r) * d_r_lt_q[a];
                    cg[a] += rho(p, r) * d_r_gt_q[a] - d_p_gt_r[a] * rho(r, q);
                    cfd[a] += rho(p, r) * d_r_gt_q[a];
                    cgd[a] += d_p_lt_r[a] * rho(r, q);
                }
            }
            for (int a = 0; a < kAxes; ++a) {
                cfd[a] -= rho(p, q) * sum_minus[a];
                cgd[a] -= rho(p, q) * sum_plus[a];
            }
            out(p, q) = k * (dot(cf, nv.f) + dot(cg, nv.g) + dot(cfd, nv.f_dag)
                             + dot(cgd, nv.g_dag));
        }
    }
    return out;
}

void noise_increment(const BlochSystem& bs, const LevelMatrix& rho,
                     const NoiseVectors& nv, LevelMatrix& out)
{
    noise_increment_fast(bs, rho, nv, out);
}

CovarianceTensor chi_covariance(const EffectiveState& state, const LevelSystem& sys,
                                double gamma)
{
    const int m = sys.size();
    const auto& rho = state.rho;
    AxisVector sum_minus{};  // sum_{g,e} d_eg rho_ge
    AxisVector sum_plus{};   // sum_{e,g} d_ge rho_eg
    for (int e = 0; e < m; ++e) {
        for (int g = 0; g < m; ++g) {
            AxisVector d_eg = sys.d_excited_ground(e, g);
            AxisVector d_ge = sys.d_ground_excited(g, e);
            for (int a = 0; a < kAxes; ++a) {
                sum_minus[a] += d_eg[a] * rho(g, e);
                sum_plus[a] += d_ge[a] * rho(e, g);
            }
        }
    }

    // Per index pair (p, q): the four vector factors appearing in chi.
    //   u1 = sum_r' rho_pr' d_r'>q - rho_pq P-
    //   u2 = sum_r' (rho_pr' d_r'>q - d_p>r' rho_r'q)
    //   v1 = sum_p' (d_p<p' rho_p'q - rho_pp' d_p'<q)
    //   v2 = sum_p' d_p<p' rho_p'q - rho_pq P+
    const size_t mm = static_cast<size_t>(m) * m;
    std::vector<AxisVector> u1(mm), u2(mm), v1(mm), v2(mm);
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            AxisVector a1{}, a2{}, b1{}, b2{};
            for (int r = 0; r < m; ++r) {
                AxisVector d_r_gt_q = sys.d_excited_ground(r, q);
                AxisVector d_p_gt_r = sys.d_excited_ground(p, r);
                AxisVector d_p_lt_r = sys.d_ground_excited(p, r);
                AxisVector d_r_lt_q = sys.d_ground_excited(r, q);
                for (int a = 0; a < kAxes; ++a) {
                    a1[a] += rho(p, r) * d_r_gt_q[a];
                    a2[a] += rho(p, r) * d_r_gt_q[a] - d_p_gt_r[a] * rho(r, q);
                    b1[a] += d_p_lt_r[a] * rho(r, q) - rho(p, r) * d_r_lt_q[a];
                    b2[a] += d_p_lt_r[a] * rho(r, q);
                }
            }
            for (int a = 0; a < kAxes; ++a) {
                a1[a] -= rho(p, q) * sum_minus[a];
                b2[a] -= rho(p, q) * sum_plus[a];
            }
            size_t i = static_cast<size_t>(p) * m + q;
            u1[i] = a1;
            u2[i] = a2;
            v1[i] = b1;
            v2[i] = b2;
        }
    }

    CovarianceTensor out;
    out.dim = m;
    out.chi.assign(mm * mm, Complex{});
    for (size_t pq = 0; pq < mm; ++pq) {
        for (size_t rs = 0; rs < mm; ++rs) {
            Complex direct = dot(u1[pq], v1[rs]) + dot(u2[pq], v2[rs]);
            Complex swapped = dot(u1[rs], v1[pq]) + dot(u2[rs], v2[pq]);
            out.chi[pq * mm + rs] = 0.5 * gamma * (direct + swapped);
        }
    }
    return out;
}

}  // namespace sfs
