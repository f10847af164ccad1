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


#include "sfs/accumulator.hpp"

#include <cmath>

namespace sfs {

ChannelLayout::ChannelLayout(const Scenario& s)
    : dim_(s.system.size()), n_atoms_(s.n_atoms)
{
    const auto& labels = s.system.labels;
    const int m = dim_;
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
            channels_.push_back(
                {Kind::coherence, "rho_" + labels[p] + "_" + labels[q], p, q, 0, 0});
        }
    }
    if (m <= kMaxPairLevels) {
        pair_base_ = size();
        const int k = m * m;
        for (int i = 0; i < k; ++i) {
            for (int j = i; j < k; ++j) {
                int p = i / m, q = i % m, r = j / m, t = j % m;
                channels_.push_back({Kind::pair,
                                     "pair_" + labels[p] + "_" + labels[q] + "_"
                                         + labels[r] + "_" + labels[t],
                                     p, q, r, t});
            }
        }
    }
    if (m >= 3) {
        int l1 = s.system.find("1"), l2 = s.system.find("2"), l3 = s.system.find("3");
        if (l1 < 0 || l2 < 0 || l3 < 0) {
            l1 = 0;
            l2 = 1;
            l3 = 2;
        }
        triple_levels_ = {l1, l2, l3};
        triple_ = size();
        channels_.push_back({Kind::triple, "triple", l1, l2, l3, 0});
    }
    intensity_ = size();
    channels_.push_back({Kind::intensity, "I_x", 0, 0, 0, 0});
    channels_.push_back({Kind::intensity, "I_y", 1, 0, 0, 0});
    channels_.push_back({Kind::intensity, "I", -1, 0, 0, 0});
}

int ChannelLayout::find(const std::string& name) const
{
    for (int i = 0; i < size(); ++i) {
        if (channels_[i].name == name) return i;
    }
    return -1;
}

int ChannelLayout::pair(int p, int q, int r, int s) const
{
    if (pair_base_ < 0) return -1;
    const int k = dim_ * dim_;
    int i = p * dim_ + q;
    int j = r * dim_ + s;
    if (i > j) std::swap(i, j);
    return pair_base_ + i * k - i * (i - 1) / 2 + (j - i);
}

void ChannelLayout::evaluate(const BlochSystem& bs, const LevelMatrix& rho,
                             Complex* out) const
{
    const int m = dim_;
    for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) out[p * m + q] = rho(p, q);
    }
    if (pair_base_ >= 0) {
        const int k = m * m;
        Complex* o = out + pair_base_;
        for (int i = 0; i < k; ++i) {
            for (int j = i; j < k; ++j) *o++ = out[i] * out[j];
        }
    }
    if (triple_ >= 0) {
        auto [a, b, c] = triple_levels_;
        out[triple_] = rho(a, b) * rho(b, c) * rho(c, a);
    }
    AxisVector pp = bs.dipole_plus(rho);
    AxisVector pm = bs.dipole_minus(rho);
    AxisVector single{};
    for (const auto& l1 : bs.links()) {
        for (const auto& l2 : bs.links()) {
            if (l1.g != l2.g) continue;
            for (int a = 0; a < kAxes; ++a) {
                single[a] += l1.d[a] * std::conj(l2.d[a]) * rho(l2.e, l1.e);
            }
        }
    }
    const double n = n_atoms_;
    Complex total{};
    for (int a = 0; a < kAxes; ++a) {
        Complex v = n * single[a] + n * (n - 1.0) * pm[a] * pp[a];
        out[intensity_ + a] = v;
        total += v;
    }
    out[intensity_ + 2] = total;
}

//---------------------------------------------------------------------------//

MomentAccumulator::MomentAccumulator(int n_times, int n_channels,
                                     std::vector<Complex> shift)
    : n_times_(n_times),
      n_channels_(n_channels),
      shift_(std::move(shift)),
      n_(n_times, 0),
      gauge_(n_times, 0),
      time_sums_(static_cast<size_t>(n_times) * kTimeStride, 0.0),
      channel_sums_(static_cast<size_t>(n_times) * n_channels * kChannelStride, 0.0)
{
    shift_.resize(n_channels);
}

void MomentAccumulator::add(int j, Complex w, const Complex* values, bool gauge_active)
{
    ++n_[j];
    if (gauge_active) ++gauge_[j];
    const double zr = w.real(), zi = w.imag();
    double* ts = &time_sums_[static_cast<size_t>(j) * kTimeStride];
    ts[0] += zr;
    ts[1] += zi;
    ts[2] += zr * zr;
    ts[3] += zi * zi;
    ts[4] += zr * zi;
    double* cs = &channel_sums_[static_cast<size_t>(j) * n_channels_ * kChannelStride];
    for (int c = 0; c < n_channels_; ++c, cs += kChannelStride) {
        const Complex y = w * (values[c] - shift_[c]);
        const double yr = y.real(), yi = y.imag();
        cs[0] += yr;
        cs[1] += yi;
        cs[2] += yr * yr;
        cs[3] += yi * yi;
        cs[4] += yr * yi;
        cs[5] += yr * zr;
        cs[6] += yr * zi;
        cs[7] += yi * zr;
        cs[8] += yi * zi;
    }
}

void MomentAccumulator::merge(const MomentAccumulator& other)
{
    if (other.n_times_ != n_times_ || other.n_channels_ != n_channels_) {
        throw std::invalid_argument("accumulator shapes differ");
    }
    for (int j = 0; j < n_times_; ++j) {
        n_[j] += other.n_[j];
        gauge_[j] += other.gauge_[j];
    }
    for (size_t i = 0; i < time_sums_.size(); ++i) time_sums_[i] += other.time_sums_[i];
    for (size_t i = 0; i < channel_sums_.size(); ++i) {
        channel_sums_[i] += other.channel_sums_[i];
    }
}

double MomentAccumulator::gauge_active_fraction(int j) const
{
    return n_[j] > 0 ? static_cast<double>(gauge_[j]) / n_[j] : 0.0;
}

MomentAccumulator::Estimate MomentAccumulator::estimate(int j, int channel) const
{
    Estimate est;
    const long long n = n_[j];
    if (n == 0) {
        est.mean = Complex(std::nan(""), std::nan(""));
        est.stderr_re = est.stderr_im = std::nan("");
        return est;
    }
    const double* ts = &time_sums_[static_cast<size_t>(j) * kTimeStride];
    const double* cs =
        &channel_sums_[(static_cast<size_t>(j) * n_channels_ + channel) * kChannelStride];
    const double inv_n = 1.0 / static_cast<double>(n);
    const Complex Z(ts[0] * inv_n, ts[1] * inv_n);
    const Complex Y(cs[0] * inv_n, cs[1] * inv_n);
    const Complex mu = Y / Z;
    est.mean = mu + shift_[channel];
    if (n < 2) {
        est.stderr_re = est.stderr_im = std::nan("");
        return est;
    }

    // Covariance of v = (yr, yi, zr, zi).
    const double m[4] = {Y.real(), Y.imag(), Z.real(), Z.imag()};
    double s[4][4];
    s[0][0] = cs[2];
    s[1][1] = cs[3];
    s[0][1] = s[1][0] = cs[4];
    s[0][2] = s[2][0] = cs[5];
    s[0][3] = s[3][0] = cs[6];
    s[1][2] = s[2][1] = cs[7];
    s[1][3] = s[3][1] = cs[8];
    s[2][2] = ts[2];
    s[3][3] = ts[3];
    s[2][3] = s[3][2] = ts[4];
    double cov[4][4];
    const double bessel = static_cast<double>(n) / static_cast<double>(n - 1);
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) cov[a][b] = (s[a][b] * inv_n - m[a] * m[b]) * bessel;
    }

    // u = (y - mu z) conj(Z) / |Z|^2; Re u and Im u are linear in v.
    const Complex a = std::conj(Z);
    const Complex b = mu * a;
    const double c_re[4] = {a.real(), -a.imag(), -b.real(), b.imag()};
    const double c_im[4] = {a.imag(), a.real(), -b.imag(), -b.real()};
    auto quad = [&](const double* c) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) {
            for (int k = 0; k < 4; ++k) acc += c[i] * cov[i][k] * c[k];
        }
        return std::max(acc, 0.0);
    };
    const double z4 = std::norm(Z) * std::norm(Z);
    est.stderr_re = std::sqrt(quad(c_re) / z4 * inv_n);
    est.stderr_im = std::sqrt(quad(c_im) / z4 * inv_n);
    return est;
}

}  // namespace sfs
