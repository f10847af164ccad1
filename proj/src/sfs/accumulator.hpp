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


// Per-trajectory quantities recorded on the output grid and their streaming
// weighted reduction.
//
// Means are self-normalized: mean = sum(w x) / sum(w), with w = exp(C0) in
// weighted mode and w = 1 otherwise. Standard errors come from the
// linearized ratio estimator, so every accumulator stores the first moments
// of w x and w plus their mixed second moments.

#pragma once

#include <string>
#include <vector>

#include "sfs/deterministic.hpp"

namespace sfs {

/// Which per-trajectory products are recorded and how they are named.
class ChannelLayout {
  public:
    enum class Kind { coherence, pair, triple, intensity };

    struct Channel {
        Kind kind = Kind::coherence;
        std::string name;
        int a = 0, b = 0, c = 0, d = 0;  ///< level indices, or axis for intensity
    };

    /// Pair products are recorded only up to this many levels.
    static constexpr int kMaxPairLevels = 4;

    ChannelLayout() = default;
    explicit ChannelLayout(const Scenario& s);

    int size() const { return static_cast<int>(channels_.size()); }
    const Channel& operator[](int i) const { return channels_[i]; }
    const std::vector<Channel>& channels() const { return channels_; }

    /// Index of a channel by name, or -1.
    int find(const std::string& name) const;

    int coherence(int p, int q) const { return p * dim_ + q; }
    /// Channel of <rho_pq rho_rs>, or -1 when pair products are not recorded.
    int pair(int p, int q, int r, int s) const;
    int triple() const { return triple_; }
    /// axis 0, 1, or -1 for the total.
    int intensity(int axis) const { return intensity_ + (axis < 0 ? 2 : axis); }

    /// Writes one value per channel.
    void evaluate(const BlochSystem& bs, const LevelMatrix& rho, Complex* out) const;

    int dim() const { return dim_; }

  private:
    int dim_ = 0;
    int n_atoms_ = 1;
    std::vector<Channel> channels_;
    int pair_base_ = -1;
    int triple_ = -1;
    int intensity_ = 0;
    std::array<int, 3> triple_levels_{};
};

/// Moment sums for one output grid. Merging is a plain elementwise sum, so
/// it is associative; callers fix the merge order for bitwise
/// reproducibility.
class MomentAccumulator {
  public:
    MomentAccumulator() = default;
    MomentAccumulator(int n_times, int n_channels, std::vector<Complex> shift);

    /// Adds one trajectory's value set at time index j with weight w.
    void add(int j, Complex w, const Complex* values, bool gauge_active);
    void merge(const MomentAccumulator& other);

    int n_times() const { return n_times_; }
    int n_channels() const { return n_channels_; }
    long long count(int j) const { return n_[j]; }

    struct Estimate {
        Complex mean;
        double stderr_re = 0.0;
        double stderr_im = 0.0;
    };
    Estimate estimate(int j, int channel) const;

    /// Fraction of samples at time j that had the drift gauge active.
    double gauge_active_fraction(int j) const;

  private:
    // Per time: sum w (re, im), sum zr^2, zi^2, zr zi.
    static constexpr int kTimeStride = 5;
    // Per channel: sum y (re, im), yr^2, yi^2, yr yi, yr zr, yr zi, yi zr, yi zi.
    static constexpr int kChannelStride = 9;

    int n_times_ = 0;
    int n_channels_ = 0;
    std::vector<Complex> shift_;
    std::vector<long long> n_;
    std::vector<long long> gauge_;
    std::vector<double> time_sums_;
    std::vector<double> channel_sums_;
};

}  // namespace sfs
