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


// Split-step trajectory integration and ensemble execution.
//
// Each noise step of size dt evaluates the gauge decision, the diffusion
// gauge, the noise increment and the weight increment at the left endpoint,
// advances the deterministic flow over [t, t + dt] with an adaptive embedded
// Runge-Kutta pair, then adds the noise and weight increments (Euler-Maruyama).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sfs/accumulator.hpp"
#include "sfs/gauges.hpp"
#include "sfs/rk.hpp"

namespace sfs {

/// Deterministic per-trajectory seed derived from the base seed and the
/// trajectory index; independent of how trajectories are scheduled.
std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index);

struct StepWorkspace {
    double h_hint = 0.0;  ///< deterministic step proposal carried between steps
    long rk_accepted = 0;
    long rk_rejected = 0;
    long noise_steps = 0;
    double max_noise_dt = 0.0;
};

class Propagator {
  public:
    explicit Propagator(const Scenario& s);

    const Scenario& scenario() const { return s_; }
    const BlochSystem& system() const { return bs_; }

    /// Output grid and, between consecutive grid points, the number of
    /// equal noise steps needed to respect the step cap.
    const std::vector<double>& times() const { return times_; }
    const std::vector<int>& substeps() const { return substeps_; }

    EffectiveState initial_state() const;

    /// One noise step. Returns false when the state diverged.
    bool step(EffectiveState& st, double dt, Rng& rng, StepWorkspace& ws) const;

    /// Deterministic flow only, with fields assembled plain or hermitized.
    void advance_deterministic(EffectiveState& st, double dt, bool hermitized,
                               StepWorkspace& ws) const;

    bool diverged(const EffectiveState& st) const;

    /// Integrates one trajectory from the initial state. `visit(j, state)`
    /// is called at every output time reached. Returns the divergence time,
    /// or a negative value on completion.
    template<class Visit>
    double run(Rng& rng, Visit&& visit, StepWorkspace& ws) const
    {
        // Between output times the state lives in a fixed-size matrix so
        // the inner loop carries no dimension checks.
        switch (bs_.dim()) {
        case 1: return run_as<FixedMatrix<1>>(rng, visit, ws);
        case 2: return run_as<FixedMatrix<2>>(rng, visit, ws);
        case 3: return run_as<FixedMatrix<3>>(rng, visit, ws);
        case 4: return run_as<FixedMatrix<4>>(rng, visit, ws);
        case 5: return run_as<FixedMatrix<5>>(rng, visit, ws);
        case 6: return run_as<FixedMatrix<6>>(rng, visit, ws);
        case 7: return run_as<FixedMatrix<7>>(rng, visit, ws);
        default: return run_as<LevelMatrix>(rng, visit, ws);
        }
    }

  private:
    template<int M>
    using FixedMatrix = Eigen::Matrix<Complex, M, M>;

    template<class Mat, class Visit>
    double run_as(Rng& rng, Visit& visit, StepWorkspace& ws) const
    {
        EffectiveState st = initial_state();
        visit(0, st);
        Mat rho = st.rho;
        Complex c0 = st.c0;
        for (size_t j = 1; j < times_.size(); ++j) {
            const double t0 = times_[j - 1];
            const int n = substeps_[j - 1];
            const double dt = (times_[j] - t0) / n;
            for (int k = 0; k < n; ++k) {
                const double t = t0 + k * dt;
                if (!step_as(rho, c0, t, dt, rng, ws)) return t + dt;
            }
            st.rho = rho;
            st.c0 = c0;
            st.t = times_[j];
            visit(static_cast<int>(j), st);
        }
        return -1.0;
    }

    template<class Mat>
    bool step_as(Mat& rho, Complex& c0, double t, double dt, Rng& rng,
                 StepWorkspace& ws) const
    {
        const GaugeDecision dec = drift_gauge_active(rho, s_.system, s_.gauge_policy);
        const DiffusionGauge gauge = diffusion_gauge_fast(rho, bs_);
        const NoiseVectors nv =
            sample_noise(rng, dt, gauge.eta, gauge.theta, bs_.active_axes());
        Mat noise(rho.rows(), rho.cols());
        noise_increment_fast(bs_, rho, nv, noise);
        const Complex dc0 = dec.active ? weight_increment_fast(bs_, rho, nv) : Complex{};
        try {
            advance_as(rho, t, dt, dec.active, ws);
        } catch (const std::runtime_error&) {
            return false;
        }
        rho += noise * dt;
        c0 += dc0 * dt;
        ++ws.noise_steps;
        ws.max_noise_dt = std::max(ws.max_noise_dt, dt);
        return !diverged_as(rho, c0);
    }

    template<class Mat>
    void advance_as(Mat& rho, double t, double dt, bool hermitized, StepWorkspace& ws) const
    {
        rk::Options opt = rk_opts_;
        opt.initial_step = ws.h_hint;
        rk::Stats stats;
        auto f = [&](double tt, const Mat& y, Mat& dy) { bs_.rhs(y, tt, hermitized, dy); };
        rk::integrate<rk::BogackiShampine32>(f, t, t + dt, rho, opt, stats);
        ws.h_hint = stats.suggested_step;
        ws.rk_accepted += stats.accepted;
        ws.rk_rejected += stats.rejected;
    }

    template<class Mat>
    bool diverged_as(const Mat& rho, const Complex& c0) const
    {
        if (!std::isfinite(c0.real()) || !std::isfinite(c0.imag())) return true;
        const Complex* p = rho.data();
        const double t2 = threshold_ * threshold_;
        for (Eigen::Index i = 0; i < rho.size(); ++i) {
            const double re = p[i].real(), im = p[i].imag();
            if (!std::isfinite(re) || !std::isfinite(im)) return true;
            if (re * re + im * im > t2) return true;
        }
        return false;
    }

    Scenario s_;
    BlochSystem bs_;
    rk::Options rk_opts_;
    double threshold_;
    std::vector<double> times_;
    std::vector<int> substeps_;
};

/// Convenience wrapper: one noise step from `state` for scenario `s`.
EffectiveState step(const EffectiveState& state, double dt, Rng& rng, const Scenario& s);

struct TrajectoryRecord {
    enum class Status { completed, diverged };

    Status status = Status::completed;
    double t_diverged = 0.0;
    std::vector<EffectiveState> snapshots;  ///< one per output time reached
};

TrajectoryRecord run_trajectory(const Scenario& s, std::uint64_t seed);

//---------------------------------------------------------------------------//

struct OmittedTrajectory {
    long long index = 0;
    double t_diverged = 0.0;
};

struct EnsembleResult {
    std::vector<double> times;
    ChannelLayout layout;
    MomentAccumulator moments;
    WeightMode weight_mode = WeightMode::weighted;

    long long total = 0;
    long long completed = 0;
    long long omitted = 0;
    std::vector<OmittedTrajectory> omitted_list;

    std::uint64_t seed = 0;
    std::string config_hash;

    /// Largest |sum_p rho_pp - 1| seen at any output time of a completed
    /// trajectory.
    double max_trace_error = 0.0;
    /// Largest |C0| seen at any output time of a completed trajectory.
    double max_abs_c0 = 0.0;

    double omitted_fraction() const
    {
        return total > 0 ? static_cast<double>(omitted) / total : 0.0;
    }

    /// Adds a later batch; the caller keeps batch order fixed.
    void merge(const EnsembleResult& later);
};

struct EnsembleOptions {
    int threads = 0;           ///< 0: SFS_THREADS or the hardware count
    long long chunk = 256;     ///< trajectories per scheduling unit
    bool enforce_cap = true;   ///< throw when too many trajectories diverge
};

/// Runs trajectories [first, first + count) of the scenario's seed stream.
EnsembleResult run_ensemble_range(const Scenario& s, long long first, long long count,
                                  const EnsembleOptions& opt = {});

/// Runs the configured number of trajectories.
EnsembleResult run_ensemble(const Scenario& s, const EnsembleOptions& opt = {});

/// Throws DivergenceCapError when the omitted fraction exceeds the cap.
void check_omitted_cap(const EnsembleResult& r, const Scenario& s);

/// Worker count from SFS_THREADS, falling back to the hardware count.
int default_thread_count();

}  // namespace sfs
