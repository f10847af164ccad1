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


#include "sfs/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

#include "sfs/config.hpp"

namespace sfs {
namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t base, std::uint64_t index)
{
    return splitmix64(splitmix64(base) + index);
}

Propagator::Propagator(const Scenario& s)
    : s_(s), bs_(s), threshold_(s.ensemble.divergence_threshold)
{
    rk_opts_.rtol = s.grid.rtol;
    rk_opts_.atol = s.grid.atol;
    times_ = s.grid.times();
    const double cap = s.step_cap();
    for (size_t j = 1; j < times_.size(); ++j) {
        double span = times_[j] - times_[j - 1];
        int n = static_cast<int>(std::ceil(span / cap * (1.0 - 1e-12)));
        substeps_.push_back(std::max(n, 1));
    }
}

EffectiveState Propagator::initial_state() const
{
    EffectiveState st;
    st.rho = s_.initial;
    st.t = times_.empty() ? 0.0 : times_.front();
    return st;
}

void Propagator::advance_deterministic(EffectiveState& st, double dt, bool hermitized,
                                       StepWorkspace& ws) const
{
    advance_as(st.rho, st.t, dt, hermitized, ws);
}

bool Propagator::step(EffectiveState& st, double dt, Rng& rng, StepWorkspace& ws) const
{
    const bool ok = step_as(st.rho, st.c0, st.t, dt, rng, ws);
    st.t += dt;
    return ok;
}

bool Propagator::diverged(const EffectiveState& st) const
{
    return diverged_as(st.rho, st.c0);
}

EffectiveState step(const EffectiveState& state, double dt, Rng& rng, const Scenario& s)
{
    Propagator prop(s);
    StepWorkspace ws;
    EffectiveState next = state;
    if (!prop.step(next, dt, rng, ws)) {
        throw DivergenceCapError("trajectory diverged");
    }
    return next;
}

TrajectoryRecord run_trajectory(const Scenario& s, std::uint64_t seed)
{
    Propagator prop(s);
    Rng rng(seed);
    StepWorkspace ws;
    TrajectoryRecord rec;
    double td = prop.run(
        rng, [&](int, const EffectiveState& st) { rec.snapshots.push_back(st); }, ws);
    if (td >= 0.0) {
        rec.status = TrajectoryRecord::Status::diverged;
        rec.t_diverged = td;
    }
    return rec;
}

//---------------------------------------------------------------------------//

void EnsembleResult::merge(const EnsembleResult& later)
{
    moments.merge(later.moments);
    total += later.total;
    completed += later.completed;
    omitted += later.omitted;
    omitted_list.insert(omitted_list.end(), later.omitted_list.begin(),
                        later.omitted_list.end());
    max_trace_error = std::max(max_trace_error, later.max_trace_error);
    max_abs_c0 = std::max(max_abs_c0, later.max_abs_c0);
}

int default_thread_count()
{
    if (const char* env = std::getenv("SFS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

std::vector<Complex> channel_shift(const Propagator& prop, const ChannelLayout& layout)
{
    std::vector<Complex> shift(layout.size());
    layout.evaluate(prop.system(), prop.initial_state().rho, shift.data());
    return shift;
}

EnsembleResult empty_result(const Scenario& s, const Propagator& prop,
                            const ChannelLayout& layout, const std::vector<Complex>& shift)
{
    EnsembleResult r;
    r.times = prop.times();
    r.layout = layout;
    r.moments = MomentAccumulator(static_cast<int>(r.times.size()), layout.size(), shift);
    r.weight_mode = s.weight_mode;
    r.seed = s.ensemble.seed;
    r.config_hash = config_hash(s);
    return r;
}

void run_batch(const Propagator& prop, const ChannelLayout& layout,
               long long first, long long count, EnsembleResult& out)
{
    const Scenario& s = prop.scenario();
    const int n_times = static_cast<int>(prop.times().size());
    const int n_ch = layout.size();
    const bool weighted = s.weight_mode == WeightMode::weighted;
    std::vector<Complex> values(static_cast<size_t>(n_times) * n_ch);
    std::vector<Complex> weights(n_times);
    std::vector<char> active(n_times);
    for (long long i = first; i < first + count; ++i) {
        Rng rng(trajectory_seed(s.ensemble.seed, static_cast<std::uint64_t>(i)));
        StepWorkspace ws;
        double trace_err = 0.0;
        double c0_max = 0.0;
        double td = prop.run(
            rng,
            [&](int j, const EffectiveState& st) {
                layout.evaluate(prop.system(), st.rho, &values[static_cast<size_t>(j) * n_ch]);
                weights[j] = weighted ? std::exp(st.c0) : Complex(1.0, 0.0);
                active[j] = drift_gauge_active(st.rho, s.system, s.gauge_policy).active;
                trace_err = std::max(trace_err, std::abs(st.rho.trace() - 1.0));
                c0_max = std::max(c0_max, std::abs(st.c0));
            },
            ws);
        ++out.total;
        if (td >= 0.0) {
            ++out.omitted;
            out.omitted_list.push_back({i, td});
            continue;
        }
        ++out.completed;
        out.max_trace_error = std::max(out.max_trace_error, trace_err);
        out.max_abs_c0 = std::max(out.max_abs_c0, c0_max);
        for (int j = 0; j < n_times; ++j) {
            out.moments.add(j, weights[j], &values[static_cast<size_t>(j) * n_ch],
                            active[j] != 0);
        }
    }
}

}  // namespace

EnsembleResult run_ensemble_range(const Scenario& s, long long first, long long count,
                                  const EnsembleOptions& opt)
{
    if (count < 1) throw ValidationError("at least one trajectory required");
    Propagator prop(s);
    ChannelLayout layout(s);
    const auto shift = channel_shift(prop, layout);
    EnsembleResult total = empty_result(s, prop, layout, shift);

    const long long chunk = std::max<long long>(opt.chunk, 1);
    const long long n_chunks = (count + chunk - 1) / chunk;
    int threads = opt.threads > 0 ? opt.threads : default_thread_count();
    threads = static_cast<int>(std::min<long long>(threads, n_chunks));

    auto chunk_range = [&](long long c) {
        long long b = first + c * chunk;
        long long n = std::min(chunk, first + count - b);
        return std::pair{b, n};
    };

    if (threads <= 1) {
        for (long long c = 0; c < n_chunks; ++c) {
            auto [b, n] = chunk_range(c);
            EnsembleResult part = empty_result(s, prop, layout, shift);
            run_batch(prop, layout, b, n, part);
            total.merge(part);
        }
    } else {
        // Chunks finish in any order; they are merged strictly in chunk order
        // so the result does not depend on scheduling.
        std::atomic<long long> next{0};
        std::mutex mu;
        std::map<long long, EnsembleResult> pending;
        long long next_merge = 0;
        std::exception_ptr error;
        auto worker = [&] {
            try {
                for (;;) {
                    long long c = next.fetch_add(1);
                    if (c >= n_chunks) return;
                    auto [b, n] = chunk_range(c);
                    EnsembleResult part = empty_result(s, prop, layout, shift);
                    run_batch(prop, layout, b, n, part);
                    std::lock_guard<std::mutex> lock(mu);
                    pending.emplace(c, std::move(part));
                    for (auto it = pending.find(next_merge); it != pending.end();
                         it = pending.find(next_merge)) {
                        total.merge(it->second);
                        pending.erase(it);
                        ++next_merge;
                    }
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next.store(n_chunks);
            }
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    if (opt.enforce_cap) check_omitted_cap(total, s);
    return total;
}

EnsembleResult run_ensemble(const Scenario& s, const EnsembleOptions& opt)
{
    return run_ensemble_range(s, 0, s.ensemble.trajectories, opt);
}

void check_omitted_cap(const EnsembleResult& r, const Scenario& s)
{
    if (r.omitted_fraction() > s.ensemble.max_omitted_fraction) {
        throw DivergenceCapError(
            std::to_string(r.omitted) + " of " + std::to_string(r.total)
            + " trajectories diverged, above the allowed fraction "
            + std::to_string(s.ensemble.max_omitted_fraction));
    }
}

}  // namespace sfs
