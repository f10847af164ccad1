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

#include "sfs/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sfs {

std::string_view to_string(Manifold m)
{
    switch (m) {
    case Manifold::ground: return "ground";
    case Manifold::excited: return "excited";
    case Manifold::spectator: return "spectator";
    }
    return "?";
}

std::string_view to_string(RateProfile::Shape s)
{
    return s == RateProfile::Shape::constant ? "constant" : "gaussian";
}

std::string_view to_string(ChannelKind k)
{
    switch (k) {
    case ChannelKind::pump: return "pump";
    case ChannelKind::decay: return "decay";
    case ChannelKind::dephase: return "dephase";
    case ChannelKind::generic: return "rate";
    }
    return "?";
}

std::string_view to_string(GaugePolicy g)
{
    switch (g) {
    case GaugePolicy::adaptive: return "adaptive";
    case GaugePolicy::always_on: return "on";
    case GaugePolicy::off: return "off";
    }
    return "?";
}

std::string_view to_string(WeightMode w)
{
    return w == WeightMode::weighted ? "on" : "off";
}

std::optional<GaugePolicy> parse_gauge_policy(std::string_view s)
{
    if (s == "adaptive") return GaugePolicy::adaptive;
    if (s == "on" || s == "always_on") return GaugePolicy::always_on;
    if (s == "off") return GaugePolicy::off;
    return std::nullopt;
}

std::optional<WeightMode> parse_weight_mode(std::string_view s)
{
    if (s == "on" || s == "weighted") return WeightMode::weighted;
    if (s == "off" || s == "unweighted") return WeightMode::unweighted;
    return std::nullopt;
}

//---------------------------------------------------------------------------//

int LevelSystem::find(std::string_view label) const
{
    for (int i = 0; i < size(); ++i) {
        if (labels[i] == label) return i;
    }
    return -1;
}

int LevelSystem::index_of(std::string_view label) const
{
    int i = find(label);
    if (i < 0) {
        throw ValidationError("unknown level label '" + std::string(label) + "'");
    }
    return i;
}

int LevelSystem::add_level(std::string label, Manifold m, double omega)
{
    labels.push_back(std::move(label));
    manifold.push_back(m);
    detuning.push_back(omega);
    return size() - 1;
}

void LevelSystem::set_dipole(int upper, int lower, AxisVector d)
{
    for (auto& dp : dipoles) {
        if (dp.upper == upper && dp.lower == lower) {
            dp.d = d;
            return;
        }
    }
    dipoles.push_back({upper, lower, d});
}

AxisVector LevelSystem::d_excited_ground(int p, int r) const
{
    if (!is_excited(p) || !is_ground(r)) return {};
    for (const auto& dp : dipoles) {
        if (dp.upper == p && dp.lower == r) return dp.d;
    }
    return {};
}

AxisVector LevelSystem::d_ground_excited(int p, int r) const
{
    if (!is_ground(p) || !is_excited(r)) return {};
    for (const auto& dp : dipoles) {
        if (dp.upper == r && dp.lower == p) return sfs::conj(dp.d);
    }
    return {};
}

int LevelSystem::optical_levels() const
{
    int n = 0;
    for (auto m : manifold) {
        if (m != Manifold::spectator) ++n;
    }
    return n;
}

//---------------------------------------------------------------------------//

RateProfile RateProfile::constant(double value)
{
    RateProfile r;
    r.shape = Shape::constant;
    r.amplitude = value;
    return r;
}

RateProfile RateProfile::gaussian(double amplitude, double center, double width)
{
    RateProfile r;
    r.shape = Shape::gaussian;
    r.amplitude = amplitude;
    r.center = center;
    r.width = width;
    return r;
}

double RateProfile::operator()(double t) const
{
    if (shape == Shape::constant) return amplitude;
    double x = (t - center) / width;
    return amplitude * std::exp(-0.5 * x * x)
           / std::sqrt(2.0 * std::numbers::pi * width * width);
}

std::vector<RateEntry> IncoherentChannels::expand() const
{
    std::vector<RateEntry> out;
    out.reserve(presets.size());
    for (const auto& c : presets) {
        switch (c.kind) {
        case ChannelKind::pump:
        case ChannelKind::decay:
            out.push_back({c.to, c.from, c.to, c.from, c.rate});
            break;
        case ChannelKind::dephase:
            out.push_back({c.level, c.level, c.level, c.level, c.rate});
            break;
        case ChannelKind::generic:
            out.push_back({c.indices[0], c.indices[1], c.indices[2],
                           c.indices[3], c.rate});
            break;
        }
    }
    return out;
}

ChannelPreset&
IncoherentChannels::pump(std::string name, int from, int to, RateProfile kappa)
{
    ChannelPreset c;
    c.name = std::move(name);
    c.kind = ChannelKind::pump;
    c.from = from;
    c.to = to;
    c.rate = kappa;
    presets.push_back(c);
    return presets.back();
}

ChannelPreset&
IncoherentChannels::decay(std::string name, int from, int to, RateProfile rate)
{
    ChannelPreset& c = pump(std::move(name), from, to, rate);
    c.kind = ChannelKind::decay;
    return c;
}

ChannelPreset&
IncoherentChannels::dephase(std::string name, int level, RateProfile rate)
{
    ChannelPreset c;
    c.name = std::move(name);
    c.kind = ChannelKind::dephase;
    c.level = level;
    c.rate = rate;
    presets.push_back(c);
    return presets.back();
}

AxisVector FieldDrive::plus(double t) const
{
    if (!enabled) return {};
    double e = envelope(t);
    return {amplitude[0] * e, amplitude[1] * e};
}

std::vector<double> TimeGrid::times() const
{
    std::vector<double> t(points > 0 ? points : 0);
    if (points == 1) {
        t[0] = t_start;
        return t;
    }
    for (int i = 0; i < points; ++i) {
        t[i] = t_start + (t_end - t_start) * i / (points - 1);
    }
    if (points > 1) t.back() = t_end;
    return t;
}

double Scenario::step_cap() const
{
    if (grid.step_cap > 0.0) return grid.step_cap;
    double span = grid.t_end;
    return system.optical_levels() <= 2 ? span / 1e4 : span / 1e3;
}

//---------------------------------------------------------------------------//

namespace {

std::string level_name(const LevelSystem& sys, int i)
{
    if (i >= 0 && i < sys.size()) return sys.labels[i];
    return "#" + std::to_string(i);
}

void check_rate(const RateProfile& r, const std::vector<double>& times,
                const std::string& where, std::vector<Violation>& out)
{
    if (!std::isfinite(r.amplitude) || !std::isfinite(r.center)
        || !std::isfinite(r.width)) {
        out.push_back({where, "non-finite rate parameter"});
        return;
    }
    if (r.shape == RateProfile::Shape::gaussian && !(r.width > 0.0)) {
        out.push_back({where, "gaussian width must be positive"});
        return;
    }
    for (double t : times) {
        if (r(t) < 0.0) {
            out.push_back({where, "negative rate"});
            return;
        }
    }
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s)
{
    std::vector<Violation> out;
    const auto& sys = s.system;
    const int m = sys.size();

    if (m < 1) out.push_back({"levels", "at least one level required"});
    if (m > kMaxLevels) {
        out.push_back({"levels", "at most " + std::to_string(kMaxLevels)
                                     + " levels supported"});
    }
    if (static_cast<int>(sys.manifold.size()) != m
        || static_cast<int>(sys.detuning.size()) != m) {
        out.push_back({"levels", "inconsistent level tables"});
        return out;
    }
    for (int i = 0; i < m; ++i) {
        if (!std::isfinite(sys.detuning[i])) {
            out.push_back({"levels." + sys.labels[i] + ".detuning",
                           "non-finite detuning"});
        }
        for (int j = 0; j < i; ++j) {
            if (sys.labels[i] == sys.labels[j]) {
                out.push_back({"levels." + sys.labels[i], "duplicate label"});
            }
        }
    }
    for (const auto& dp : sys.dipoles) {
        std::string where = "dipoles." + level_name(sys, dp.upper) + "-"
                            + level_name(sys, dp.lower);
        if (dp.upper < 0 || dp.upper >= m || dp.lower < 0 || dp.lower >= m) {
            out.push_back({where, "unknown level"});
            continue;
        }
        if (sys.manifold[dp.upper] == Manifold::spectator
            || sys.manifold[dp.lower] == Manifold::spectator) {
            out.push_back({where, "spectator levels cannot carry dipoles"});
        }
        if (!sys.is_excited(dp.upper) || !sys.is_ground(dp.lower)) {
            out.push_back({where, "dipole on non-(e,g) pair"});
        }
        for (auto c : dp.d) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                out.push_back({where, "non-finite dipole component"});
            }
        }
    }

    if (s.n_atoms < 1) out.push_back({"system.n_atoms", "N must be >= 1"});
    if (!(s.gamma > 0.0) || !std::isfinite(s.gamma)) {
        out.push_back({"system.gamma", "gamma must be positive"});
    }

    if (s.initial.rows() != m || s.initial.cols() != m) {
        out.push_back({"initial", "matrix size does not match level count"});
    } else if (m >= 1) {
        Complex tr = s.initial.trace();
        if (std::abs(tr - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "trace must be 1 (got " << tr.real() << ")";
            out.push_back({"initial", msg.str()});
        }
        double herm = (s.initial - s.initial.adjoint()).cwiseAbs().maxCoeff();
        if (herm > 1e-12) {
            out.push_back({"initial", "matrix is not Hermitian"});
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.initial);
            if (es.eigenvalues().minCoeff() < -1e-12) {
                out.push_back({"initial", "matrix is not positive semidefinite"});
            }
        }
    }

    const auto& g = s.grid;
    if (!(g.t_end > g.t_start) || g.points < 2) {
        out.push_back({"grid", "grid must be strictly increasing with >= 2 points"});
    }
    if (g.step_cap < 0.0) out.push_back({"grid.step_cap", "negative step cap"});
    if (!(g.rtol > 0.0) || !(g.atol > 0.0)) {
        out.push_back({"grid", "tolerances must be positive"});
    }

    auto times = g.points >= 2 && g.t_end > g.t_start ? g.times()
                                                      : std::vector<double>{};
    for (const auto& c : s.channels.presets) {
        std::string where = "channels." + c.name;
        auto bad = [&](int i) { return i < 0 || i >= m; };
        bool idx_bad = false;
        switch (c.kind) {
        case ChannelKind::pump:
        case ChannelKind::decay: idx_bad = bad(c.from) || bad(c.to); break;
        case ChannelKind::dephase: idx_bad = bad(c.level); break;
        case ChannelKind::generic:
            for (int i : c.indices) idx_bad = idx_bad || bad(i);
            break;
        }
        if (idx_bad) out.push_back({where, "unknown level"});
        check_rate(c.rate, times, where, out);
    }

    if (s.field.enabled) {
        check_rate(s.field.envelope, times, "field", out);
    }

    if (s.ensemble.trajectories < 1) {
        out.push_back({"ensemble.trajectories", "at least one trajectory required"});
    }
    if (!(s.ensemble.divergence_threshold > 0.0)) {
        out.push_back({"ensemble.divergence_threshold", "must be positive"});
    }
    if (!(s.ensemble.max_omitted_fraction >= 0.0)
        || s.ensemble.max_omitted_fraction > 1.0) {
        out.push_back({"ensemble.max_omitted_fraction", "must lie in [0, 1]"});
    }
    return out;
}

void require_valid(const Scenario& s)
{
    auto v = validate_scenario(s);
    if (v.empty()) return;
    std::string msg = "invalid scenario '" + s.name + "':";
    for (const auto& x : v) msg += "\n  " + x.to_string();
    throw ValidationError(msg);
}

}  // namespace sfs
