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

// Scenario description: level structure, rates, drive, grid and run policy.
//
// Units: gamma = 1 sets the time unit unless configured otherwise. hbar and
// epsilon_0 are absorbed, so dipoles are dimensionless weights and a single
// isolated emitter on a transition with dipole d decays at gamma * |d|^2.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfs/types.hpp"

namespace sfs {

enum class Manifold { ground, excited, spectator };

std::string_view to_string(Manifold m);

/// Dipole matrix element d_eg between an excited and a ground level.
/// The conjugate element d_ge is implied.
struct Dipole {
    int upper = 0;  ///< level index expected to be excited
    int lower = 0;  ///< level index expected to be ground
    AxisVector d{};
};

struct LevelSystem {
    std::vector<std::string> labels;
    std::vector<Manifold> manifold;
    std::vector<double> detuning;
    std::vector<Dipole> dipoles;

    int size() const { return static_cast<int>(labels.size()); }

    /// Index of a level label, or -1.
    int find(std::string_view label) const;

    /// Index of a level label; throws ValidationError when unknown.
    int index_of(std::string_view label) const;

    int add_level(std::string label, Manifold m, double detuning = 0.0);
    void set_dipole(int upper, int lower, AxisVector d);

    bool is_excited(int p) const { return manifold[p] == Manifold::excited; }
    bool is_ground(int p) const { return manifold[p] == Manifold::ground; }

    /// d_{p>r}: the d_eg element when p is excited and r ground, else zero.
    AxisVector d_excited_ground(int p, int r) const;
    /// d_{p<r}: the d_ge element (conjugate of d_rp) when p is ground and r
    /// excited, else zero.
    AxisVector d_ground_excited(int p, int r) const;

    /// Number of levels that take part in the optical transition.
    int optical_levels() const;
};

/// Named analytic rate or envelope profile.
struct RateProfile {
    enum class Shape { constant, gaussian };

    Shape shape = Shape::constant;
    double amplitude = 0.0;
    double center = 0.0;
    double width = 1.0;

    static RateProfile constant(double value);
    /// amplitude * exp(-(t - center)^2 / (2 width^2)) / sqrt(2 pi width^2)
    static RateProfile gaussian(double amplitude, double center, double width);

    double operator()(double t) const;
    bool operator==(const RateProfile&) const = default;
};

std::string_view to_string(RateProfile::Shape s);

/// One entry of the incoherent rate tensor Gamma_pqrs(t).
struct RateEntry {
    int p = 0, q = 0, r = 0, s = 0;
    RateProfile rate;
};

enum class ChannelKind { pump, decay, dephase, generic };

std::string_view to_string(ChannelKind k);

/// A named incoherent process as written in a run description.
struct ChannelPreset {
    std::string name;
    ChannelKind kind = ChannelKind::decay;
    int from = 0;  ///< pump / decay source level
    int to = 0;    ///< pump / decay destination level
    int level = 0; ///< dephasing level
    std::array<int, 4> indices{};  ///< generic Gamma_pqrs indices
    RateProfile rate;
};

struct IncoherentChannels {
    std::vector<ChannelPreset> presets;

    /// Preset expansion into Gamma_pqrs entries. Pumps and decays are jump
    /// operators |to><from|, i.e. Gamma_{to,from,to,from}; dephasing of level
    /// l is Gamma_llll.
    std::vector<RateEntry> expand() const;

    ChannelPreset& pump(std::string name, int from, int to, RateProfile kappa);
    ChannelPreset& decay(std::string name, int from, int to, RateProfile rate);
    ChannelPreset& dephase(std::string name, int level, RateProfile rate);
};

/// Classical incoming field D_in^(+)(t) = amplitude * envelope(t).
struct FieldDrive {
    bool enabled = false;
    AxisVector amplitude{};
    RateProfile envelope = RateProfile::constant(1.0);

    AxisVector plus(double t) const;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int points = 101;
    double step_cap = 0.0;  ///< 0 selects the default cap
    double rtol = 1e-8;
    double atol = 1e-10;

    std::vector<double> times() const;
};

struct EnsembleConfig {
    long long trajectories = 1000;
    std::uint64_t seed = 1;
    double divergence_threshold = 1e3;
    double max_omitted_fraction = 0.05;
};

enum class GaugePolicy { adaptive, always_on, off };
enum class WeightMode { weighted, unweighted };

std::string_view to_string(GaugePolicy g);
std::string_view to_string(WeightMode w);
std::optional<GaugePolicy> parse_gauge_policy(std::string_view s);
std::optional<WeightMode> parse_weight_mode(std::string_view s);

struct OracleConfig {
    long long max_dimension = 100;
};

struct Scenario {
    std::string name = "scenario";
    LevelSystem system;
    int n_atoms = 1;
    double gamma = 1.0;
    Eigen::MatrixXcd initial;
    FieldDrive field;
    IncoherentChannels channels;
    TimeGrid grid;
    EnsembleConfig ensemble;
    GaugePolicy gauge_policy = GaugePolicy::adaptive;
    WeightMode weight_mode = WeightMode::weighted;
    OracleConfig oracle;

    /// Maximum noise step: explicit cap, otherwise T/1e4 for a single
    /// optical transition and T/1e3 for richer level schemes.
    double step_cap() const;
};

struct Violation {
    std::string location;
    std::string message;

    std::string to_string() const { return location + ": " + message; }
};

/// Checks every scenario invariant; an empty list means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

/// Throws ValidationError listing all violations.
void require_valid(const Scenario& s);

}  // namespace sfs
