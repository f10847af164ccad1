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

// Run-description files: a small TOML-like format.
//
//   [system]            name, n_atoms, gamma
//   [levels.<label>]    manifold = "ground" | "excited" | "spectator", detuning
//   [dipoles]           "<excited>-<ground>" = [(re, im), (re, im)]   # x, y
//   [initial]           "<p>,<q>" = number | (re, im)
//   [channels.<name>]   kind = "pump" | "decay" | "dephase" | "rate", ...
//   [field]             x, y = (re, im); profile, amplitude, center, width
//   [grid]              t_start, t_end, points, step_cap, rtol, atol
//   [ensemble]          trajectories, seed, divergence_threshold,
//                       max_omitted_fraction
//   [gauge]             policy = "adaptive" | "on" | "off", weight = "on" | "off"
//   [oracle]            max_dimension
//
// Levels are ordered as their sections appear. Lines starting with '#' are
// comments.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "sfs/model.hpp"

namespace sfs {

/// Parses a run description. Throws ParseError on malformed text and
/// ValidationError on unknown level labels; does not run validate_scenario.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<string>");

/// Reads, parses and validates a run description file.
Scenario load_scenario(const std::string& path);

/// Canonical text form; parse_scenario(save_text(s)) reproduces s exactly.
std::string save_text(const Scenario& s);

void save_scenario(const Scenario& s, const std::string& path);

/// FNV-1a digest of the canonical text, as 16 hex digits.
std::string config_hash(const Scenario& s);

}  // namespace sfs
