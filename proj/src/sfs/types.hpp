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

#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sfs {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Upper bound on the number of single-emitter levels handled by the
/// stochastic propagator. Keeps every per-trajectory matrix on the stack.
inline constexpr int kMaxLevels = 8;

/// Transverse field polarization axes (x, y).
inline constexpr int kAxes = 2;

using AxisVector = std::array<Complex, kAxes>;
using AxisReal = std::array<double, kAxes>;

/// Single-emitter matrix, bounded size, no heap allocation.
using LevelMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::ColMajor, kMaxLevels, kMaxLevels>;

inline double dot_real(const AxisReal& a, const AxisReal& b)
{
    return a[0] * b[0] + a[1] * b[1];
}

/// Bilinear (non-conjugating) contraction over polarization axes.
inline Complex dot(const AxisVector& a, const AxisVector& b)
{
    return a[0] * b[0] + a[1] * b[1];
}

inline AxisVector conj(const AxisVector& a)
{
    return {std::conj(a[0]), std::conj(a[1])};
}

/// Malformed configuration text.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A scenario that violates one of its invariants.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Too many trajectories were dropped for the ensemble to be trusted.
class DivergenceCapError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// No exact reference can be computed for the requested scenario.
class OracleInapplicableError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace sfs
