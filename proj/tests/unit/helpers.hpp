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


// Shared fixtures for the unit suites. Everything in here is written
// against plain Eigen so the checks do not lean on the code under test.
#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "sfs/config.hpp"
#include "sfs/model.hpp"

namespace sfs::test {

inline Scenario from_toml(const std::string& text)
{
    return parse_scenario(text, "<test>");
}

inline std::string scenario_path(const std::string& name)
{
    return std::string(SFS_SCENARIO_DIR) + "/" + name;
}

// Two-level emitters with |d| along x; initial populations given.
inline Scenario two_level(int n, double p_excited, double t_end = 2.0, int points = 41)
{
    std::string text = R"(
[levels.1]
manifold = "ground"
[levels.2]
manifold = "excited"
[system]
n_atoms = )" + std::to_string(n) + R"(
gamma = 1.0
[dipoles]
"2-1" = [1.0, 0.0]
[initial]
"1,1" = )" + std::to_string(1.0 - p_excited) + R"(
"2,2" = )" + std::to_string(p_excited) + R"(
[grid]
t_end = )" + std::to_string(t_end) + R"(
points = )" + std::to_string(points) + R"(
[ensemble]
trajectories = 256
seed = 11
)";
    return from_toml(text);
}

// Three-level system with complex, two-component dipoles so both
// polarisation axes and complex phases are exercised.
inline Scenario v_system(int n)
{
    std::string text = R"(
[levels.1]
manifold = "ground"
[levels.2]
manifold = "excited"
[levels.3]
manifold = "excited"
detuning = 1.5
[system]
n_atoms = )" + std::to_string(n) + R"(
gamma = 0.7
[dipoles]
"2-1" = [(0.6, 0.2), (0.1, -0.5)]
"3-1" = [(-0.3, 0.0), (0.0, 0.8)]
[initial]
"2,2" = 0.6
"3,3" = 0.4
[grid]
t_end = 1.0
points = 11
)";
    return from_toml(text);
}

inline Scenario lambda_system(int n)
{
    std::string text = R"(
[levels.1]
manifold = "ground"
[levels.2]
manifold = "ground"
detuning = -0.8
[levels.3]
manifold = "excited"
[system]
n_atoms = )" + std::to_string(n) + R"(
gamma = 1.3
[dipoles]
"3-1" = [(0.7, 0.1), (0.0, 0.4)]
"3-2" = [(0.2, -0.6), (0.5, 0.0)]
[initial]
"3,3" = 1.0
[grid]
t_end = 1.0
points = 11
)";
    return from_toml(text);
}

// Random density matrix: W W^dagger / tr.
inline Eigen::MatrixXcd random_density(int m, std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Eigen::MatrixXcd w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = {n(rng), n(rng)};
    Eigen::MatrixXcd r = w * w.adjoint();
    return r / r.trace();
}

inline Eigen::MatrixXcd random_matrix(int m, std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Eigen::MatrixXcd w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = {n(rng), n(rng)};
    return w;
}

// Basis index sum_a digit_a M^a: atom 0 is the fastest digit, i.e. the
// rightmost Kronecker factor.
inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& left, const Eigen::MatrixXcd& right)
{
    return Eigen::kroneckerProduct(left, right).eval();
}

// Reduced state of atom 0 from an N-atom operator.
inline Eigen::MatrixXcd reduce_to_atom0(const Eigen::MatrixXcd& rho, int m)
{
    const Eigen::Index rest = rho.rows() / m;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (Eigen::Index k = 0; k < rest; ++k) out(p, q) += rho(k * m + p, k * m + q);
    return out;
}

// Single-atom lowering operator along one axis: sum conj(d_eg) |g><e|.
inline Eigen::MatrixXcd lowering(const LevelSystem& sys, int axis)
{
    const int m = sys.size();
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(m, m);
    for (const auto& d : sys.dipoles) l(d.lower, d.upper) += std::conj(d.d[axis]);
    return l;
}

inline double max_abs(const Eigen::MatrixXcd& a)
{
    return a.cwiseAbs().maxCoeff();
}


// Operator acting as `op` on one atom of an N-atom register.
inline Eigen::MatrixXcd on_atom(const Eigen::MatrixXcd& op, int n_atoms, int atom)
{
    const int m = static_cast<int>(op.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int a = n_atoms - 1; a >= 0; --a)
        out = kron(out, a == atom ? op : Eigen::MatrixXcd::Identity(m, m).eval());
    return out;
}

inline Eigen::MatrixXcd unit(int m, int p, int q)
{
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(m, m);
    u(p, q) = 1.0;
    return u;
}

inline Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& l, const Eigen::MatrixXcd& rho)
{
    const Eigen::MatrixXcd ll = l.adjoint() * l;
    return l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
}

// Right-hand side of the N-atom master equation, written directly from the
// operator form: free levels, collective emission along each axis, a
// classical drive and local jump channels.
inline Eigen::MatrixXcd master_rhs(const Scenario& s, const Eigen::MatrixXcd& rho, double t)
{
    const auto& sys = s.system;
    const int m = sys.size();
    const int n = s.n_atoms;
    const Eigen::Index dim = rho.rows();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < n; ++a) {
        Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(m, m);
        for (int p = 0; p < m; ++p) h0(p, p) = sys.detuning[p];
        h += on_atom(h0, n, a);
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int axis = 0; axis < 2; ++axis) {
        Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(dim, dim);
        for (int a = 0; a < n; ++a) lower += on_atom(lowering(sys, axis), n, a);
        out += s.gamma * dissipator(lower, rho);
        if (s.field.enabled) {
            const Complex e = s.field.plus(t)[axis];
            h -= e * lower.adjoint() + std::conj(e) * lower;
        }
    }
    out += Complex{0.0, -1.0} * (h * rho - rho * h);
    for (const auto& c : s.channels.presets) {
        const double k = c.rate(t);
        Eigen::MatrixXcd jump;
        if (c.kind == ChannelKind::dephase) jump = unit(m, c.level, c.level);
        else jump = unit(m, c.to, c.from);
        for (int a = 0; a < n; ++a) out += k * dissipator(on_atom(jump, n, a), rho);
    }
    return out;
}

inline Eigen::MatrixXcd power_product(const Eigen::MatrixXcd& rho, int n)
{
    Eigen::MatrixXcd out = rho;
    for (int a = 1; a < n; ++a) out = kron(rho, out);
    return out;
}

}  // namespace sfs::test
