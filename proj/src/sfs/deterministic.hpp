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

// Deterministic part of the single-emitter equations of motion.
//
// Two evaluation routes live here. The free functions evaluate every term by
// direct index loops over the level labels and are meant as a readable
// reference. BlochSystem compiles the same scenario into sparse coefficient
// lists and is what the integrator calls in its inner loop.

#pragma once

#include <vector>

#include "sfs/model.hpp"

namespace sfs {

/// One trajectory: the (generally non-Hermitian) single-emitter matrix and
/// the weight exponent C0, with Omega = exp(C0).
struct EffectiveState {
    LevelMatrix rho;
    Complex c0{};
    double t = 0.0;
};

/// Field amplitudes D^(+) and D^(-) seen by one emitter, per axis.
struct FieldPair {
    AxisVector plus{};
    AxisVector minus{};
};

/// Dense Gamma_pqrs(t), flat index ((p*M + q)*M + r)*M + s.
std::vector<double> rate_tensor(const Scenario& s, double t);

/// Incoming field plus the field radiated by the other N-1 emitters. With
/// `hermitized`, the dipole sums are replaced by their Hermitian parts so
/// that minus == conj(plus).
FieldPair assemble_fields(const EffectiveState& state, const Scenario& s,
                          bool hermitized);

/// Sum of free evolution, incoherent channels, single-emitter collective
/// damping and field coupling, evaluated at state.t.
LevelMatrix bloch_rhs(const EffectiveState& state, const FieldPair& fields,
                      const Scenario& s);

LevelMatrix free_term(const LevelMatrix& rho, const LevelSystem& sys);
LevelMatrix incoherent_term(const LevelMatrix& rho, const std::vector<double>& rates);
LevelMatrix collective_term(const LevelMatrix& rho, const LevelSystem& sys,
                            double gamma);
LevelMatrix field_term(const LevelMatrix& rho, const FieldPair& fields,
                       const LevelSystem& sys);

//---------------------------------------------------------------------------//

/// Precompiled right-hand side for one scenario.
class BlochSystem {
  public:
    /// A dipole-allowed transition e -> g with d = d_eg.
    struct Link {
        int e = 0;
        int g = 0;
        AxisVector d{};
    };

    explicit BlochSystem(const Scenario& s);

    int dim() const { return dim_; }
    int n_atoms() const { return n_atoms_; }
    double gamma() const { return gamma_; }
    const std::vector<Link>& links() const { return links_; }

    /// Axes along which at least one dipole has a nonzero component.
    const std::array<bool, kAxes>& active_axes() const { return active_axes_; }

    /// P^(+) = sum d_ge rho_eg and P^(-) = sum d_eg rho_ge.
    template<class Mat>
    AxisVector dipole_plus(const Mat& rho) const;
    template<class Mat>
    AxisVector dipole_minus(const Mat& rho) const;

    template<class Mat>
    FieldPair fields(const Mat& rho, double t, bool hermitized) const;

    /// Accepts LevelMatrix or any fixed-size column-major complex matrix.
    template<class Mat>
    void rhs(const Mat& rho, double t, bool hermitized, Mat& out) const
    {
        rhs(rho, fields(rho, t, hermitized), t, out);
    }
    template<class Mat>
    void rhs(const Mat& rho, const FieldPair& f, double t, Mat& out) const;

  private:
    struct Term {
        int out = 0;  // column-major flat index into the derivative
        int in = 0;   // column-major flat index into rho
        Complex c;
    };
    struct TimedTerms {
        RateProfile rate;
        std::vector<Term> terms;
    };

    int dim_ = 0;
    int n_atoms_ = 1;
    double gamma_ = 1.0;
    FieldDrive drive_;
    std::vector<Link> links_;
    std::array<bool, kAxes> active_axes_{};
    std::vector<Term> static_terms_;
    std::vector<TimedTerms> timed_;
};

//---------------------------------------------------------------------------//

template<class Mat>
AxisVector BlochSystem::dipole_plus(const Mat& rho) const
{
    AxisVector p{};
    for (const auto& l : links_) {
        const Complex r = rho(l.e, l.g);
        p[0] += std::conj(l.d[0]) * r;
        p[1] += std::conj(l.d[1]) * r;
    }
    return p;
}

template<class Mat>
AxisVector BlochSystem::dipole_minus(const Mat& rho) const
{
    AxisVector p{};
    for (const auto& l : links_) {
        const Complex r = rho(l.g, l.e);
        p[0] += l.d[0] * r;
        p[1] += l.d[1] * r;
    }
    return p;
}

template<class Mat>
FieldPair BlochSystem::fields(const Mat& rho, double t, bool hermitized) const
{
    AxisVector pp = dipole_plus(rho);
    AxisVector pm = dipole_minus(rho);
    if (hermitized) {
        for (int a = 0; a < kAxes; ++a) {
            const Complex hp = 0.5 * (pp[a] + std::conj(pm[a]));
            const Complex hm = 0.5 * (pm[a] + std::conj(pp[a]));
            pp[a] = hp;
            pm[a] = hm;
        }
    }
    const AxisVector in = drive_.plus(t);
    const double k = 0.5 * gamma_ * (n_atoms_ - 1);
    FieldPair f;
    for (int a = 0; a < kAxes; ++a) {
        f.plus[a] = in[a] + kI * k * pp[a];
        f.minus[a] = std::conj(in[a]) - kI * k * pm[a];
    }
    return f;
}

template<class Mat>
void BlochSystem::rhs(const Mat& rho, const FieldPair& f, double t, Mat& out) const
{
    const int m = dim_;
    out.setZero(m, m);
    const Complex* in = rho.data();
    Complex* o = out.data();
    for (const auto& term : static_terms_) o[term.out] += term.c * in[term.in];
    for (const auto& tt : timed_) {
        const double k = tt.rate(t);
        if (k == 0.0) continue;
        for (const auto& term : tt.terms) o[term.out] += (k * term.c) * in[term.in];
    }
    // i D+ . (Dm rho - rho Dm) + i D- . (Dp rho - rho Dp), with Dm carrying
    // d_eg at (e, g) and Dp carrying d_ge at (g, e).
    for (const auto& l : links_) {
        const Complex cm = kI * (f.plus[0] * l.d[0] + f.plus[1] * l.d[1]);
        const Complex cp =
            kI * (f.minus[0] * std::conj(l.d[0]) + f.minus[1] * std::conj(l.d[1]));
        for (int q = 0; q < m; ++q) {
            out(l.e, q) += cm * rho(l.g, q);
            out(l.g, q) += cp * rho(l.e, q);
        }
        for (int p = 0; p < m; ++p) {
            out(p, l.g) -= cm * rho(p, l.e);
            out(p, l.e) -= cp * rho(p, l.g);
        }
    }
}

}  // namespace sfs
