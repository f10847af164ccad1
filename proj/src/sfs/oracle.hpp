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


// Exact references.
//
// The brute-force route builds the full N-emitter Liouvillian on the M^N
// dimensional Hilbert space (collective dissipator on the collective dipole
// operators, local channels and detunings on each emitter, the classical
// drive as a Hamiltonian term) and integrates the vectorized density matrix.
// The Dicke ladder covers collective decay of fully excited two-level
// emitters at any N.

#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "sfs/observables.hpp"

namespace sfs {

using DenseOperator = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<Complex>;

/// Embeds |p><q| of emitter `atom` into the product space.
SparseOperator embed_transition(int m, int n_atoms, int atom, int p, int q);

/// Collective P^(+) (lowering, weighted by d_ge) and P^(-) (its adjoint) for
/// one polarization axis.
SparseOperator collective_plus(const LevelSystem& sys, int n_atoms, int axis);
SparseOperator collective_minus(const LevelSystem& sys, int n_atoms, int axis);

/// d(vec rho)/dt = (L0 + sum_k c_k(t) L_k) vec rho, column-major vec.
class Liouvillian {
  public:
    /// Throws OracleInapplicableError when M^N exceeds the configured cap.
    explicit Liouvillian(const Scenario& s);

    int hilbert_dim() const { return dim_; }
    /// Superoperators up to this Hilbert dimension are held dense.
    static constexpr int kDenseLimit = 8;
    bool dense() const { return dim_ <= kDenseLimit; }

    void apply(double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const;
    DenseOperator apply(double t, const DenseOperator& rho) const;

    /// The assembled superoperator at time t, for inspection.
    SparseOperator matrix(double t) const;

  private:
    struct Timed {
        RateProfile profile;
        SparseOperator op;
        Eigen::MatrixXcd dense;
    };

    int dim_ = 0;
    SparseOperator static_;
    Eigen::MatrixXcd static_dense_;
    std::vector<Timed> timed_;
};

/// Product state rho0 (x) ... (x) rho0.
DenseOperator product_state(const Eigen::MatrixXcd& rho0, int n_atoms);

struct ExactEvolution {
    std::vector<double> times;
    std::vector<DenseOperator> states;
};

/// Integrates from the scenario's product initial state over its grid.
ExactEvolution evolve_exact(const Scenario& s);
/// Same, from an arbitrary N-emitter initial state.
ExactEvolution evolve_exact(const Scenario& s, const DenseOperator& initial);

/// Per-emitter expectations, averaged over emitters or emitter tuples.
Complex exact_population(const DenseOperator& rho, int m, int n_atoms, int level);
/// Tr[P^(-)_a P^(+)_a rho]; axis -1 sums both axes.
Complex exact_intensity(const DenseOperator& rho, const LevelSystem& sys, int n_atoms,
                        int axis);
/// Counterpart of <rho_pq rho_rs>: Tr[|q><p|_a |s><r|_b rho] over a != b.
Complex exact_pair(const DenseOperator& rho, int m, int n_atoms, int p, int q, int r,
                   int s);
/// Counterpart of <rho_12 rho_23 rho_31> over distinct emitter triples.
Complex exact_triple(const DenseOperator& rho, int m, int n_atoms, int l1, int l2, int l3);

/// Series with the same names as standard_observables.
std::vector<ObservableSeries> exact_observables(const Scenario& s, const ExactEvolution& ev,
                                                bool normalize_intensity);

//---------------------------------------------------------------------------//

/// Why the Dicke ladder does not apply, or empty when it does.
std::string ladder_inapplicable_reason(const Scenario& s);

struct LadderEvolution {
    std::vector<double> times;
    /// probabilities over m = -J..J, index m + J
    std::vector<std::vector<double>> p;
    std::vector<double> excited_fraction;
    /// sum_m (J+m)(J-m+1) p_m, i.e. <J+ J->
    std::vector<double> raising_lowering;
};

LadderEvolution dicke_ladder_evolve(int n_atoms, double rate, const std::vector<double>& times);

/// Populations and intensities from the ladder; throws
/// OracleInapplicableError outside its domain.
std::vector<ObservableSeries> ladder_observables(const Scenario& s, bool normalize_intensity);

//---------------------------------------------------------------------------//

enum class OracleKind { brute_force, dicke_ladder };

/// Brute force within the dimension cap, else the ladder when it applies,
/// else OracleInapplicableError suggesting the largest admissible N.
OracleKind select_oracle(const Scenario& s);

std::vector<ObservableSeries> exact_reference(const Scenario& s, bool normalize_intensity,
                                              OracleKind* used = nullptr);

}  // namespace sfs
