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


#include "sfs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "sfs/rk.hpp"

namespace sfs {
namespace {

using Triplet = Eigen::Triplet<Complex>;

// Tolerances of the reference integration; tighter than the trajectory
// defaults so that oracle error never competes with sampling error.
constexpr double kOracleRtol = 1e-10;
constexpr double kOracleAtol = 1e-12;

std::vector<int> powers(int m, int n_atoms)
{
    std::vector<int> pw(n_atoms + 1, 1);
    for (int a = 1; a <= n_atoms; ++a) pw[a] = pw[a - 1] * m;
    return pw;
}

int digit(int index, int m, int stride)
{
    return (index / stride) % m;
}

/// M^N, or -1 when it overflows the cap comparison.
long long hilbert_dimension(int m, int n_atoms, long long cap)
{
    long long d = 1;
    for (int a = 0; a < n_atoms; ++a) {
        d *= m;
        if (d > cap) return -1;
    }
    return d;
}

int largest_admissible_n(int m, long long cap)
{
    if (m <= 1) return 0;
    int n = 0;
    long long d = 1;
    while (d * m <= cap) {
        d *= m;
        ++n;
    }
    return n;
}

SparseOperator identity(int d)
{
    SparseOperator id(d, d);
    id.setIdentity();
    return id;
}

SparseOperator kron(const SparseOperator& a, const SparseOperator& b)
{
    SparseOperator out = Eigen::kroneckerProduct(a, b);
    return out;
}

/// rho -> f(rho) on one emitter, lifted to the product space as a
/// superoperator on column-major vec(rho).
template<class LocalMap>
void add_local(std::vector<Triplet>& out, int m, int n_atoms, LocalMap&& f)
{
    const auto pw = powers(m, n_atoms);
    const int d = pw[n_atoms];
    struct Term {
        int p, q, i, j;
        Complex c;
    };
    std::vector<Term> terms;
    LevelMatrix unit = LevelMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            unit(i, j) = 1.0;
            LevelMatrix img = f(unit);
            unit(i, j) = 0.0;
            for (int p = 0; p < m; ++p) {
                for (int q = 0; q < m; ++q) {
                    if (img(p, q) != Complex{}) terms.push_back({p, q, i, j, img(p, q)});
                }
            }
        }
    }
    for (int a = 0; a < n_atoms; ++a) {
        const int st = pw[a];
        for (int col = 0; col < d; ++col) {
            const int dj = digit(col, m, st);
            for (int row = 0; row < d; ++row) {
                const int di = digit(row, m, st);
                for (const auto& t : terms) {
                    if (t.i != di || t.j != dj) continue;
                    const int r2 = row + (t.p - di) * st;
                    const int c2 = col + (t.q - dj) * st;
                    out.emplace_back(r2 + c2 * d, row + col * d, t.c);
                }
            }
        }
    }
}

SparseOperator from_triplets(int n, const std::vector<Triplet>& t)
{
    SparseOperator op(n, n);
    op.setFromTriplets(t.begin(), t.end());
    op.prune(Complex{});
    return op;
}

/// Tr[X rho] for X a product of |to_k><from_k| on distinct emitters.
Complex site_product_expectation(const DenseOperator& rho, int m, int n_atoms,
                                 const std::vector<int>& sites,
                                 const std::vector<int>& from, const std::vector<int>& to)
{
    const auto pw = powers(m, n_atoms);
    const int d = pw[n_atoms];
    Complex acc{};
    for (int k = 0; k < d; ++k) {
        int i = k;
        bool ok = true;
        for (size_t s = 0; s < sites.size(); ++s) {
            const int st = pw[sites[s]];
            const int dk = digit(k, m, st);
            if (dk != from[s]) {
                ok = false;
                break;
            }
            i += (to[s] - dk) * st;
        }
        if (ok) acc += rho(k, i);
    }
    return acc;
}

std::array<int, 3> triple_levels(const LevelSystem& sys)
{
    int l1 = sys.find("1"), l2 = sys.find("2"), l3 = sys.find("3");
    if (l1 < 0 || l2 < 0 || l3 < 0) return {0, 1, 2};
    return {l1, l2, l3};
}

ObservableSeries exact_series(std::string name, const std::vector<double>& t,
                              std::vector<Complex> values)
{
    ObservableSeries s;
    s.name = std::move(name);
    s.t = t;
    s.mean = std::move(values);
    s.stderr_re.assign(t.size(), 0.0);
    s.stderr_im.assign(t.size(), 0.0);
    s.n_completed.assign(t.size(), 0);
    return s;
}

}  // namespace

SparseOperator embed_transition(int m, int n_atoms, int atom, int p, int q)
{
    const auto pw = powers(m, n_atoms);
    const int d = pw[n_atoms];
    const int st = pw[atom];
    std::vector<Triplet> t;
    for (int col = 0; col < d; ++col) {
        if (digit(col, m, st) != q) continue;
        t.emplace_back(col + (p - q) * st, col, 1.0);
    }
    return from_triplets(d, t);
}

SparseOperator collective_plus(const LevelSystem& sys, int n_atoms, int axis)
{
    const int m = sys.size();
    const int d = powers(m, n_atoms)[n_atoms];
    SparseOperator out(d, d);
    for (const auto& dp : sys.dipoles) {
        if (!sys.is_excited(dp.upper) || !sys.is_ground(dp.lower)) continue;
        const Complex w = std::conj(dp.d[axis]);
        if (w == Complex{}) continue;
        for (int a = 0; a < n_atoms; ++a) {
            out += w * embed_transition(m, n_atoms, a, dp.lower, dp.upper);
        }
    }
    return out;
}

SparseOperator collective_minus(const LevelSystem& sys, int n_atoms, int axis)
{
    SparseOperator out = collective_plus(sys, n_atoms, axis).adjoint();
    return out;
}

//---------------------------------------------------------------------------//

Liouvillian::Liouvillian(const Scenario& s)
{
    const int m = s.system.size();
    const int n = s.n_atoms;
    const long long cap = s.oracle.max_dimension;
    const long long d = hilbert_dimension(m, n, cap);
    if (d < 0) {
        throw OracleInapplicableError(
            "brute-force oracle needs " + std::to_string(m) + "^" + std::to_string(n)
            + " states, above the cap of " + std::to_string(cap) + "; use n_atoms <= "
            + std::to_string(largest_admissible_n(m, cap)));
    }
    dim_ = static_cast<int>(d);
    const int dd = dim_ * dim_;
    const auto& sys = s.system;

    // Local part: detunings and constant channels, then one unit-rate map
    // per time-dependent channel.
    std::vector<double> static_rates(static_cast<size_t>(m) * m * m * m, 0.0);
    auto rate_index = [m](const RateEntry& e) {
        return ((static_cast<size_t>(e.p) * m + e.q) * m + e.r) * m + e.s;
    };
    std::vector<Triplet> st;
    for (const auto& e : s.channels.expand()) {
        if (e.rate.shape == RateProfile::Shape::constant) {
            static_rates[rate_index(e)] += e.rate.amplitude;
            continue;
        }
        std::vector<double> unit(static_rates.size(), 0.0);
        unit[rate_index(e)] = 1.0;
        std::vector<Triplet> tt;
        add_local(tt, m, n, [&](const LevelMatrix& u) { return incoherent_term(u, unit); });
        timed_.push_back({e.rate, from_triplets(dd, tt), {}});
    }
    add_local(st, m, n, [&](const LevelMatrix& u) {
        LevelMatrix r = free_term(u, sys);
        r += incoherent_term(u, static_rates);
        return r;
    });
    static_ = from_triplets(dd, st);

    const SparseOperator id = identity(dim_);
    SparseOperator field(dd, dd);
    bool has_field = false;
    for (int a = 0; a < kAxes; ++a) {
        const SparseOperator pp = collective_plus(sys, n, a);
        if (pp.nonZeros() == 0) continue;
        const SparseOperator pm = collective_minus(sys, n, a);
        const SparseOperator mp = pm * pp;
        SparseOperator pmt = pm.transpose();
        SparseOperator mpt = mp.transpose();
        static_ += (0.5 * s.gamma)
                   * (2.0 * kron(pmt, pp) - kron(id, mp) - kron(mpt, id));
        if (s.field.enabled) {
            // -i[V, rho] with V = -(P^(-) D_in^(+) + P^(+) D_in^(-)).
            const Complex amp = s.field.amplitude[a];
            if (amp == Complex{}) continue;
            SparseOperator ppt = pp.transpose();
            field += (kI * amp) * (kron(id, pm) - kron(pmt, id));
            field += (kI * std::conj(amp)) * (kron(id, pp) - kron(ppt, id));
            has_field = true;
        }
    }
    if (has_field) timed_.push_back({s.field.envelope, field, {}});

    if (dense()) {
        static_dense_ = Eigen::MatrixXcd(static_);
        for (auto& t : timed_) t.dense = Eigen::MatrixXcd(t.op);
    }
}

void Liouvillian::apply(double t, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) const
{
    if (dense()) {
        out.noalias() = static_dense_ * v;
    } else {
        out.noalias() = static_ * v;
    }
    for (const auto& tt : timed_) {
        const double c = tt.profile(t);
        if (c == 0.0) continue;
        if (dense()) {
            out.noalias() += c * (tt.dense * v);
        } else {
            out.noalias() += c * (tt.op * v);
        }
    }
}

DenseOperator Liouvillian::apply(double t, const DenseOperator& rho) const
{
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
    Eigen::VectorXcd out(v.size());
    apply(t, v, out);
    return Eigen::Map<DenseOperator>(out.data(), dim_, dim_);
}

SparseOperator Liouvillian::matrix(double t) const
{
    SparseOperator out = static_;
    for (const auto& tt : timed_) {
        const double c = tt.profile(t);
        if (c != 0.0) out += c * tt.op;
    }
    return out;
}

DenseOperator product_state(const Eigen::MatrixXcd& rho0, int n_atoms)
{
    DenseOperator out = DenseOperator::Ones(1, 1);
    for (int a = 0; a < n_atoms; ++a) {
        // Emitter a is the a-th least significant digit.
        DenseOperator next = Eigen::kroneckerProduct(rho0, out);
        out = std::move(next);
    }
    return out;
}

ExactEvolution evolve_exact(const Scenario& s)
{
    // Report an exceeded cap before allocating the product state.
    if (hilbert_dimension(s.system.size(), s.n_atoms, s.oracle.max_dimension) < 0) {
        Liouvillian refuse(s);
    }
    return evolve_exact(s, product_state(s.initial, s.n_atoms));
}

ExactEvolution evolve_exact(const Scenario& s, const DenseOperator& initial)
{
    Liouvillian lv(s);
    const int d = lv.hilbert_dim();
    if (initial.rows() != d || initial.cols() != d) {
        throw ValidationError("initial state dimension does not match M^N");
    }
    ExactEvolution ev;
    ev.times = s.grid.times();
    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(initial.data(), initial.size());
    rk::Options opt;
    opt.rtol = kOracleRtol;
    opt.atol = kOracleAtol;
    opt.max_steps = 50'000'000;
    auto f = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
        lv.apply(t, y, dy);
    };
    double h = 0.0;
    for (size_t j = 0; j < ev.times.size(); ++j) {
        if (j > 0) {
            opt.initial_step = h;
            rk::Stats stats;
            rk::integrate<rk::DormandPrince54>(f, ev.times[j - 1], ev.times[j], v, opt, stats);
            h = stats.suggested_step;
        }
        ev.states.emplace_back(Eigen::Map<DenseOperator>(v.data(), d, d));
    }
    return ev;
}

Complex exact_population(const DenseOperator& rho, int m, int n_atoms, int level)
{
    Complex acc{};
    for (int a = 0; a < n_atoms; ++a) {
        acc += site_product_expectation(rho, m, n_atoms, {a}, {level}, {level});
    }
    return acc / static_cast<double>(n_atoms);
}

Complex exact_intensity(const DenseOperator& rho, const LevelSystem& sys, int n_atoms,
                        int axis)
{
    Complex total{};
    for (int a = 0; a < kAxes; ++a) {
        if (axis >= 0 && a != axis) continue;
        const SparseOperator pp = collective_plus(sys, n_atoms, a);
        if (pp.nonZeros() == 0) continue;
        const SparseOperator mp = collective_minus(sys, n_atoms, a) * pp;
        for (int k = 0; k < mp.outerSize(); ++k) {
            for (SparseOperator::InnerIterator it(mp, k); it; ++it) {
                total += it.value() * rho(it.col(), it.row());
            }
        }
    }
    return total;
}

Complex exact_pair(const DenseOperator& rho, int m, int n_atoms, int p, int q, int r,
                   int s)
{
    if (n_atoms < 2) throw ValidationError("pair correlator needs two emitters");
    Complex acc{};
    int count = 0;
    for (int a = 0; a < n_atoms; ++a) {
        for (int b = 0; b < n_atoms; ++b) {
            if (a == b) continue;
            acc += site_product_expectation(rho, m, n_atoms, {a, b}, {p, r}, {q, s});
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

Complex exact_triple(const DenseOperator& rho, int m, int n_atoms, int l1, int l2, int l3)
{
    if (n_atoms < 3) throw ValidationError("triple correlator needs three emitters");
    Complex acc{};
    int count = 0;
    for (int a = 0; a < n_atoms; ++a) {
        for (int b = 0; b < n_atoms; ++b) {
            for (int c = 0; c < n_atoms; ++c) {
                if (a == b || b == c || a == c) continue;
                acc += site_product_expectation(rho, m, n_atoms, {a, b, c}, {l1, l2, l3},
                                                {l2, l3, l1});
                ++count;
            }
        }
    }
    return acc / static_cast<double>(count);
}

std::vector<ObservableSeries> exact_observables(const Scenario& s, const ExactEvolution& ev,
                                                bool normalize_intensity)
{
    const int m = s.system.size();
    const int n = s.n_atoms;
    std::vector<ObservableSeries> out;
    for (int p = 0; p < m; ++p) {
        std::vector<Complex> v;
        for (const auto& rho : ev.states) v.push_back(exact_population(rho, m, n, p));
        out.push_back(exact_series("p_" + s.system.labels[p], ev.times, std::move(v)));
    }
    const char* names[] = {"I_x", "I_y", "I"};
    for (int a : {0, 1, -1}) {
        std::vector<Complex> v;
        for (const auto& rho : ev.states) v.push_back(exact_intensity(rho, s.system, n, a));
        out.push_back(exact_series(names[a < 0 ? 2 : a], ev.times, std::move(v)));
    }
    if (normalize_intensity) out.push_back(normalized_to_max(out.back(), "I_norm"));
    if (m >= 3 && n >= 3) {
        auto [l1, l2, l3] = triple_levels(s.system);
        std::vector<Complex> v;
        for (const auto& rho : ev.states) v.push_back(exact_triple(rho, m, n, l1, l2, l3));
        out.push_back(exact_series("triple", ev.times, std::move(v)));
    }
    return out;
}

//---------------------------------------------------------------------------//

std::string ladder_inapplicable_reason(const Scenario& s)
{
    const auto& sys = s.system;
    if (sys.size() != 2) return "the Dicke ladder needs exactly two levels";
    int e = -1, g = -1;
    for (int p = 0; p < 2; ++p) {
        if (sys.is_excited(p)) e = p;
        if (sys.is_ground(p)) g = p;
    }
    if (e < 0 || g < 0) return "the Dicke ladder needs one excited and one ground level";
    if (!s.channels.presets.empty()) return "the Dicke ladder admits no incoherent channels";
    if (s.field.enabled) return "the Dicke ladder admits no incoming field";
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const Complex want = (p == e && q == e) ? 1.0 : 0.0;
            if (std::abs(s.initial(p, q) - want) > 1e-14) {
                return "the Dicke ladder needs a fully excited initial state";
            }
        }
    }
    return {};
}

LadderEvolution dicke_ladder_evolve(int n_atoms, double rate, const std::vector<double>& times)
{
    if (n_atoms < 1) throw ValidationError("n_atoms must be positive");
    const int k_max = n_atoms;  // index k = m + J
    const double j = 0.5 * n_atoms;
    auto down = [&](int k) {    // (J+m)(J-m+1): rate out of index k, in units of `rate`
        const double mm = k - j;
        return (j + mm) * (j - mm + 1.0);
    };
    Eigen::VectorXd p = Eigen::VectorXd::Zero(k_max + 1);
    p[k_max] = 1.0;
    auto f = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy.resize(y.size());
        for (int k = 0; k <= k_max; ++k) {
            double v = -down(k) * y[k];
            if (k < k_max) v += down(k + 1) * y[k + 1];
            dy[k] = rate * v;
        }
    };
    rk::Options opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.max_steps = 50'000'000;

    LadderEvolution out;
    out.times = times;
    double h = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
        if (i > 0) {
            opt.initial_step = h;
            rk::Stats stats;
            rk::integrate<rk::DormandPrince54>(f, times[i - 1], times[i], p, opt, stats);
            h = stats.suggested_step;
        }
        std::vector<double> pk(p.data(), p.data() + p.size());
        double mean_m = 0.0, jj = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            mean_m += (k - j) * pk[k];
            jj += down(k) * pk[k];
        }
        out.p.push_back(std::move(pk));
        out.excited_fraction.push_back(0.5 + mean_m / n_atoms);
        out.raising_lowering.push_back(jj);
    }
    return out;
}

std::vector<ObservableSeries> ladder_observables(const Scenario& s, bool normalize_intensity)
{
    const std::string why = ladder_inapplicable_reason(s);
    if (!why.empty()) throw OracleInapplicableError(why);
    const auto& sys = s.system;
    const int e = sys.is_excited(0) ? 0 : 1;
    const int g = 1 - e;
    AxisVector d{};
    for (const auto& dp : sys.dipoles) {
        if (dp.upper == e && dp.lower == g) d = dp.d;
    }
    const AxisReal w{std::norm(d[0]), std::norm(d[1])};
    const auto times = s.grid.times();
    const auto lad = dicke_ladder_evolve(s.n_atoms, s.gamma * (w[0] + w[1]), times);

    std::vector<Complex> pe, pg, ix, iy, itot;
    for (size_t i = 0; i < times.size(); ++i) {
        pe.emplace_back(lad.excited_fraction[i]);
        pg.emplace_back(1.0 - lad.excited_fraction[i]);
        ix.emplace_back(w[0] * lad.raising_lowering[i]);
        iy.emplace_back(w[1] * lad.raising_lowering[i]);
        itot.emplace_back((w[0] + w[1]) * lad.raising_lowering[i]);
    }
    std::vector<ObservableSeries> out(2);
    out[g] = exact_series("p_" + sys.labels[g], times, std::move(pg));
    out[e] = exact_series("p_" + sys.labels[e], times, std::move(pe));
    out.push_back(exact_series("I_x", times, std::move(ix)));
    out.push_back(exact_series("I_y", times, std::move(iy)));
    out.push_back(exact_series("I", times, std::move(itot)));
    if (normalize_intensity) out.push_back(normalized_to_max(out.back(), "I_norm"));
    return out;
}

//---------------------------------------------------------------------------//

OracleKind select_oracle(const Scenario& s)
{
    const int m = s.system.size();
    const long long cap = s.oracle.max_dimension;
    if (hilbert_dimension(m, s.n_atoms, cap) > 0) return OracleKind::brute_force;
    const std::string why = ladder_inapplicable_reason(s);
    if (why.empty()) return OracleKind::dicke_ladder;
    throw OracleInapplicableError(
        "no exact reference for " + std::to_string(s.n_atoms) + " emitters with "
        + std::to_string(m) + " levels: the brute-force space exceeds the cap of "
        + std::to_string(cap) + " (use n_atoms <= " + std::to_string(largest_admissible_n(m, cap))
        + ") and " + why);
}

std::vector<ObservableSeries> exact_reference(const Scenario& s, bool normalize_intensity,
                                              OracleKind* used)
{
    const OracleKind k = select_oracle(s);
    if (used) *used = k;
    if (k == OracleKind::dicke_ladder) return ladder_observables(s, normalize_intensity);
    return exact_observables(s, evolve_exact(s), normalize_intensity);
}

}  // namespace sfs
