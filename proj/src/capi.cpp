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


#include "sfs/sfs.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "sfs/config.hpp"
#include "sfs/oracle.hpp"

struct sfs_scenario {
    sfs::Scenario s;
};

struct sfs_table {
    std::vector<sfs::ObservableSeries> series;
    sfs::CsvMeta meta;
    long long total = 0;
    long long completed = 0;
    long long omitted = 0;
};

namespace {

thread_local std::string g_last_error;

// Caller handed us something unusable (bad handle or index).
class ArgumentError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

sfs_status fail(sfs_status code, const std::string& msg)
{
    g_last_error = msg;
    return code;
}

template<class F>
sfs_status guarded(F&& f)
{
    g_last_error.clear();
    try {
        return f();
    } catch (const ArgumentError& e) {
        return fail(SFS_ERR_ARGUMENT, e.what());
    } catch (const sfs::ParseError& e) {
        return fail(SFS_ERR_PARSE, e.what());
    } catch (const sfs::ValidationError& e) {
        return fail(SFS_ERR_VALIDATION, e.what());
    } catch (const sfs::DivergenceCapError& e) {
        return fail(SFS_ERR_DIVERGENCE_CAP, e.what());
    } catch (const sfs::OracleInapplicableError& e) {
        return fail(SFS_ERR_ORACLE_INAPPLICABLE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SFS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SFS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SFS_ERR_INTERNAL, "unknown error");
    }
}

sfs::Scenario effective(const sfs_scenario* s, const sfs_run_options* opt)
{
    sfs::Scenario out = s->s;
    if (!opt) return out;
    if (opt->trajectories >= 0) out.ensemble.trajectories = opt->trajectories;
    if (opt->override_seed) out.ensemble.seed = opt->seed;
    switch (opt->gauge) {
    case SFS_GAUGE_KEEP: break;
    case SFS_GAUGE_ADAPTIVE: out.gauge_policy = sfs::GaugePolicy::adaptive; break;
    case SFS_GAUGE_ON: out.gauge_policy = sfs::GaugePolicy::always_on; break;
    case SFS_GAUGE_OFF: out.gauge_policy = sfs::GaugePolicy::off; break;
    default: throw sfs::ValidationError("unknown gauge policy code");
    }
    switch (opt->weight) {
    case SFS_WEIGHT_KEEP: break;
    case SFS_WEIGHT_ON: out.weight_mode = sfs::WeightMode::weighted; break;
    case SFS_WEIGHT_OFF: out.weight_mode = sfs::WeightMode::unweighted; break;
    default: throw sfs::ValidationError("unknown weight mode code");
    }
    sfs::require_valid(out);
    return out;
}

sfs::EnsembleOptions ensemble_options(const sfs_run_options* opt)
{
    sfs::EnsembleOptions eo;
    if (opt) eo.threads = opt->threads;
    return eo;
}

bool normalize(const sfs_run_options* opt)
{
    return opt && opt->normalize_intensity;
}

sfs_table* stochastic_table(const sfs::Scenario& s, const sfs::EnsembleResult& r,
                            bool norm)
{
    auto* t = new sfs_table;
    t->series = sfs::standard_observables(r, s, norm);
    t->meta.source = "stochastic";
    t->meta.config_hash = r.config_hash;
    t->meta.seed = r.seed;
    t->meta.n_omitted = r.omitted;
    t->total = r.total;
    t->completed = r.completed;
    t->omitted = r.omitted;
    return t;
}

sfs_table* exact_table(const sfs::Scenario& s, std::vector<sfs::ObservableSeries> series,
                       sfs::OracleKind kind)
{
    auto* t = new sfs_table;
    t->series = std::move(series);
    t->meta.source = kind == sfs::OracleKind::dicke_ladder ? "oracle-ladder" : "oracle";
    t->meta.config_hash = sfs::config_hash(s);
    t->meta.seed = s.ensemble.seed;
    return t;
}

sfs_oracle_kind to_c(sfs::OracleKind k)
{
    return k == sfs::OracleKind::dicke_ladder ? SFS_ORACLE_DICKE_LADDER
                                              : SFS_ORACLE_BRUTE_FORCE;
}

const sfs::ObservableSeries* series_at(const sfs_table* t, size_t i)
{
    if (!t) throw ArgumentError("null table");
    if (i >= t->series.size()) throw ArgumentError("series index out of range");
    return &t->series[i];
}

}  // namespace

extern "C" {

void sfs_run_options_init(sfs_run_options* opt)
{
    if (!opt) return;
    opt->trajectories = -1;
    opt->override_seed = 0;
    opt->seed = 0;
    opt->gauge = SFS_GAUGE_KEEP;
    opt->weight = SFS_WEIGHT_KEEP;
    opt->threads = 0;
    opt->normalize_intensity = 0;
}

const char* sfs_version(void)
{
    return "1.0.0";
}

const char* sfs_last_error(void)
{
    return g_last_error.c_str();
}

const char* sfs_status_name(sfs_status s)
{
    switch (s) {
    case SFS_OK: return "ok";
    case SFS_ERR_PARSE: return "parse error";
    case SFS_ERR_VALIDATION: return "validation error";
    case SFS_ERR_DIVERGENCE_CAP: return "divergence cap exceeded";
    case SFS_ERR_ORACLE_INAPPLICABLE: return "oracle inapplicable";
    case SFS_ERR_IO: return "i/o error";
    case SFS_ERR_ARGUMENT: return "invalid argument";
    case SFS_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

sfs_status sfs_scenario_load(const char* path, sfs_scenario** out)
{
    if (!path || !out) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = nullptr;
        auto h = std::make_unique<sfs_scenario>();
        if (!std::ifstream(path)) {
            return fail(SFS_ERR_IO, std::string(path) + ": cannot open file");
        }
        h->s = sfs::load_scenario(path);
        *out = h.release();
        return SFS_OK;
    });
}

sfs_status sfs_scenario_parse(const char* text, sfs_scenario** out)
{
    if (!text || !out) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = nullptr;
        auto h = std::make_unique<sfs_scenario>();
        h->s = sfs::parse_scenario(text);
        sfs::require_valid(h->s);
        *out = h.release();
        return SFS_OK;
    });
}

void sfs_scenario_free(sfs_scenario* s)
{
    delete s;
}

sfs_status sfs_scenario_apply(sfs_scenario* s, const sfs_run_options* opt)
{
    if (!s) return fail(SFS_ERR_ARGUMENT, "null scenario");
    return guarded([&] {
        s->s = effective(s, opt);
        return SFS_OK;
    });
}

sfs_status sfs_scenario_hash(const sfs_scenario* s, char* buf, size_t size)
{
    if (!s || !buf) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        const std::string h = sfs::config_hash(s->s);
        if (size < h.size() + 1) return fail(SFS_ERR_ARGUMENT, "buffer too small");
        std::memcpy(buf, h.c_str(), h.size() + 1);
        return SFS_OK;
    });
}

sfs_status sfs_scenario_seed(const sfs_scenario* s, uint64_t* seed)
{
    if (!s || !seed) return fail(SFS_ERR_ARGUMENT, "null argument");
    *seed = s->s.ensemble.seed;
    return SFS_OK;
}

sfs_status sfs_scenario_trajectories(const sfs_scenario* s, long long* n)
{
    if (!s || !n) return fail(SFS_ERR_ARGUMENT, "null argument");
    *n = s->s.ensemble.trajectories;
    return SFS_OK;
}

sfs_status sfs_run_ensemble(const sfs_scenario* s, const sfs_run_options* opt,
                            sfs_table** out)
{
    if (!s || !out) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = nullptr;
        const sfs::Scenario sc = effective(s, opt);
        const auto r = sfs::run_ensemble(sc, ensemble_options(opt));
        *out = stochastic_table(sc, r, normalize(opt));
        return SFS_OK;
    });
}

sfs_status sfs_run_oracle(const sfs_scenario* s, const sfs_run_options* opt,
                          sfs_table** out, sfs_oracle_kind* kind)
{
    if (!s || !out) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = nullptr;
        if (kind) *kind = SFS_ORACLE_NONE;
        const sfs::Scenario sc = effective(s, opt);
        sfs::OracleKind k{};
        auto series = sfs::exact_reference(sc, normalize(opt), &k);
        *out = exact_table(sc, std::move(series), k);
        if (kind) *kind = to_c(k);
        return SFS_OK;
    });
}

sfs_status sfs_run_compare(const sfs_scenario* s, const sfs_run_options* opt,
                           sfs_table** stochastic, sfs_table** exact,
                           sfs_table** difference, sfs_oracle_kind* kind)
{
    if (!s || !stochastic || !exact || !difference) {
        return fail(SFS_ERR_ARGUMENT, "null argument");
    }
    return guarded([&] {
        *stochastic = *exact = *difference = nullptr;
        if (kind) *kind = SFS_ORACLE_NONE;
        const sfs::Scenario sc = effective(s, opt);
        const sfs::OracleKind k = sfs::select_oracle(sc);
        const bool norm = normalize(opt);
        const auto r = sfs::run_ensemble(sc, ensemble_options(opt));
        std::unique_ptr<sfs_table> st(stochastic_table(sc, r, norm));
        std::unique_ptr<sfs_table> ex(exact_table(sc, sfs::exact_reference(sc, norm), k));

        auto diff = std::make_unique<sfs_table>();
        diff->meta = st->meta;
        diff->meta.source = "difference";
        diff->total = st->total;
        diff->completed = st->completed;
        diff->omitted = st->omitted;
        for (const auto& d : sfs::compare_series(st->series, ex->series)) {
            const auto* src = sfs::find_series(st->series, d.name);
            sfs::ObservableSeries o;
            o.name = d.name;
            o.t = d.t;
            for (double v : d.abs_diff) o.mean.emplace_back(v, 0.0);
            o.stderr_re = src->stderr_re;
            o.stderr_im.assign(d.t.size(), 0.0);
            o.n_completed = src->n_completed;
            diff->series.push_back(std::move(o));
        }
        *stochastic = st.release();
        *exact = ex.release();
        *difference = diff.release();
        if (kind) *kind = to_c(k);
        return SFS_OK;
    });
}

sfs_status sfs_run_convergence(const sfs_scenario* s, const sfs_run_options* opt,
                               const long long* counts, size_t n_counts, sfs_table** out)
{
    if (!s || !out || (!counts && n_counts > 0)) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = nullptr;
        if (n_counts == 0) throw sfs::ValidationError("empty trajectory count list");
        for (size_t i = 0; i < n_counts; ++i) {
            if (counts[i] < 1) throw sfs::ValidationError("trajectory counts must be positive");
            if (i > 0 && counts[i] <= counts[i - 1]) {
                throw sfs::ValidationError("trajectory counts must increase");
            }
        }
        const sfs::Scenario sc = effective(s, opt);
        sfs::EnsembleOptions eo = ensemble_options(opt);
        eo.enforce_cap = false;
        auto table = std::make_unique<sfs_table>();
        sfs::EnsembleResult acc;
        long long done = 0;
        for (size_t i = 0; i < n_counts; ++i) {
            auto part = sfs::run_ensemble_range(sc, done, counts[i] - done, eo);
            if (i == 0) {
                acc = std::move(part);
            } else {
                acc.merge(part);
            }
            done = counts[i];
            sfs::check_omitted_cap(acc, sc);
            for (auto& o : sfs::standard_observables(acc, sc, normalize(opt))) {
                o.name += "@" + std::to_string(counts[i]);
                table->series.push_back(std::move(o));
            }
        }
        table->meta.source = "convergence";
        table->meta.config_hash = acc.config_hash;
        table->meta.seed = acc.seed;
        table->meta.n_omitted = acc.omitted;
        table->total = acc.total;
        table->completed = acc.completed;
        table->omitted = acc.omitted;
        *out = table.release();
        return SFS_OK;
    });
}

void sfs_table_free(sfs_table* t)
{
    delete t;
}

sfs_status sfs_table_series_count(const sfs_table* t, size_t* n)
{
    if (!t || !n) return fail(SFS_ERR_ARGUMENT, "null argument");
    *n = t->series.size();
    return SFS_OK;
}

sfs_status sfs_table_series_name(const sfs_table* t, size_t i, const char** name)
{
    if (!name) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *name = series_at(t, i)->name.c_str();
        return SFS_OK;
    });
}

sfs_status sfs_table_find(const sfs_table* t, const char* name, size_t* i)
{
    if (!t || !name || !i) return fail(SFS_ERR_ARGUMENT, "null argument");
    for (size_t k = 0; k < t->series.size(); ++k) {
        if (t->series[k].name == name) {
            *i = k;
            return SFS_OK;
        }
    }
    return fail(SFS_ERR_ARGUMENT, std::string("no series named '") + name + "'");
}

sfs_status sfs_table_length(const sfs_table* t, size_t i, size_t* n)
{
    if (!n) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *n = series_at(t, i)->size();
        return SFS_OK;
    });
}

sfs_status sfs_table_value(const sfs_table* t, size_t i, size_t j, double* time,
                           double* re, double* im, double* stderr_re)
{
    return guarded([&] {
        const auto* s = series_at(t, i);
        if (j >= s->size()) return fail(SFS_ERR_ARGUMENT, "time index out of range");
        if (time) *time = s->t[j];
        if (re) *re = s->mean[j].real();
        if (im) *im = s->mean[j].imag();
        if (stderr_re) *stderr_re = s->stderr_re[j];
        return SFS_OK;
    });
}

sfs_status sfs_table_max_abs(const sfs_table* t, size_t i, double* value)
{
    if (!value) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        double m = 0.0;
        for (const auto& v : series_at(t, i)->mean) m = std::max(m, std::abs(v.real()));
        *value = m;
        return SFS_OK;
    });
}

sfs_status sfs_table_counts(const sfs_table* t, long long* total, long long* completed,
                            long long* omitted)
{
    if (!t) return fail(SFS_ERR_ARGUMENT, "null table");
    if (total) *total = t->total;
    if (completed) *completed = t->completed;
    if (omitted) *omitted = t->omitted;
    return SFS_OK;
}

sfs_status sfs_table_write_csv(const sfs_table* t, const char* path)
{
    if (!t || !path) return fail(SFS_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        try {
            sfs::write_csv(std::string(path), t->series, t->meta);
        } catch (const std::runtime_error& e) {
            return fail(SFS_ERR_IO, e.what());
        }
        return SFS_OK;
    });
}

}  // extern "C"
