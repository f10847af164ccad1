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


#include "sfs/observables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sfs {
namespace {

ObservableSeries from_channel(const EnsembleResult& r, int channel, std::string name)
{
    if (channel < 0 || channel >= r.layout.size()) {
        throw ValidationError("observable '" + name + "' was not recorded");
    }
    ObservableSeries s;
    s.name = std::move(name);
    s.t = r.times;
    const int n = static_cast<int>(r.times.size());
    s.mean.resize(n);
    s.stderr_re.resize(n);
    s.stderr_im.resize(n);
    s.n_completed.resize(n);
    for (int j = 0; j < n; ++j) {
        auto e = r.moments.estimate(j, channel);
        s.mean[j] = e.mean;
        s.stderr_re[j] = e.stderr_re;
        s.stderr_im[j] = e.stderr_im;
        s.n_completed[j] = r.moments.count(j);
    }
    return s;
}

void check_level(const EnsembleResult& r, int p)
{
    if (p < 0 || p >= r.layout.dim()) {
        throw ValidationError("level index " + std::to_string(p) + " out of range");
    }
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

double ObservableSeries::max_abs_imag() const
{
    double m = 0.0;
    for (const auto& v : mean) m = std::max(m, std::abs(v.imag()));
    return m;
}

double ObservableSeries::max_imag_ratio() const
{
    double m = 0.0;
    for (size_t j = 0; j < mean.size(); ++j) {
        const double im = std::abs(mean[j].imag());
        if (im == 0.0) continue;
        const double se = j < stderr_im.size() ? stderr_im[j] : 0.0;
        m = std::max(m, se > 0.0 ? im / se : std::numeric_limits<double>::infinity());
    }
    return m;
}

bool ObservableSeries::converged(double k) const
{
    return max_imag_ratio() <= k;
}

ObservableSeries population(const EnsembleResult& r, int level, const std::string& name)
{
    check_level(r, level);
    return from_channel(r, r.layout.coherence(level, level), name);
}

ObservableSeries coherence(const EnsembleResult& r, int p, int q)
{
    check_level(r, p);
    check_level(r, q);
    const int ch = r.layout.coherence(p, q);
    return from_channel(r, ch, r.layout[ch].name);
}

ObservableSeries intensity(const EnsembleResult& r, int axis)
{
    if (axis < -1 || axis >= kAxes) throw ValidationError("intensity axis out of range");
    const int ch = r.layout.intensity(axis);
    return from_channel(r, ch, r.layout[ch].name);
}

ObservableSeries pair_correlator(const EnsembleResult& r, int p, int q, int r_, int s)
{
    for (int l : {p, q, r_, s}) check_level(r, l);
    const int ch = r.layout.pair(p, q, r_, s);
    if (ch < 0) {
        throw ValidationError("pair products are recorded only up to "
                              + std::to_string(ChannelLayout::kMaxPairLevels)
                              + " levels");
    }
    return from_channel(r, ch, r.layout[ch].name);
}

ObservableSeries triple_correlator(const EnsembleResult& r)
{
    if (r.layout.triple() < 0) {
        throw ValidationError("triple correlator needs at least three levels");
    }
    return from_channel(r, r.layout.triple(), "triple");
}

ObservableSeries normalized_to_max(const ObservableSeries& s, const std::string& name)
{
    ObservableSeries out = s;
    out.name = name;
    double peak = 0.0;
    for (const auto& v : s.mean) peak = std::max(peak, v.real());
    if (!(peak > 0.0)) return out;
    for (size_t j = 0; j < out.size(); ++j) {
        out.mean[j] /= peak;
        out.stderr_re[j] /= peak;
        out.stderr_im[j] /= peak;
    }
    return out;
}

std::vector<ObservableSeries> standard_observables(const EnsembleResult& r,
                                                   const Scenario& s,
                                                   bool normalize_intensity)
{
    std::vector<ObservableSeries> out;
    for (int p = 0; p < s.system.size(); ++p) {
        out.push_back(population(r, p, "p_" + s.system.labels[p]));
    }
    out.push_back(intensity(r, 0));
    out.push_back(intensity(r, 1));
    out.push_back(intensity(r, -1));
    if (normalize_intensity) out.push_back(normalized_to_max(out.back(), "I_norm"));
    if (r.layout.triple() >= 0) out.push_back(triple_correlator(r));
    return out;
}

namespace {

struct Detrended {
    std::vector<double> y;
    double dt = 0.0;
};

// Subtract a centered moving average over one period 2 pi / delta and taper
// with a Hann window. Only samples with a complete averaging window are kept,
// so the ends do not leak a slope step into every frequency bin.
Detrended detrend(const ObservableSeries& s, double delta)
{
    const size_t n = s.size();
    if (n < 4) throw ValidationError("beat analysis needs at least four samples");
    const double dt = (s.t.back() - s.t.front()) / static_cast<double>(n - 1);
    for (size_t j = 1; j < n; ++j) {
        if (std::abs(s.t[j] - s.t[j - 1] - dt) > 1e-9 * std::max(dt, 1.0)) {
            throw ValidationError("beat analysis needs a uniform grid");
        }
    }
    const double nyquist = std::numbers::pi / dt;
    if (!(delta > 0.0) || delta >= nyquist) {
        throw ValidationError("beat frequency outside the resolvable range (0, "
                              + format_double(nyquist) + ")");
    }
    const auto half = static_cast<long>(std::lround(std::numbers::pi / delta / dt));
    const long first = half;
    const long last = static_cast<long>(n) - 1 - half;
    if (last - first + 1 < 4) {
        throw ValidationError("series too short to resolve the beat frequency");
    }
    Detrended d;
    d.dt = dt;
    const auto len = static_cast<size_t>(last - first + 1);
    d.y.resize(len);
    double window = 0.0;
    for (long i = first - half; i <= first + half; ++i) window += s.mean[i].real();
    const double inv_w = 1.0 / static_cast<double>(2 * half + 1);
    for (long j = first; j <= last; ++j) {
        if (j > first) window += s.mean[j + half].real() - s.mean[j - half - 1].real();
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (j - first)
                                                 / static_cast<double>(len - 1));
        d.y[j - first] = (s.mean[j].real() - window * inv_w) * hann;
    }
    return d;
}

double power_at(const Detrended& d, double w)
{
    Complex acc{};
    for (size_t j = 0; j < d.y.size(); ++j) {
        acc += d.y[j] * std::polar(1.0, -w * d.dt * static_cast<double>(j));
    }
    return std::norm(acc);
}

}  // namespace

double beat_power_ratio(const ObservableSeries& s, double delta)
{
    const Detrended d = detrend(s, delta);
    const size_t len = d.y.size();
    const double span = d.dt * static_cast<double>(len);
    double beat = 0.0, low = 0.0;
    int beat_bins = 0, low_bins = 0;
    for (size_t k = 1; k <= len / 2; ++k) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / span;
        const bool in_beat = std::abs(w - delta) <= 0.25 * delta;
        const bool in_low = w <= 0.5 * delta;
        if (!in_beat && !in_low) continue;
        const double power = power_at(d, w);
        if (in_beat) {
            beat += power;
            ++beat_bins;
        } else {
            low += power;
            ++low_bins;
        }
    }
    if (beat_bins == 0 || low_bins == 0) {
        throw ValidationError("series too short to resolve the beat frequency");
    }
    if (low == 0.0) return beat == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return beat / low;
}

double dominant_frequency(const ObservableSeries& s, double delta)
{
    const Detrended d = detrend(s, delta);
    // Scan well below bin spacing, then refine with a golden-section search.
    const double lo = 0.75 * delta, hi = 1.25 * delta;
    const int samples = 400;
    double best_w = lo, best_p = -1.0;
    for (int k = 0; k <= samples; ++k) {
        const double w = lo + (hi - lo) * k / samples;
        const double p = power_at(d, w);
        if (p > best_p) {
            best_p = p;
            best_w = w;
        }
    }
    const double step = (hi - lo) / samples;
    double a = std::max(lo, best_w - step), b = std::min(hi, best_w + step);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), e = a + g * (b - a);
    double pc = power_at(d, c), pe = power_at(d, e);
    for (int it = 0; it < 60; ++it) {
        if (pc > pe) {
            b = e;
            e = c;
            pe = pc;
            c = b - g * (b - a);
            pc = power_at(d, c);
        } else {
            a = c;
            c = e;
            pc = pe;
            e = a + g * (b - a);
            pe = power_at(d, e);
        }
    }
    return 0.5 * (a + b);
}

//---------------------------------------------------------------------------//

void write_csv(std::ostream& os, const std::vector<ObservableSeries>& series,
               const CsvMeta& meta)
{
    os << "# sfs-csv schema=" << kCsvSchema << '\n';
    os << "# source=" << meta.source << '\n';
    os << "# config_hash=" << meta.config_hash << '\n';
    os << "# seed=" << meta.seed << '\n';
    os << "t,observable,re,im,stderr,n_completed,n_omitted\n";
    for (const auto& s : series) {
        for (size_t j = 0; j < s.size(); ++j) {
            const long long nc = j < s.n_completed.size() ? s.n_completed[j] : 0;
            const double se = j < s.stderr_re.size() ? s.stderr_re[j] : 0.0;
            os << format_double(s.t[j]) << ',' << s.name << ','
               << format_double(s.mean[j].real()) << ',' << format_double(s.mean[j].imag())
               << ',' << format_double(se) << ',' << nc << ',' << meta.n_omitted << '\n';
        }
    }
}

void write_csv(const std::string& path, const std::vector<ObservableSeries>& series,
               const CsvMeta& meta)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    write_csv(f, series, meta);
    if (!f) throw std::runtime_error("error while writing " + path);
}

std::vector<ObservableSeries> read_csv(std::istream& is, CsvMeta* meta)
{
    CsvMeta m;
    std::string line;
    int line_no = 0;
    bool have_schema = false, have_columns = false;
    std::vector<ObservableSeries> out;
    std::map<std::string, size_t> index;
    auto fail = [&](const std::string& msg) {
        throw ParseError("csv:" + std::to_string(line_no) + ": " + msg);
    };
    auto to_double = [&](const std::string& s) {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            fail("bad number '" + s + "'");
        }
        return v;
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(2, eq - 2);
            std::string value = line.substr(eq + 1);
            if (key == "sfs-csv schema") {
                if (value != std::to_string(kCsvSchema)) fail("unsupported schema " + value);
                have_schema = true;
            } else if (key == "source") {
                m.source = value;
            } else if (key == "config_hash") {
                m.config_hash = value;
            } else if (key == "seed") {
                m.seed = std::stoull(value);
            }
            continue;
        }
        if (!have_schema) fail("missing schema line");
        if (!have_columns) {
            if (line != "t,observable,re,im,stderr,n_completed,n_omitted") {
                fail("unexpected column header");
            }
            have_columns = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 7) fail("expected 7 fields");
        auto [it, added] = index.try_emplace(f[1], out.size());
        if (added) {
            out.emplace_back();
            out.back().name = f[1];
        }
        auto& s = out[it->second];
        s.t.push_back(to_double(f[0]));
        s.mean.emplace_back(to_double(f[2]), to_double(f[3]));
        s.stderr_re.push_back(to_double(f[4]));
        s.stderr_im.push_back(0.0);
        s.n_completed.push_back(std::stoll(f[5]));
        m.n_omitted = std::stoll(f[6]);
    }
    if (!have_columns) fail("missing column header");
    if (meta) *meta = m;
    return out;
}

//---------------------------------------------------------------------------//

const ObservableSeries* find_series(const std::vector<ObservableSeries>& v,
                                    const std::string& name)
{
    for (const auto& s : v) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

std::vector<SeriesDifference> compare_series(const std::vector<ObservableSeries>& a,
                                             const std::vector<ObservableSeries>& b)
{
    std::vector<SeriesDifference> out;
    for (const auto& sa : a) {
        const ObservableSeries* sb = find_series(b, sa.name);
        if (!sb) continue;
        if (sb->size() != sa.size()) {
            throw ValidationError("series '" + sa.name + "' differ in length");
        }
        SeriesDifference d;
        d.name = sa.name;
        d.t = sa.t;
        d.abs_diff.resize(sa.size());
        for (size_t j = 0; j < sa.size(); ++j) {
            d.abs_diff[j] = std::abs(sa.mean[j].real() - sb->mean[j].real());
            d.max_abs_diff = std::max(d.max_abs_diff, d.abs_diff[j]);
        }
        out.push_back(std::move(d));
    }
    return out;
}

}  // namespace sfs
