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


// Ensemble observables, their diagnostics, and the CSV exchange format.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sfs/integrator.hpp"

namespace sfs {

/// One observable on the output grid. Exact references carry zero errors.
struct ObservableSeries {
    std::string name;
    std::vector<double> t;
    std::vector<Complex> mean;
    std::vector<double> stderr_re;
    std::vector<double> stderr_im;
    std::vector<long long> n_completed;

    size_t size() const { return t.size(); }

    double max_abs_imag() const;
    /// Largest |Im mean| / stderr_im over the grid; points with zero error
    /// count only when the imaginary part is nonzero (then infinite).
    double max_imag_ratio() const;
    /// The imaginary part vanishes within k standard errors at every time.
    bool converged(double k = 3.0) const;
};

/// <Omega rho_pp>.
ObservableSeries population(const EnsembleResult& r, int level, const std::string& name);
/// <Omega rho_pq>.
ObservableSeries coherence(const EnsembleResult& r, int p, int q);
/// Intensity along one axis (0, 1) or summed over both (-1).
ObservableSeries intensity(const EnsembleResult& r, int axis);
/// <Omega rho_pq rho_rs>; throws when pair products were not recorded.
ObservableSeries pair_correlator(const EnsembleResult& r, int p, int q, int r_, int s);
/// <Omega rho_12 rho_23 rho_31>; throws for fewer than three levels.
ObservableSeries triple_correlator(const EnsembleResult& r);

/// Divides mean and errors by the largest real part of the mean.
ObservableSeries normalized_to_max(const ObservableSeries& s, const std::string& name);

/// Populations of every level, the three intensity channels and, when
/// recorded, the triple correlator.
std::vector<ObservableSeries> standard_observables(const EnsembleResult& r,
                                                   const Scenario& s,
                                                   bool normalize_intensity);

/// Spectral power of the detrended real part near `delta` (|w - delta| <=
/// delta / 4) relative to the power in the band 0 < w <= delta / 2. The
/// series is detrended by a moving average over one period 2 pi / delta,
/// trimmed to samples with a full window and Hann tapered. Requires a
/// uniform grid with delta below the Nyquist frequency.
double beat_power_ratio(const ObservableSeries& s, double delta);

// Frequency in [0.75, 1.25] delta where the detrended spectrum peaks.
double dominant_frequency(const ObservableSeries& s, double delta);

//---------------------------------------------------------------------------//

struct CsvMeta {
    std::string source = "stochastic";
    std::string config_hash;
    std::uint64_t seed = 0;
    long long n_omitted = 0;
};

inline constexpr int kCsvSchema = 1;

void write_csv(std::ostream& os, const std::vector<ObservableSeries>& series,
               const CsvMeta& meta);
void write_csv(const std::string& path, const std::vector<ObservableSeries>& series,
               const CsvMeta& meta);

/// Reads a file produced by write_csv. Throws ParseError on schema mismatch.
std::vector<ObservableSeries> read_csv(std::istream& is, CsvMeta* meta = nullptr);

//---------------------------------------------------------------------------//

/// Pointwise |a - b| of the real parts on a shared grid.
struct SeriesDifference {
    std::string name;
    std::vector<double> t;
    std::vector<double> abs_diff;
    double max_abs_diff = 0.0;
};

/// Matches series by name; names present on only one side are skipped.
std::vector<SeriesDifference> compare_series(const std::vector<ObservableSeries>& a,
                                             const std::vector<ObservableSeries>& b);

const ObservableSeries* find_series(const std::vector<ObservableSeries>& v,
                                    const std::string& name);

}  // namespace sfs
