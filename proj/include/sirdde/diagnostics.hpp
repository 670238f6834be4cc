// Copyright (c) 2026 the sirdde authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sirdde {

struct SeriesPeak {
    double value = 0.0;
    std::size_t index = 0;
};

/// Global maximum over the discrete trajectory.
inline SeriesPeak global_peak(std::span<const double> series)
{
    SeriesPeak p{series.empty() ? 0.0 : series[0], 0};
    for (std::size_t j = 1; j < series.size(); ++j) {
        if (series[j] > p.value)
            p = {series[j], j};
    }
    return p;
}

/// First index where the series drops below zero (nonnegativity diagnostic);
/// a small tolerance absorbs roundoff around zero.
inline std::optional<std::size_t> first_negative_index(std::span<const double> series,
                                                       double tol = 1e-12)
{
    for (std::size_t j = 0; j < series.size(); ++j) {
        if (series[j] < -tol)
            return j;
    }
    return std::nullopt;
}

/// Step-to-step increments, length size() - 1.
inline std::vector<double> increments(std::span<const double> series)
{
    std::vector<double> inc;
    if (series.size() < 2)
        return inc;
    inc.reserve(series.size() - 1);
    for (std::size_t j = 0; j + 1 < series.size(); ++j)
        inc.push_back(series[j + 1] - series[j]);
    return inc;
}

/// Indices of strict interior local maxima in [begin, end).
inline std::vector<std::size_t> local_maxima(std::span<const double> series, std::size_t begin = 0)
{
    std::vector<std::size_t> idx;
    for (std::size_t j = std::max<std::size_t>(begin, 1); j + 1 < series.size(); ++j) {
        if (series[j] > series[j - 1] && series[j] > series[j + 1])
            idx.push_back(j);
    }
    return idx;
}

/// Ratios of successive values, p[k+1] / p[k]; the envelope of an oscillation
/// grows when these exceed 1 and decays when they stay below 1.
inline std::vector<double> successive_ratios(std::span<const double> peaks)
{
    std::vector<double> r;
    for (std::size_t k = 0; k + 1 < peaks.size(); ++k)
        r.push_back(peaks[k + 1] / peaks[k]);
    return r;
}

/// Amplitudes of the oscillation in a series, measured as the values of its
/// positive local maxima from index `begin` on (one per oscillation period).
inline std::vector<double> oscillation_peak_amplitudes(std::span<const double> series,
                                                       std::size_t begin = 0)
{
    std::vector<double> amps;
    for (std::size_t j : local_maxima(series, begin)) {
        if (series[j] > 0.0)
            amps.push_back(series[j]);
    }
    return amps;
}

} // namespace sirdde
