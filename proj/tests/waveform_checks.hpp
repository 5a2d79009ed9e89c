#pragma once

// shared structural waveform checks for the integrate-and-fire shape:
// monotone rise segments terminated by fast drops.

#include <algorithm>
#include <cstddef>
#include <vector>

// Counts integrate-fire cycles on a uniform-grid series: a cycle is a
// rise of at least min_rise from the running trough followed by a drop
// of at least min_drop within drop_window seconds.
inline int count_integrate_fire_cycles(const std::vector<double>& time,
                                       const std::vector<double>& v,
                                       double min_rise, double min_drop,
                                       double drop_window) {
    if (time.size() < 3) return 0;
    const double dt = time[1] - time[0];
    const size_t w = std::max<size_t>(1, static_cast<size_t>(drop_window / dt));
    int cycles = 0;
    double trough = v[0];
    for (size_t k = 1; k < v.size(); ++k) {
        trough = std::min(trough, v[k]);
        if (v[k] - trough < min_rise) continue;
        // candidate peak: does the next window drop far enough?
        double ahead_min = v[k];
        const size_t stop = std::min(v.size() - 1, k + w);
        for (size_t j = k; j <= stop; ++j) ahead_min = std::min(ahead_min, v[j]);
        if (v[k] - ahead_min >= min_drop) {
            ++cycles;
            trough = ahead_min;
            k = stop;
        }
    }
    return cycles;
}
