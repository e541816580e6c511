#pragma once

#include <algorithm>
#include <ctime>
#include <stdexcept>
#include <vector>

namespace propsel {

// CPU time of the calling thread, in seconds.
inline double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median of empty list");
    std::sort(xs.begin(), xs.end());
    const size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace propsel
