#pragma once

// Small numeric helpers shared by the laboratories.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace randdyn {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct MeanStdErr {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

inline MeanStdErr mean_and_stderr(const std::vector<double>& xs) {
    MeanStdErr r;
    r.count = xs.size();
    if (xs.empty()) return r;
    long double sum = 0.0L;
    for (double x : xs) sum += x;
    r.mean = static_cast<double>(sum / xs.size());
    if (xs.size() < 2) return r;
    long double ss = 0.0L;
    for (double x : xs) {
        long double d = x - r.mean;
        ss += d * d;
    }
    r.std_error = std::sqrt(static_cast<double>(ss) / (xs.size() - 1.0) / xs.size());
    return r;
}

// Kolmogorov-Smirnov sup distance between the sample and the standard normal.
inline double ks_distance_to_normal(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double cdf = normal_cdf(xs[i]);
        d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    LinearFit f;
    const std::size_t n = std::min(xs.size(), ys.size());
    if (n < 2) return f;
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += static_cast<long double>(xs[i]) * xs[i];
        sxy += static_cast<long double>(xs[i]) * ys[i];
    }
    long double denom = n * sxx - sx * sx;
    if (denom == 0) return f;
    f.slope = static_cast<double>((n * sxy - sx * sy) / denom);
    f.intercept = static_cast<double>((sy - f.slope * sx) / n);
    return f;
}

} // namespace randdyn
