#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "isatk/common.hpp"

namespace isatk::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw Error("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Population standard deviation (divide by n).
inline double stddev_pop(std::span<const double> x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Linear interpolation of order statistics (R type 7): q(p) sits at
// fractional position (n-1)p in the sorted sample.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> x, double p) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return quantile_sorted(s, p);
}

inline double median(std::span<const double> x) { return quantile(x, 0.5); }

// Average ranks for ties, 1-based.
inline std::vector<double> ranks_average(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw Error("pearson: need two equal-length samples of size >= 2");
    double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;  // constant input: correlation undefined, report 0
    return sab / std::sqrt(saa * sbb);
}

// Spearman rank correlation with average-rank ties.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    auto ra = ranks_average(a);
    auto rb = ranks_average(b);
    return pearson(ra, rb);
}

struct BoxCoxFit {
    double lambda = 1.0;
    double log_likelihood = 0.0;
};

inline std::vector<double> boxcox_apply(std::span<const double> x, double lambda) {
    std::vector<double> y(x.size());
    if (std::abs(lambda) < 1e-8) {
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::log(x[i]);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] = (std::pow(x[i], lambda) - 1.0) / lambda;
    }
    return y;
}

// One-parameter Box-Cox profile log-likelihood, maximized over the grid
// [-5, 5] with step 0.01. Input must be strictly positive and non-constant.
inline BoxCoxFit boxcox_fit(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sum_log = 0.0;
    for (double v : x) {
        if (!(v > 0.0)) throw Error("boxcox_fit: input must be strictly positive");
        sum_log += std::log(v);
    }
    BoxCoxFit best;
    best.log_likelihood = -std::numeric_limits<double>::infinity();
    for (int step = -500; step <= 500; ++step) {
        double lam = static_cast<double>(step) / 100.0;
        auto y = boxcox_apply(x, lam);
        double m = mean(y);
        double s2 = 0.0;
        for (double v : y) s2 += (v - m) * (v - m);
        s2 /= n;
        if (!(s2 > 0.0) || !std::isfinite(s2)) continue;
        double ll = -0.5 * n * std::log(s2) + (lam - 1.0) * sum_log;
        if (ll > best.log_likelihood) {
            best.log_likelihood = ll;
            best.lambda = lam;
        }
    }
    if (!std::isfinite(best.log_likelihood))
        throw Error("boxcox_fit: no finite log-likelihood on the lambda grid");
    return best;
}

}  // namespace isatk::stats
