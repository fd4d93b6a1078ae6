#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "isatk/common.hpp"

namespace isatk::kmeans {

struct KMeansResult {
    std::vector<int> assignment;  // one cluster id per point, 0..k-1
    Eigen::MatrixXd centers;      // d x k
    double inertia = 0.0;         // total within-cluster squared distance
};

namespace detail {

inline double sqdist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).squaredNorm();
}

// k-means++ seeding.
inline Eigen::MatrixXd init_centers(const Eigen::MatrixXd& X, int k, Rng& rng) {
    const Eigen::Index n = X.cols();
    Eigen::MatrixXd centers(X.rows(), k);
    std::size_t first = rng.index(static_cast<std::size_t>(n));
    centers.col(0) = X.col(static_cast<Eigen::Index>(first));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            for (int q = 0; q < c; ++q)
                best = std::min(best, sqdist(X.col(p), centers.col(q)));
            d2[static_cast<std::size_t>(p)] = best;
            total += best;
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total, acc = 0.0;
            for (Eigen::Index p = 0; p < n; ++p) {
                acc += d2[static_cast<std::size_t>(p)];
                if (acc >= target) {
                    pick = p;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centers.col(c) = X.col(pick);
    }
    return centers;
}

inline KMeansResult lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd centers, int max_iter) {
    const Eigen::Index n = X.cols();
    const int k = static_cast<int>(centers.cols());
    KMeansResult res;
    res.assignment.assign(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (Eigen::Index p = 0; p < n; ++p) {
            int best = 0;
            double bd = sqdist(X.col(p), centers.col(0));
            for (int q = 1; q < k; ++q) {
                double d = sqdist(X.col(p), centers.col(q));
                if (d < bd) {
                    bd = d;
                    best = q;
                }
            }
            if (res.assignment[static_cast<std::size_t>(p)] != best) {
                res.assignment[static_cast<std::size_t>(p)] = best;
                changed = true;
            }
        }
        // recompute centers; an emptied cluster takes the point farthest
        // from its current center
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(X.rows(), k);
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index p = 0; p < n; ++p) {
            sums.col(res.assignment[static_cast<std::size_t>(p)]) += X.col(p);
            counts[static_cast<std::size_t>(res.assignment[static_cast<std::size_t>(p)])]++;
        }
        for (int q = 0; q < k; ++q) {
            if (counts[static_cast<std::size_t>(q)] > 0) {
                centers.col(q) = sums.col(q) / counts[static_cast<std::size_t>(q)];
            } else {
                Eigen::Index far = 0;
                double fd = -1.0;
                for (Eigen::Index p = 0; p < n; ++p) {
                    double d = sqdist(X.col(p),
                                      centers.col(res.assignment[static_cast<std::size_t>(p)]));
                    if (d > fd) {
                        fd = d;
                        far = p;
                    }
                }
                centers.col(q) = X.col(far);
                res.assignment[static_cast<std::size_t>(far)] = q;
                changed = true;
            }
        }
        if (!changed) break;
    }
    res.centers = centers;
    res.inertia = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
        res.inertia += sqdist(X.col(p), centers.col(res.assignment[static_cast<std::size_t>(p)]));
    return res;
}

}  // namespace detail

// Points are columns of X. Up to `restarts` k-means++ starts, best restart by
// minimum inertia.
inline KMeansResult fit(const Eigen::MatrixXd& X, int k, Rng rng, int restarts = 100,
                        int max_iter = 100) {
    const Eigen::Index n = X.cols();
    if (k < 1 || k > n) throw Error("kmeans: k must be in [1, point count]");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rr = rng.derive(static_cast<std::uint64_t>(r));
        auto res = detail::lloyd(X, detail::init_centers(X, k, rr), max_iter);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    return best;
}

// Mean silhouette over all points; singleton clusters score 0.
inline double silhouette(const Eigen::MatrixXd& X, const std::vector<int>& labels, int k) {
    const Eigen::Index n = X.cols();
    if (k < 2) throw Error("silhouette: need k >= 2");
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) counts[static_cast<std::size_t>(l)]++;
    double total = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
        int lp = labels[static_cast<std::size_t>(p)];
        if (counts[static_cast<std::size_t>(lp)] <= 1) continue;  // contributes 0
        std::vector<double> mean_dist(static_cast<std::size_t>(k), 0.0);
        for (Eigen::Index q = 0; q < n; ++q) {
            if (q == p) continue;
            mean_dist[static_cast<std::size_t>(labels[static_cast<std::size_t>(q)])] +=
                (X.col(p) - X.col(q)).norm();
        }
        double a = mean_dist[static_cast<std::size_t>(lp)] /
                   (counts[static_cast<std::size_t>(lp)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int q = 0; q < k; ++q) {
            if (q == lp || counts[static_cast<std::size_t>(q)] == 0) continue;
            b = std::min(b, mean_dist[static_cast<std::size_t>(q)] /
                                counts[static_cast<std::size_t>(q)]);
        }
        if (!std::isfinite(b)) continue;
        double s = (b - a) / std::max(a, b);
        if (std::max(a, b) == 0.0) s = 0.0;
        total += s;
    }
    return total / static_cast<double>(n);
}

}  // namespace isatk::kmeans
