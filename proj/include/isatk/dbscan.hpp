#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/geom.hpp"

namespace isatk::dbscan {

enum class EpsilonScale { Area, Length };

inline EpsilonScale epsilon_scale_from_string(const std::string& s) {
    if (s == "area") return EpsilonScale::Area;
    if (s == "length") return EpsilonScale::Length;
    throw Error("unknown epsilon scale '" + s + "' (expected area or length)");
}

struct Params {
    int k = 3;
    double epsilon = 0.0;
};

// Automatic parameter rule:
//   k = max(min(ceil(r/20), 50), 3)
//   eps = k * Gamma(2) / sqrt(r * pi) * (range(z1) * range(z2))
// With EpsilonScale::Length the range product is replaced by its geometric
// mean, giving eps length units instead of area units.
inline Params auto_params(std::size_t r, double range_z1, double range_z2,
                          EpsilonScale scale = EpsilonScale::Area) {
    if (r < 1) throw Error("dbscan auto_params: need at least one point");
    if (range_z1 < 0.0 || range_z2 < 0.0) throw Error("dbscan auto_params: negative range");
    Params p;
    double rd = static_cast<double>(r);
    p.k = static_cast<int>(std::max(std::min(std::ceil(rd / 20.0), 50.0), 3.0));
    double extent = scale == EpsilonScale::Area ? range_z1 * range_z2
                                                : std::sqrt(range_z1 * range_z2);
    p.epsilon = static_cast<double>(p.k) * std::tgamma(2.0) / std::sqrt(rd * M_PI) * extent;
    return p;
}

// Labels: -1 outlier, clusters numbered 1..N_c. Core point: >= k neighbours
// within eps (self included). Points are scanned in a canonical order
// (lexicographic by coordinates) so the labeling is independent of input
// order; border points join the cluster of the first core that reaches them
// in that order.
inline std::vector<int> cluster(const std::vector<geom::Pt>& pts, int k, double eps) {
    if (eps <= 0.0) throw Error("dbscan: eps must be > 0");
    if (k < 1) throw Error("dbscan: k must be >= 1");
    const std::size_t n = pts.size();
    std::vector<int> labels(n, -1);
    if (n == 0) return labels;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = pts[static_cast<std::size_t>(a)];
        const auto& pb = pts[static_cast<std::size_t>(b)];
        if (pa.x != pb.x) return pa.x < pb.x;
        if (pa.y != pb.y) return pa.y < pb.y;
        return a < b;
    });

    const double eps2 = eps * eps;
    auto neighbours = [&](int i) {
        std::vector<int> out;
        const auto& p = pts[static_cast<std::size_t>(i)];
        for (int j : order) {
            double dx = p.x - pts[static_cast<std::size_t>(j)].x;
            double dy = p.y - pts[static_cast<std::size_t>(j)].y;
            if (dx * dx + dy * dy <= eps2) out.push_back(j);
        }
        return out;  // canonical order, includes i itself
    };

    std::vector<char> visited(n, 0);
    int next_cluster = 0;
    for (int i : order) {
        if (visited[static_cast<std::size_t>(i)]) continue;
        visited[static_cast<std::size_t>(i)] = 1;
        auto nb = neighbours(i);
        if (static_cast<int>(nb.size()) < k) continue;  // not core; may join later
        ++next_cluster;
        labels[static_cast<std::size_t>(i)] = next_cluster;
        std::deque<int> frontier(nb.begin(), nb.end());
        while (!frontier.empty()) {
            int q = frontier.front();
            frontier.pop_front();
            if (labels[static_cast<std::size_t>(q)] == -1)
                labels[static_cast<std::size_t>(q)] = next_cluster;  // border or core
            if (visited[static_cast<std::size_t>(q)]) continue;
            visited[static_cast<std::size_t>(q)] = 1;
            auto qn = neighbours(q);
            if (static_cast<int>(qn.size()) >= k)
                for (int w : qn) frontier.push_back(w);
        }
    }
    return labels;
}

// Renumber clusters 1..N_c by each cluster's smallest member index; outliers
// stay -1. Makes label vectors comparable across runs and permutations.
inline std::vector<int> canonical_relabel(const std::vector<int>& labels) {
    std::vector<std::pair<int, int>> first_seen;  // (smallest index, cluster id)
    std::vector<int> seen_ids;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int c = labels[i];
        if (c < 0) continue;
        if (std::find(seen_ids.begin(), seen_ids.end(), c) == seen_ids.end()) {
            seen_ids.push_back(c);
            first_seen.push_back({static_cast<int>(i), c});
        }
    }
    std::sort(first_seen.begin(), first_seen.end());
    std::vector<int> remap;
    for (const auto& [idx, c] : first_seen) {
        if (c >= static_cast<int>(remap.size())) remap.resize(static_cast<std::size_t>(c) + 1, 0);
    }
    int next = 0;
    for (const auto& [idx, c] : first_seen) remap[static_cast<std::size_t>(c)] = ++next;
    std::vector<int> out(labels);
    for (auto& c : out)
        if (c > 0) c = remap[static_cast<std::size_t>(c)];
    return out;
}

}  // namespace isatk::dbscan
