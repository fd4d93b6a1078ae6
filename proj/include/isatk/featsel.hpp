#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/csv.hpp"
#include "isatk/kmeans.hpp"
#include "isatk/metadata.hpp"
#include "isatk/pca.hpp"
#include "isatk/random_forest.hpp"

namespace isatk::featsel {

struct FeatureClusterSet {
    int k = 0;
    std::vector<int> assignment;  // feature index -> cluster id
    double silhouette = 0.0;
};

struct CandidateScore {
    std::vector<int> subset;                // one feature index per cluster
    std::vector<double> technique_error;    // per technique, CV error
    std::vector<bool> technique_excluded;   // single-class labels
    double mean_error = 0.0;
};

// Features are clustered as points in instance space (rows of the
// standardized matrix). If k is not given, it is chosen from
// [3, min(12, f-1)] by mean silhouette (k = max(2, f-1) when f <= 3).
inline FeatureClusterSet cluster_features(const Eigen::MatrixXd& F_std, int k, Rng rng,
                                          int restarts = 100) {
    const Eigen::Index f = F_std.rows();
    if (f < 2) throw Error("cluster_features: need at least 2 retained features");
    Eigen::MatrixXd pts = F_std.transpose();  // features as columns

    auto run = [&](int kk, std::uint64_t stream) {
        return kmeans::fit(pts, kk, rng.derive(stream), restarts);
    };

    FeatureClusterSet out;
    if (k > 0) {
        if (k > f) throw Error("cluster_features: k exceeds feature count");
        auto res = run(k, 1);
        out.k = k;
        out.assignment = res.assignment;
        out.silhouette = k >= 2 ? kmeans::silhouette(pts, res.assignment, k) : 0.0;
        return out;
    }

    int k_lo = 3, k_hi = std::min<int>(12, static_cast<int>(f) - 1);
    if (k_hi < k_lo) k_lo = k_hi = std::max(2, static_cast<int>(f) - 1);
    double best_sil = -2.0;
    for (int kk = k_lo; kk <= k_hi; ++kk) {
        auto res = run(kk, 1000 + static_cast<std::uint64_t>(kk));
        double sil = kmeans::silhouette(pts, res.assignment, kk);
        if (sil > best_sil) {
            best_sil = sil;
            out.k = kk;
            out.assignment = res.assignment;
            out.silhouette = sil;
        }
    }
    return out;
}

// One feature per cluster, Cartesian product; above `cap` a seeded uniform
// sample of cap distinct combinations is drawn instead.
inline std::vector<std::vector<int>> enumerate_candidates(const FeatureClusterSet& clusters,
                                                          std::size_t cap, Rng rng) {
    if (cap < 1) throw Error("enumerate_candidates: cap must be >= 1");
    std::vector<std::vector<int>> members(static_cast<std::size_t>(clusters.k));
    for (std::size_t fi = 0; fi < clusters.assignment.size(); ++fi)
        members[static_cast<std::size_t>(clusters.assignment[fi])].push_back(
            static_cast<int>(fi));
    for (const auto& m : members)
        if (m.empty()) throw Error("enumerate_candidates: empty cluster");

    // saturating product
    std::size_t product = 1;
    for (const auto& m : members) {
        if (product > cap * 2 + 1) break;
        product *= m.size();
    }

    std::vector<std::vector<int>> out;
    if (product <= cap) {
        std::vector<std::size_t> digit(members.size(), 0);
        while (true) {
            std::vector<int> combo;
            combo.reserve(members.size());
            for (std::size_t c = 0; c < members.size(); ++c)
                combo.push_back(members[c][digit[c]]);
            out.push_back(std::move(combo));
            std::size_t c = members.size();
            while (c > 0) {
                --c;
                if (++digit[c] < members[c].size()) break;
                digit[c] = 0;
                if (c == 0) return out;
            }
        }
    }

    std::set<std::vector<int>> seen;
    while (seen.size() < cap) {
        std::vector<int> combo;
        combo.reserve(members.size());
        for (const auto& m : members) combo.push_back(m[rng.index(m.size())]);
        if (seen.insert(combo).second) out.push_back(std::move(combo));
    }
    return out;
}

// PCA the subset to 2D, then per-technique random-forest CV error on the
// good/bad labels; single-class techniques score 0 and are excluded from the
// mean. `canonical_order` is the instance ordering sorted by id.
inline CandidateScore score_candidate(const std::vector<int>& subset,
                                      const Eigen::MatrixXd& F_std,
                                      const meta::GoodnessMatrix& good,
                                      const std::vector<int>& canonical_order, Rng rng,
                                      int folds = 5, int n_trees = 100) {
    if (subset.size() < 2) throw Error("score_candidate: subset must have >= 2 features");
    CandidateScore cs;
    cs.subset = subset;
    // work in canonical instance order throughout so results are bit-stable
    // under permutations of the input columns
    const Eigen::Index i = F_std.cols();
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(subset.size()), i);
    for (std::size_t r = 0; r < subset.size(); ++r)
        for (Eigen::Index c = 0; c < i; ++c)
            sub(static_cast<Eigen::Index>(r), c) =
                F_std(subset[r], canonical_order[static_cast<std::size_t>(c)]);
    Eigen::MatrixXd Z = pca::fit_pca2(sub).transform(sub);
    std::vector<int> seq(static_cast<std::size_t>(i));
    std::iota(seq.begin(), seq.end(), 0);

    const Eigen::Index t = good.good.rows();
    double sum = 0.0;
    int counted = 0;
    for (Eigen::Index tech = 0; tech < t; ++tech) {
        std::vector<int> y(static_cast<std::size_t>(i));
        int pos = 0;
        for (Eigen::Index c = 0; c < i; ++c) {
            y[static_cast<std::size_t>(c)] =
                good.good(tech, canonical_order[static_cast<std::size_t>(c)]);
            pos += y[static_cast<std::size_t>(c)];
        }
        if (pos == 0 || pos == static_cast<int>(y.size())) {
            cs.technique_error.push_back(0.0);
            cs.technique_excluded.push_back(true);
            continue;
        }
        double err = forest::stratified_cv_error(
            Z, y, seq, rng.derive(0x7a00 + static_cast<std::uint64_t>(tech)), folds, n_trees);
        cs.technique_error.push_back(err);
        cs.technique_excluded.push_back(false);
        sum += err;
        ++counted;
    }
    cs.mean_error = counted ? sum / counted : 0.0;
    return cs;
}

// argmin of the mean error; ties go to the earlier candidate.
inline std::size_t select_features(const std::vector<CandidateScore>& scores) {
    if (scores.empty()) throw Error("select_features: no candidates");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i].mean_error < scores[best].mean_error) best = i;
    return best;
}

inline std::vector<int> canonical_instance_order(const std::vector<std::string>& ids) {
    std::vector<int> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return ids[static_cast<std::size_t>(a)] < ids[static_cast<std::size_t>(b)];
    });
    return order;
}

struct SelectionResult {
    FeatureClusterSet clusters;
    std::vector<CandidateScore> scores;
    std::size_t selected = 0;

    const std::vector<int>& selected_subset() const { return scores[selected].subset; }
};

// Full step-2 run over prepped metadata.
inline SelectionResult run_selection(const meta::Metadata& prepped,
                                     const meta::GoodnessMatrix& good, int k, std::size_t cap,
                                     std::uint64_t seed, int kmeans_restarts = 100,
                                     int folds = 5, int n_trees = 100) {
    Rng rng(seed);
    SelectionResult res;
    res.clusters = cluster_features(prepped.F, k, rng.derive(0x11), kmeans_restarts);
    auto candidates = enumerate_candidates(res.clusters, cap, rng.derive(0x22));
    auto order = canonical_instance_order(prepped.instance_ids);
    res.scores.reserve(candidates.size());
    for (std::size_t ci = 0; ci < candidates.size(); ++ci)
        res.scores.push_back(score_candidate(candidates[ci], prepped.F, good, order,
                                             rng.derive(0x33000 + ci), folds, n_trees));
    res.selected = select_features(res.scores);
    return res;
}

inline csv::Table report_table(const SelectionResult& res,
                               const std::vector<std::string>& feature_names,
                               const std::vector<std::string>& technique_names) {
    csv::Table t;
    t.header = {"candidate", "features"};
    for (const auto& tn : technique_names) t.header.push_back("error_" + tn);
    t.header.push_back("mean_error");
    t.header.push_back("selected");
    for (std::size_t i = 0; i < res.scores.size(); ++i) {
        const auto& s = res.scores[i];
        std::vector<std::string> row{std::to_string(i)};
        std::string feats;
        for (std::size_t j = 0; j < s.subset.size(); ++j)
            feats += (j ? ";" : "") + feature_names[static_cast<std::size_t>(s.subset[j])];
        row.push_back(feats);
        for (std::size_t j = 0; j < s.technique_error.size(); ++j)
            row.push_back(s.technique_excluded[j] ? "excluded" : fmt_full(s.technique_error[j]));
        row.push_back(fmt_full(s.mean_error));
        row.push_back(i == res.selected ? "1" : "0");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace isatk::featsel
