#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "isatk/common.hpp"

namespace isatk::forest {

// CART-style classification tree on 2D inputs, Gini impurity, unlimited
// depth, one random coordinate considered per split (sqrt of 2 features).
class DecisionTree {
public:
    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
             const std::vector<int>& sample_idx, Rng& rng) {
        nodes_.clear();
        build(X, y, sample_idx, rng);
    }

    int predict(double z1, double z2) const {
        int cur = 0;
        while (nodes_[static_cast<std::size_t>(cur)].feature >= 0) {
            const Node& nd = nodes_[static_cast<std::size_t>(cur)];
            double v = nd.feature == 0 ? z1 : z2;
            cur = v <= nd.threshold ? nd.left : nd.right;
        }
        return nodes_[static_cast<std::size_t>(cur)].label;
    }

private:
    struct Node {
        int feature = -1;  // -1: leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        int label = 0;
    };
    std::vector<Node> nodes_;

    static double gini(int n1, int n) {
        if (n == 0) return 0.0;
        double p = static_cast<double>(n1) / n;
        return 2.0 * p * (1.0 - p);
    }

    int build(const Eigen::MatrixXd& X, const std::vector<int>& y,
              const std::vector<int>& idx, Rng& rng) {
        int node_id = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        int pos = 0;
        for (int i : idx) pos += y[static_cast<std::size_t>(i)];
        const int n = static_cast<int>(idx.size());
        if (pos == 0 || pos == n || n < 2) {
            nodes_[static_cast<std::size_t>(node_id)].label = 2 * pos > n ? 1 : 0;
            return node_id;
        }

        int feat = static_cast<int>(rng.index(2));
        std::vector<int> order(idx);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return X(feat, a) < X(feat, b);
        });
        // best threshold between consecutive distinct values
        double parent = gini(pos, n);
        double best_gain = 1e-12;
        double best_thr = 0.0;
        int left_pos = 0;
        bool found = false;
        for (int i = 0; i < n - 1; ++i) {
            left_pos += y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            double v0 = X(feat, order[static_cast<std::size_t>(i)]);
            double v1 = X(feat, order[static_cast<std::size_t>(i + 1)]);
            if (v0 == v1) continue;
            int nl = i + 1, nr = n - nl;
            double child = (nl * gini(left_pos, nl) + nr * gini(pos - left_pos, nr)) / n;
            double gain = parent - child;
            if (gain > best_gain) {
                best_gain = gain;
                best_thr = v0 + 0.5 * (v1 - v0);
                found = true;
            }
        }
        if (!found) {
            nodes_[static_cast<std::size_t>(node_id)].label = 2 * pos > n ? 1 : 0;
            return node_id;
        }
        std::vector<int> li, ri;
        for (int i : idx)
            (X(feat, i) <= best_thr ? li : ri).push_back(i);
        nodes_[static_cast<std::size_t>(node_id)].feature = feat;
        nodes_[static_cast<std::size_t>(node_id)].threshold = best_thr;
        int l = build(X, y, li, rng);
        int r = build(X, y, ri, rng);
        nodes_[static_cast<std::size_t>(node_id)].left = l;
        nodes_[static_cast<std::size_t>(node_id)].right = r;
        return node_id;
    }
};

class RandomForest {
public:
    void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
             const std::vector<int>& train_idx, Rng rng, int n_trees = 100) {
        trees_.assign(static_cast<std::size_t>(n_trees), {});
        const std::size_t n = train_idx.size();
        for (int t = 0; t < n_trees; ++t) {
            Rng tr = rng.derive(static_cast<std::uint64_t>(t));
            std::vector<int> boot(n);
            for (std::size_t i = 0; i < n; ++i) boot[i] = train_idx[tr.index(n)];
            trees_[static_cast<std::size_t>(t)].fit(X, y, boot, tr);
        }
    }

    int predict(double z1, double z2) const {
        int votes = 0;
        for (const auto& t : trees_) votes += t.predict(z1, z2);
        return 2 * votes > static_cast<int>(trees_.size()) ? 1 : 0;
    }

private:
    std::vector<DecisionTree> trees_;
};

// Stratified k-fold cross-validated misclassification rate. `order` must be a
// canonical instance ordering (the caller sorts by instance id) so the result
// is independent of file order.
inline double stratified_cv_error(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                  const std::vector<int>& order, Rng rng, int folds = 5,
                                  int n_trees = 100) {
    std::vector<int> pos, neg;
    for (int i : order)
        (y[static_cast<std::size_t>(i)] ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw Error("stratified_cv_error: labels are single-class");
    Rng shuffle_rng = rng.derive(0x5f01);
    shuffle_rng.shuffle(pos);
    shuffle_rng.shuffle(neg);
    const int k = std::max(2, std::min(folds, static_cast<int>(order.size())));
    std::vector<std::vector<int>> fold(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < pos.size(); ++i)
        fold[i % static_cast<std::size_t>(k)].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i)
        fold[i % static_cast<std::size_t>(k)].push_back(neg[i]);

    int errors = 0, total = 0;
    for (int f = 0; f < k; ++f) {
        std::vector<int> train;
        for (int g = 0; g < k; ++g)
            if (g != f) train.insert(train.end(), fold[static_cast<std::size_t>(g)].begin(),
                                     fold[static_cast<std::size_t>(g)].end());
        if (train.empty() || fold[static_cast<std::size_t>(f)].empty()) continue;
        RandomForest rf;
        rf.fit(X, y, train, rng.derive(0x600 + static_cast<std::uint64_t>(f)), n_trees);
        for (int i : fold[static_cast<std::size_t>(f)]) {
            errors += rf.predict(X(0, i), X(1, i)) != y[static_cast<std::size_t>(i)];
            ++total;
        }
    }
    if (total == 0) throw Error("stratified_cv_error: no evaluable folds");
    return static_cast<double>(errors) / static_cast<double>(total);
}

}  // namespace isatk::forest
