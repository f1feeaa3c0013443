#pragma once

#include <future>
#include <numeric>

#include "nrssb/learn/dataset.hpp"

namespace nrssb::learn {

struct ForestHyper {
    int n_trees = 100;
    int max_depth = 100;
    int min_samples = 2;
    int mtry = 0; // 0: round(sqrt(n_features))
    uint64_t seed = 1;
};

/// Gini impurity of a class-count histogram.
inline double gini(const std::vector<int>& counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total <= 0.0) return 0.0;
    double acc = 1.0;
    for (int c : counts) {
        const double p = c / total;
        acc -= p * p;
    }
    return acc;
}

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_class = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict(const Vector& x) const {
        int node = 0;
        while (nodes[node].feature >= 0) {
            node = x(nodes[node].feature) <= nodes[node].threshold ? nodes[node].left
                                                                   : nodes[node].right;
        }
        return nodes[node].leaf_class;
    }
};

namespace detail {

inline int majority_class(const std::vector<int>& counts) {
    int best = 0;
    for (size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = static_cast<int>(c);
    return best;
}

struct TreeBuilder {
    const Matrix& x;
    const Labels& y;
    int n_classes;
    const ForestHyper& hyper;
    int mtry;
    Rng rng;
    Tree tree;

    int build(std::vector<int>& idx, int begin, int end, int depth) {
        std::vector<int> counts(n_classes, 0);
        for (int i = begin; i < end; ++i) ++counts[y(idx[i])];
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        const double node_gini = gini(counts);
        const int n = end - begin;
        if (node_gini == 0.0 || n < hyper.min_samples || depth >= hyper.max_depth) {
            tree.nodes[node_id].leaf_class = majority_class(counts);
            return node_id;
        }

        // best gini split over mtry random candidate features
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = node_gini;
        std::vector<std::pair<double, int>> vals(n);
        for (int t = 0; t < mtry; ++t) {
            const int f = static_cast<int>(rng.below(static_cast<uint64_t>(x.cols())));
            for (int i = 0; i < n; ++i) {
                vals[i] = {x(idx[begin + i], f), y(idx[begin + i])};
            }
            std::sort(vals.begin(), vals.end());
            std::vector<int> left_counts(n_classes, 0);
            std::vector<int> right_counts = counts;
            for (int i = 0; i + 1 < n; ++i) {
                ++left_counts[vals[i].second];
                --right_counts[vals[i].second];
                if (vals[i].first == vals[i + 1].first) continue;
                const double nl = i + 1;
                const double nr = n - nl;
                const double impurity =
                    (nl * gini(left_counts) + nr * gini(right_counts)) / static_cast<double>(n);
                if (impurity < best_impurity - 1e-12) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_feature < 0) {
            tree.nodes[node_id].leaf_class = majority_class(counts);
            return node_id;
        }

        const auto mid = std::partition(idx.begin() + begin, idx.begin() + end, [&](int i) {
            return x(i, best_feature) <= best_threshold;
        });
        const int split = static_cast<int>(mid - idx.begin());
        if (split == begin || split == end) { // numeric ties defeated the partition
            tree.nodes[node_id].leaf_class = majority_class(counts);
            return node_id;
        }
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const int left = build(idx, begin, split, depth + 1);
        const int right = build(idx, split, end, depth + 1);
        tree.nodes[node_id].left = left;
        tree.nodes[node_id].right = right;
        return node_id;
    }
};

} // namespace detail

struct ForestModel {
    std::vector<Tree> trees;
    int n_classes = 0;
    ForestHyper hyper;
    double oob_accuracy = -1.0; // -1 when no sample was ever out-of-bag

    int predict(const Vector& x) const {
        std::vector<int> votes(n_classes, 0);
        for (const auto& tree : trees) ++votes[tree.predict(x)];
        return detail::majority_class(votes);
    }
};

inline ForestModel forest_train(const Dataset& ds, const ForestHyper& hyper = {}) {
    if (ds.size() == 0) throw data_error("forest_train: empty dataset");
    const int n = static_cast<int>(ds.size());
    const int mtry = hyper.mtry > 0
                         ? hyper.mtry
                         : static_cast<int>(std::lround(std::sqrt(static_cast<double>(ds.x.cols()))));

    struct GrownTree {
        Tree tree;
        std::vector<uint8_t> in_bag;
    };
    auto grow = [&](int t) {
        detail::TreeBuilder builder{ds.x, ds.y, ds.n_classes, hyper, mtry,
                                    Rng(stream_seed(hyper.seed, 0xF0BE5700ull + static_cast<uint64_t>(t))),
                                    Tree{}};
        GrownTree grown;
        grown.in_bag.assign(static_cast<size_t>(n), 0);
        std::vector<int> idx(static_cast<size_t>(n));
        for (auto& i : idx) {
            i = static_cast<int>(builder.rng.below(static_cast<uint64_t>(n)));
            grown.in_bag[static_cast<size_t>(i)] = 1;
        }
        builder.build(idx, 0, n, 0);
        grown.tree = std::move(builder.tree);
        return grown;
    };

    std::vector<std::future<GrownTree>> futs;
    futs.reserve(static_cast<size_t>(hyper.n_trees));
    for (int t = 0; t < hyper.n_trees; ++t)
        futs.push_back(std::async(std::launch::async, grow, t));

    ForestModel model;
    model.n_classes = ds.n_classes;
    model.hyper = hyper;
    std::vector<std::vector<int>> oob_votes(static_cast<size_t>(n),
                                            std::vector<int>(ds.n_classes, 0));
    for (auto& fut : futs) {
        GrownTree grown = fut.get();
        for (int i = 0; i < n; ++i) {
            if (!grown.in_bag[static_cast<size_t>(i)])
                ++oob_votes[static_cast<size_t>(i)][grown.tree.predict(ds.x.row(i).transpose())];
        }
        model.trees.push_back(std::move(grown.tree));
    }

    int oob_total = 0, oob_correct = 0;
    for (int i = 0; i < n; ++i) {
        const auto& votes = oob_votes[static_cast<size_t>(i)];
        if (std::accumulate(votes.begin(), votes.end(), 0) == 0) continue;
        ++oob_total;
        if (detail::majority_class(votes) == ds.y(i)) ++oob_correct;
    }
    if (oob_total > 0) model.oob_accuracy = static_cast<double>(oob_correct) / oob_total;
    return model;
}

inline int forest_predict(const ForestModel& model, const Vector& x) { return model.predict(x); }

} // namespace nrssb::learn
