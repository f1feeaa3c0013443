#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "nrssb/common.hpp"
#include "nrssb/detect.hpp"
#include "nrssb/rng.hpp"

namespace nrssb::learn {

using Matrix = Eigen::MatrixXd; // samples x features
using Vector = Eigen::VectorXd;
using Labels = Eigen::VectorXi;

/// Labeled feature vectors with a reproducible stratified train/test split.
struct Dataset {
    Matrix x;  // n x 288
    Labels y;  // n
    int n_classes = 8;

    size_t size() const { return static_cast<size_t>(x.rows()); }
};

inline Dataset make_dataset(const std::vector<detect::DmrsFeatureVector>& vectors, int n_classes) {
    if (vectors.empty()) throw data_error("dataset: empty");
    Dataset ds;
    ds.n_classes = n_classes;
    ds.x.resize(static_cast<Eigen::Index>(vectors.size()), detect::kFeatureCount);
    ds.y.resize(static_cast<Eigen::Index>(vectors.size()));
    for (size_t i = 0; i < vectors.size(); ++i) {
        const auto& v = vectors[i];
        if (!v.label) throw data_error("dataset: unlabeled vector");
        if (v.x.size() != detect::kFeatureCount) throw data_error("dataset: bad feature count");
        for (int j = 0; j < detect::kFeatureCount; ++j) ds.x(static_cast<Eigen::Index>(i), j) = v.x[j];
        ds.y(static_cast<Eigen::Index>(i)) = *v.label;
    }
    return ds;
}

struct Split {
    std::vector<int> train;
    std::vector<int> test;
};

/// Stratified split: per-class shuffle, then round(n_c * train_frac) samples
/// to the train side. Keeps the per-class train fraction within one sample.
inline Split stratified_split(const Labels& y, double train_frac, uint64_t seed) {
    std::map<int, std::vector<int>> by_class;
    for (Eigen::Index i = 0; i < y.size(); ++i) by_class[y(i)].push_back(static_cast<int>(i));
    Split split;
    Rng rng(stream_seed(seed, 0x5711ull));
    for (auto& [cls, idx] : by_class) {
        for (size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.below(i)]);
        }
        const size_t n_train = static_cast<size_t>(static_cast<double>(idx.size()) * train_frac + 0.5);
        for (size_t i = 0; i < idx.size(); ++i) {
            (i < n_train ? split.train : split.test).push_back(idx[i]);
        }
    }
    return split;
}

inline Dataset subset(const Dataset& ds, const std::vector<int>& idx) {
    Dataset out;
    out.n_classes = ds.n_classes;
    out.x.resize(static_cast<Eigen::Index>(idx.size()), ds.x.cols());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) {
        out.x.row(static_cast<Eigen::Index>(i)) = ds.x.row(idx[i]);
        out.y(static_cast<Eigen::Index>(i)) = ds.y(idx[i]);
    }
    return out;
}

/// FNV-1a over the raw feature bytes and labels; used as training provenance.
inline uint64_t dataset_hash(const Dataset& ds) {
    uint64_t h = 1469598103934665603ULL;
    auto fold = [&h](const void* p, size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
            const double v = ds.x(i, j);
            fold(&v, sizeof(v));
        }
        const int32_t label = ds.y(i);
        fold(&label, sizeof(label));
    }
    return h;
}

} // namespace nrssb::learn
