#pragma once

#include "nrssb/learn/forest.hpp"
#include "nrssb/learn/logreg.hpp"
#include "nrssb/learn/mlp.hpp"
#include "nrssb/learn/svc.hpp"

namespace nrssb::learn {

/// Hard majority vote over the four trained classifiers.
/// Ties break to the lowest class index among the tied classes.
struct VotingModel {
    const MlpModel* mlp = nullptr;
    const LogRegModel* logreg = nullptr;
    const SvcModel* svc = nullptr;
    const ForestModel* forest = nullptr;

    int predict(const Vector& x) const {
        if (!mlp || !logreg || !svc || !forest)
            throw std::logic_error("vote: all four member models must be present");
        const int preds[4] = {mlp->predict(x), logreg->predict(x), svc->predict(x),
                              forest->predict(x)};
        int counts[1024] = {};
        int max_cls = 0;
        for (int p : preds) {
            ++counts[p];
            max_cls = std::max(max_cls, p);
        }
        int best = preds[0];
        int best_count = 0;
        for (int c = 0; c <= max_cls; ++c) {
            if (counts[c] > best_count) {
                best_count = counts[c];
                best = c;
            }
        }
        return best;
    }
};

inline int vote_predict(const VotingModel& model, const Vector& x) { return model.predict(x); }

} // namespace nrssb::learn
