#pragma once

#include "nrssb/learn/lbfgs.hpp"

namespace nrssb::learn {

struct LogRegHyper {
    double l2 = 1e-4; // regularization weight (bias excluded)
    LbfgsOptions lbfgs;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// One-vs-rest logistic regression; theta rows are [bias, weights...].
struct LogRegModel {
    Matrix theta; // n_classes x (n_features + 1)
    LogRegHyper hyper;
    int line_search_failures = 0;

    double score(int cls, const Vector& x) const {
        if (x.size() + 1 != theta.cols())
            throw std::invalid_argument("logreg: feature length mismatch");
        return sigmoid(theta(cls, 0) + theta.row(cls).tail(x.size()).dot(x));
    }

    int predict(const Vector& x) const {
        int best = 0;
        double best_score = score(0, x);
        for (int c = 1; c < theta.rows(); ++c) {
            const double s = score(c, x);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        return best;
    }
};

/// Regularized binary cross-entropy and its gradient for one one-vs-rest
/// problem. y holds 0/1 targets; theta(0) is the unregularized bias.
inline double logreg_objective(const Matrix& x, const Vector& y01, double l2, const Vector& theta,
                               Vector& grad) {
    const Eigen::Index n = x.rows();
    Vector z = (x * theta.tail(x.cols())).array() + theta(0);
    double loss = 0.0;
    Vector resid(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = sigmoid(z(i));
        loss -= y01(i) * std::log(std::max(p, 1e-300)) +
                (1.0 - y01(i)) * std::log(std::max(1.0 - p, 1e-300));
        resid(i) = p - y01(i);
    }
    loss /= static_cast<double>(n);
    loss += 0.5 * l2 * theta.tail(theta.size() - 1).squaredNorm();

    grad.resize(theta.size());
    grad(0) = resid.sum() / static_cast<double>(n);
    grad.tail(theta.size() - 1) =
        (x.transpose() * resid) / static_cast<double>(n) + l2 * theta.tail(theta.size() - 1);
    return loss;
}

inline LogRegModel logreg_train(const Dataset& ds, const LogRegHyper& hyper = {}) {
    if (ds.size() == 0) throw data_error("logreg_train: empty dataset");
    LogRegModel model;
    model.hyper = hyper;
    model.theta = Matrix::Zero(ds.n_classes, ds.x.cols() + 1);
    for (int c = 0; c < ds.n_classes; ++c) {
        Vector y01(ds.y.size());
        for (Eigen::Index i = 0; i < ds.y.size(); ++i) y01(i) = ds.y(i) == c ? 1.0 : 0.0;
        auto obj = [&](const Vector& th, Vector& g) {
            return logreg_objective(ds.x, y01, hyper.l2, th, g);
        };
        const auto res = lbfgs_minimize(obj, Vector::Zero(ds.x.cols() + 1), hyper.lbfgs);
        model.theta.row(c) = res.x;
        model.line_search_failures += res.line_search_failures;
    }
    return model;
}

inline int logreg_predict(const LogRegModel& model, const Vector& x) { return model.predict(x); }

} // namespace nrssb::learn
