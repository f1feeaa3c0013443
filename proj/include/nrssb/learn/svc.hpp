#pragma once

#include <future>
#include <list>
#include <unordered_map>

#include "nrssb/learn/dataset.hpp"

namespace nrssb::learn {

enum class SvcKernel { rbf, linear };

struct SvcHyper {
    double c = 1.0;
    double gamma = -1.0; // <=0: 1 / (n_features * feature variance)
    double tol = 1e-3;   // KKT stopping tolerance
    SvcKernel kernel = SvcKernel::rbf;
    long max_iter_per_n = 200; // iteration cap = max(100000, max_iter_per_n * n)
    size_t cache_bytes = 256ull << 20;
};

namespace detail {

// on-demand kernel rows with FIFO eviction
class KernelCache {
public:
    KernelCache(const Matrix& x, const Vector& xsq, double gamma, SvcKernel kernel,
                size_t cache_bytes)
        : x_(x), xsq_(xsq), gamma_(gamma), kernel_(kernel) {
        const size_t row_bytes = static_cast<size_t>(x.rows()) * sizeof(double);
        capacity_ = std::max<size_t>(2, cache_bytes / std::max<size_t>(1, row_bytes));
    }

    const Vector& row(int i) {
        auto it = rows_.find(i);
        if (it != rows_.end()) return it->second;
        if (rows_.size() >= capacity_) {
            rows_.erase(order_.front());
            order_.pop_front();
        }
        Vector k = x_ * x_.row(i).transpose();
        if (kernel_ == SvcKernel::rbf) {
            k = (-gamma_ * (xsq_.array() + xsq_(i) - 2.0 * k.array())).exp();
        }
        auto [pos, inserted] = rows_.emplace(i, std::move(k));
        order_.push_back(i);
        return pos->second;
    }

private:
    const Matrix& x_;
    const Vector& xsq_;
    double gamma_;
    SvcKernel kernel_;
    size_t capacity_;
    std::unordered_map<int, Vector> rows_;
    std::list<int> order_;
};

struct BinarySolution {
    std::vector<std::pair<int, double>> alpha_y; // (sample index, alpha_i * y_i), alpha > 0
    double bias = 0.0;
    double kkt_gap = 0.0;
    bool converged = true;
    long iterations = 0;
};

/// SMO with maximal-violating-pair working set selection on the standard dual:
/// min 1/2 a'Qa - sum a, 0 <= a <= C, y'a = 0.
inline BinarySolution smo_solve(const Matrix& x, const std::vector<int8_t>& y,
                                const SvcHyper& hyper, double gamma) {
    const int n = static_cast<int>(x.rows());
    Vector xsq(n);
    for (int i = 0; i < n; ++i) xsq(i) = x.row(i).squaredNorm();
    KernelCache cache(x, xsq, gamma, hyper.kernel, hyper.cache_bytes);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0); // dual gradient: y_i*u_i - 1
    const double c = hyper.c;
    const long max_iter = std::max<long>(100000, hyper.max_iter_per_n * n);

    BinarySolution sol;
    double gap = std::numeric_limits<double>::infinity();
    long iter = 0;
    for (; iter < max_iter; ++iter) {
        int i = -1, j = -1;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n; ++k) {
            const double v = -y[k] * grad[k];
            const bool in_up = (y[k] > 0 && alpha[k] < c) || (y[k] < 0 && alpha[k] > 0);
            const bool in_low = (y[k] > 0 && alpha[k] > 0) || (y[k] < 0 && alpha[k] < c);
            if (in_up && v > m_up) {
                m_up = v;
                i = k;
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = k;
            }
        }
        gap = m_up - m_low;
        if (gap < hyper.tol || i < 0 || j < 0) break;

        const Vector& ki = cache.row(i);
        const Vector& kj = cache.row(j);
        double quad = ki(i) + kj(j) - 2.0 * ki(j);
        if (quad <= 1e-12) quad = 1e-12;

        // two-variable analytic step with box clipping
        const double s = static_cast<double>(y[i]) * y[j];
        const double aj_old = alpha[j];
        const double ai_old = alpha[i];
        double aj = aj_old + y[j] * (y[i] * grad[i] - y[j] * grad[j]) / quad;
        double lo, hi;
        if (s > 0) {
            lo = std::max(0.0, ai_old + aj_old - c);
            hi = std::min(c, ai_old + aj_old);
        } else {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c, c + aj_old - ai_old);
        }
        aj = std::clamp(aj, lo, hi);
        double ai = ai_old + s * (aj_old - aj);
        // snap to the box: round-off residuals (~1e-17) would otherwise make a
        // bound variable look movable and stall the pair selection
        const double snap = 1e-10 * c;
        if (aj < snap) aj = 0.0;
        else if (aj > c - snap) aj = c;
        if (ai < snap) ai = 0.0;
        else if (ai > c - snap) ai = c;
        alpha[i] = ai;
        alpha[j] = aj;

        const double di = (ai - ai_old) * y[i];
        const double dj = (aj - aj_old) * y[j];
        for (int k = 0; k < n; ++k) grad[k] += y[k] * (di * ki(k) + dj * kj(k));
    }
    sol.iterations = iter;
    sol.kkt_gap = gap;
    sol.converged = gap < hyper.tol;

    // bias from the free support vectors; fall back to the violation midpoint
    double b_sum = 0.0;
    int b_count = 0;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const double v = -y[k] * grad[k];
        if (alpha[k] > 0.0 && alpha[k] < c) {
            b_sum += v;
            ++b_count;
        }
        const bool in_up = (y[k] > 0 && alpha[k] < c) || (y[k] < 0 && alpha[k] > 0);
        const bool in_low = (y[k] > 0 && alpha[k] > 0) || (y[k] < 0 && alpha[k] < c);
        if (in_up) m_up = std::max(m_up, v);
        if (in_low) m_low = std::min(m_low, v);
    }
    sol.bias = b_count > 0 ? b_sum / b_count : (m_up + m_low) / 2.0;

    for (int k = 0; k < n; ++k) {
        if (alpha[k] > 0.0) sol.alpha_y.emplace_back(k, alpha[k] * y[k]);
    }
    return sol;
}

} // namespace detail

/// One-vs-rest SVC with an RBF kernel. Support vectors are stored once as the
/// union over the per-class problems.
struct SvcModel {
    Matrix support; // union of support vectors, rows
    std::vector<std::vector<std::pair<int, double>>> alpha_y; // per class: (row in support, a*y)
    std::vector<double> bias;
    double gamma = 0.0;
    SvcHyper hyper;
    double worst_kkt_gap = 0.0;
    bool converged = true;

    Vector kernel_against_support(const Vector& x) const {
        Vector k = support * x;
        if (hyper.kernel == SvcKernel::rbf) {
            Vector sq = support.rowwise().squaredNorm();
            k = (-gamma * (sq.array() + x.squaredNorm() - 2.0 * k.array())).exp();
        }
        return k;
    }

    double decision(int cls, const Vector& k_row) const {
        double acc = bias[cls];
        for (const auto& [idx, ay] : alpha_y[cls]) acc += ay * k_row(idx);
        return acc;
    }

    int predict(const Vector& x) const {
        const Vector k = kernel_against_support(x);
        int best = 0;
        double best_score = decision(0, k);
        for (size_t c = 1; c < alpha_y.size(); ++c) {
            const double s = decision(static_cast<int>(c), k);
            if (s > best_score) {
                best_score = s;
                best = static_cast<int>(c);
            }
        }
        return best;
    }
};

inline double svc_default_gamma(const Matrix& x) {
    const Vector mean = x.colwise().mean();
    const double var =
        (x.rowwise() - mean.transpose()).squaredNorm() / static_cast<double>(x.size());
    return var > 1e-30 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
}

inline SvcModel svc_train(const Dataset& ds, const SvcHyper& hyper = {}) {
    if (ds.size() == 0) throw data_error("svc_train: empty dataset");
    const double gamma = hyper.gamma > 0.0 ? hyper.gamma : svc_default_gamma(ds.x);

    std::vector<std::future<detail::BinarySolution>> futs;
    for (int c = 0; c < ds.n_classes; ++c) {
        futs.push_back(std::async(std::launch::async, [&, c] {
            std::vector<int8_t> y(ds.size());
            for (Eigen::Index i = 0; i < ds.y.size(); ++i)
                y[static_cast<size_t>(i)] = ds.y(i) == c ? int8_t{1} : int8_t{-1};
            return detail::smo_solve(ds.x, y, hyper, gamma);
        }));
    }
    std::vector<detail::BinarySolution> sols;
    for (auto& f : futs) sols.push_back(f.get());

    SvcModel model;
    model.hyper = hyper;
    model.gamma = gamma;

    // compact the union of support vectors
    std::vector<int> remap(ds.size(), -1);
    std::vector<int> union_rows;
    for (const auto& sol : sols) {
        for (const auto& [idx, ay] : sol.alpha_y) {
            (void)ay;
            if (remap[idx] < 0) {
                remap[idx] = static_cast<int>(union_rows.size());
                union_rows.push_back(idx);
            }
        }
    }
    model.support.resize(static_cast<Eigen::Index>(union_rows.size()), ds.x.cols());
    for (size_t r = 0; r < union_rows.size(); ++r)
        model.support.row(static_cast<Eigen::Index>(r)) = ds.x.row(union_rows[r]);

    for (const auto& sol : sols) {
        std::vector<std::pair<int, double>> mapped;
        mapped.reserve(sol.alpha_y.size());
        for (const auto& [idx, ay] : sol.alpha_y) mapped.emplace_back(remap[idx], ay);
        model.alpha_y.push_back(std::move(mapped));
        model.bias.push_back(sol.bias);
        model.worst_kkt_gap = std::max(model.worst_kkt_gap, sol.kkt_gap);
        model.converged = model.converged && sol.converged;
    }
    return model;
}

inline int svc_predict(const SvcModel& model, const Vector& x) { return model.predict(x); }

/// Batch prediction; one GEMM against the support set instead of per-sample loops.
inline Labels svc_predict_batch(const SvcModel& model, const Matrix& x) {
    Matrix k = x * model.support.transpose(); // n x n_sv
    if (model.hyper.kernel == SvcKernel::rbf) {
        const Vector ssq = model.support.rowwise().squaredNorm();
        const Vector xsq = x.rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < k.rows(); ++i)
            k.row(i) = (-model.gamma * (ssq.transpose().array() + xsq(i) - 2.0 * k.row(i).array()))
                           .exp();
    }
    Labels out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < model.alpha_y.size(); ++c) {
            double acc = model.bias[c];
            for (const auto& [idx, ay] : model.alpha_y[c]) acc += ay * k(i, idx);
            if (acc > best_score) {
                best_score = acc;
                best = static_cast<int>(c);
            }
        }
        out(i) = best;
    }
    return out;
}

} // namespace nrssb::learn
