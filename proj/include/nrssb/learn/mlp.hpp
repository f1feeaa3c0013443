#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nrssb/learn/dataset.hpp"

namespace nrssb::learn {

struct MlpHyper {
    std::vector<int> hidden = {100, 100};
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int batch_size = 200;
    int epochs = 200;
    int patience = 10;        // early stop after this many epochs without improvement
    double min_delta = 1e-6;
    uint64_t seed = 1;
};

/// Two-hidden-layer perceptron, ReLU activations, softmax cross-entropy loss,
/// Adam updates. Prediction takes the argmax over the output pre-activations.
class MlpModel {
public:
    std::vector<Matrix> weights; // weights[l]: fan_out x fan_in
    std::vector<Vector> biases;
    MlpHyper hyper;
    int n_inputs = 0;
    int n_outputs = 0;
    std::vector<double> epoch_loss; // training curve

    static MlpModel zeros(int n_inputs, int n_outputs, const MlpHyper& hyper = {}) {
        MlpModel m;
        m.init_shape(n_inputs, n_outputs, hyper);
        return m;
    }

    void init_shape(int inputs, int outputs, const MlpHyper& hp) {
        hyper = hp;
        n_inputs = inputs;
        n_outputs = outputs;
        std::vector<int> sizes;
        sizes.push_back(inputs);
        for (int h : hp.hidden) sizes.push_back(h);
        sizes.push_back(outputs);
        weights.clear();
        biases.clear();
        for (size_t l = 0; l + 1 < sizes.size(); ++l) {
            weights.emplace_back(Matrix::Zero(sizes[l + 1], sizes[l]));
            biases.emplace_back(Vector::Zero(sizes[l + 1]));
        }
    }

    void init_random(Rng& rng) {
        for (auto& w : weights) {
            const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
        }
    }

    /// Output-layer pre-activations for one sample.
    Vector output(const Vector& x) const {
        if (x.size() != n_inputs) throw std::invalid_argument("mlp: feature length mismatch");
        Vector a = x;
        for (size_t l = 0; l < weights.size(); ++l) {
            a = (weights[l] * a + biases[l]).eval();
            if (l + 1 < weights.size()) a = a.cwiseMax(0.0); // ReLU on hidden layers
        }
        return a;
    }

    int predict(const Vector& x) const {
        const Vector z = output(x);
        int best = 0;
        for (Eigen::Index i = 1; i < z.size(); ++i)
            if (z(i) > z(best)) best = static_cast<int>(i);
        return best;
    }

    /// Softmax class scores; exists for the cross-entropy loss and reporting.
    Vector scores(const Vector& x) const {
        Vector z = output(x);
        const double zmax = z.maxCoeff();
        Vector e = (z.array() - zmax).exp();
        return e / e.sum();
    }

    /// Mean cross-entropy loss and parameter gradients over a batch (rows of x).
    double loss_and_grad(const Matrix& x, const Labels& y, std::vector<Matrix>& grad_w,
                         std::vector<Vector>& grad_b) const {
        const Eigen::Index m = x.rows();
        const size_t n_layers = weights.size();
        grad_w.resize(n_layers);
        grad_b.resize(n_layers);
        for (size_t l = 0; l < n_layers; ++l) {
            grad_w[l] = Matrix::Zero(weights[l].rows(), weights[l].cols());
            grad_b[l] = Vector::Zero(biases[l].size());
        }

        // batched forward: activations[l] holds layer-l outputs, samples as columns
        std::vector<Matrix> activations(n_layers + 1);
        activations[0] = x.transpose();
        for (size_t l = 0; l < n_layers; ++l) {
            Matrix z = (weights[l] * activations[l]).colwise() + biases[l];
            activations[l + 1] = (l + 1 < n_layers) ? z.cwiseMax(0.0).eval() : z;
        }

        // softmax + cross-entropy
        Matrix& out = activations[n_layers];
        Matrix prob = out;
        double loss = 0.0;
        for (Eigen::Index c = 0; c < m; ++c) {
            const double zmax = out.col(c).maxCoeff();
            Vector e = (out.col(c).array() - zmax).exp();
            const double denom = e.sum();
            prob.col(c) = e / denom;
            loss -= std::log(std::max(prob(y(c), c), 1e-300));
        }
        loss /= static_cast<double>(m);

        // backward
        Matrix delta = prob;
        for (Eigen::Index c = 0; c < m; ++c) delta(y(c), c) -= 1.0;
        delta /= static_cast<double>(m);
        for (size_t l = n_layers; l-- > 0;) {
            grad_w[l] = delta * activations[l].transpose();
            grad_b[l] = delta.rowwise().sum();
            if (l > 0) {
                delta = (weights[l].transpose() * delta).eval();
                delta = delta.array() * (activations[l].array() > 0.0).cast<double>();
            }
        }
        return loss;
    }
};

inline MlpModel mlp_train(const Dataset& ds, const MlpHyper& hyper = {}) {
    if (ds.size() == 0) throw data_error("mlp_train: empty dataset");
    MlpModel model;
    model.init_shape(static_cast<int>(ds.x.cols()), ds.n_classes, hyper);
    Rng init_rng(stream_seed(hyper.seed, 0x417Full));
    model.init_random(init_rng);

    const Eigen::Index n = ds.x.rows();
    std::vector<int> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);

    // Adam state
    std::vector<Matrix> mw, vw;
    std::vector<Vector> mb, vb;
    for (size_t l = 0; l < model.weights.size(); ++l) {
        mw.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
        vw.push_back(Matrix::Zero(model.weights[l].rows(), model.weights[l].cols()));
        mb.push_back(Vector::Zero(model.biases[l].size()));
        vb.push_back(Vector::Zero(model.biases[l].size()));
    }
    long step = 0;

    double best_loss = std::numeric_limits<double>::infinity();
    int stale = 0;
    std::vector<Matrix> gw;
    std::vector<Vector> gb;

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        Rng rng(stream_seed(hyper.seed, 0xE0000ull + static_cast<uint64_t>(epoch)));
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        double epoch_loss = 0.0;
        int n_batches = 0;
        for (Eigen::Index start = 0; start < n; start += hyper.batch_size) {
            const Eigen::Index bsz = std::min<Eigen::Index>(hyper.batch_size, n - start);
            Matrix bx(bsz, ds.x.cols());
            Labels by(bsz);
            for (Eigen::Index i = 0; i < bsz; ++i) {
                bx.row(i) = ds.x.row(order[static_cast<size_t>(start + i)]);
                by(i) = ds.y(order[static_cast<size_t>(start + i)]);
            }
            const double loss = model.loss_and_grad(bx, by, gw, gb);
            if (!std::isfinite(loss))
                throw std::runtime_error("mlp_train: loss diverged to NaN/inf at epoch " +
                                         std::to_string(epoch));
            epoch_loss += loss;
            ++n_batches;

            ++step;
            const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
            for (size_t l = 0; l < model.weights.size(); ++l) {
                mw[l] = hyper.beta1 * mw[l] + (1.0 - hyper.beta1) * gw[l];
                vw[l] = hyper.beta2 * vw[l] + (1.0 - hyper.beta2) * gw[l].cwiseProduct(gw[l]);
                model.weights[l].array() -= hyper.learning_rate * (mw[l].array() / bc1) /
                                            ((vw[l].array() / bc2).sqrt() + hyper.epsilon);
                mb[l] = hyper.beta1 * mb[l] + (1.0 - hyper.beta1) * gb[l];
                vb[l] = hyper.beta2 * vb[l] + (1.0 - hyper.beta2) * gb[l].cwiseProduct(gb[l]);
                model.biases[l].array() -= hyper.learning_rate * (mb[l].array() / bc1) /
                                           ((vb[l].array() / bc2).sqrt() + hyper.epsilon);
            }
        }
        epoch_loss /= static_cast<double>(n_batches);
        model.epoch_loss.push_back(epoch_loss);

        if (epoch_loss < best_loss - hyper.min_delta) {
            best_loss = epoch_loss;
            stale = 0;
        } else if (++stale >= hyper.patience) {
            break; // loss plateau
        }
    }
    return model;
}

inline int mlp_predict(const MlpModel& model, const Vector& x) { return model.predict(x); }

} // namespace nrssb::learn
