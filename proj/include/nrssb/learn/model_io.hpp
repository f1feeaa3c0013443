#pragma once

#include <cstring>
#include <fstream>
#include <variant>

#include "nrssb/learn/forest.hpp"
#include "nrssb/learn/logreg.hpp"
#include "nrssb/learn/mlp.hpp"
#include "nrssb/learn/svc.hpp"

namespace nrssb::learn {

enum class ModelKind : uint8_t { mlp = 1, logreg = 2, svc = 3, forest = 4 };

inline const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::mlp: return "mlp";
        case ModelKind::logreg: return "logreg";
        case ModelKind::svc: return "svc";
        case ModelKind::forest: return "forest";
    }
    return "?";
}

/// Training provenance carried inside every model file.
struct ModelProvenance {
    uint64_t dataset_hash = 0;
    uint64_t train_size = 0;
    double train_snr_db = std::numeric_limits<double>::quiet_NaN();
    bool normalized = false;
    double np_factor = 1.0; // N_p the features were divided by (sqrt) at train time
};

struct TrainedModel {
    ModelKind kind = ModelKind::mlp;
    ModelProvenance provenance;
    std::variant<MlpModel, LogRegModel, SvcModel, ForestModel> model;

    int predict(const Vector& x) const {
        return std::visit([&](const auto& m) { return m.predict(x); }, model);
    }
};

namespace detail {

inline constexpr char kModelMagic[4] = {'N', 'R', 'M', 'L'};
inline constexpr uint32_t kModelVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& is) {
    T v;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw data_error("model file truncated");
    return v;
}

inline void put_matrix(std::ostream& os, const Matrix& m) {
    put<uint64_t>(os, static_cast<uint64_t>(m.rows()));
    put<uint64_t>(os, static_cast<uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) put<double>(os, m(i, j));
}

inline Matrix get_matrix(std::istream& is) {
    const auto rows = get<uint64_t>(is);
    const auto cols = get<uint64_t>(is);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = get<double>(is);
    return m;
}

inline void put_vector(std::ostream& os, const Vector& v) {
    put<uint64_t>(os, static_cast<uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(os, v(i));
}

inline Vector get_vector(std::istream& is) {
    const auto n = get<uint64_t>(is);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = get<double>(is);
    return v;
}

inline void write_mlp(std::ostream& os, const MlpModel& m) {
    put<int32_t>(os, m.n_inputs);
    put<int32_t>(os, m.n_outputs);
    put<double>(os, m.hyper.learning_rate);
    put<double>(os, m.hyper.beta1);
    put<double>(os, m.hyper.beta2);
    put<double>(os, m.hyper.epsilon);
    put<int32_t>(os, m.hyper.batch_size);
    put<int32_t>(os, m.hyper.epochs);
    put<uint64_t>(os, m.hyper.seed);
    put<uint32_t>(os, static_cast<uint32_t>(m.weights.size()));
    for (size_t l = 0; l < m.weights.size(); ++l) {
        put_matrix(os, m.weights[l]);
        put_vector(os, m.biases[l]);
    }
}

inline MlpModel read_mlp(std::istream& is) {
    MlpModel m;
    m.n_inputs = get<int32_t>(is);
    m.n_outputs = get<int32_t>(is);
    m.hyper.learning_rate = get<double>(is);
    m.hyper.beta1 = get<double>(is);
    m.hyper.beta2 = get<double>(is);
    m.hyper.epsilon = get<double>(is);
    m.hyper.batch_size = get<int32_t>(is);
    m.hyper.epochs = get<int32_t>(is);
    m.hyper.seed = get<uint64_t>(is);
    const auto n_layers = get<uint32_t>(is);
    m.hyper.hidden.clear();
    for (uint32_t l = 0; l < n_layers; ++l) {
        m.weights.push_back(get_matrix(is));
        m.biases.push_back(get_vector(is));
        if (l + 1 < n_layers) m.hyper.hidden.push_back(static_cast<int>(m.weights[l].rows()));
    }
    return m;
}

inline void write_logreg(std::ostream& os, const LogRegModel& m) {
    put<double>(os, m.hyper.l2);
    put<int32_t>(os, m.line_search_failures);
    put_matrix(os, m.theta);
}

inline LogRegModel read_logreg(std::istream& is) {
    LogRegModel m;
    m.hyper.l2 = get<double>(is);
    m.line_search_failures = get<int32_t>(is);
    m.theta = get_matrix(is);
    return m;
}

inline void write_svc(std::ostream& os, const SvcModel& m) {
    put<double>(os, m.hyper.c);
    put<double>(os, m.gamma);
    put<double>(os, m.hyper.tol);
    put<uint8_t>(os, static_cast<uint8_t>(m.hyper.kernel));
    put<double>(os, m.worst_kkt_gap);
    put<uint8_t>(os, m.converged ? 1 : 0);
    put_matrix(os, m.support);
    put<uint32_t>(os, static_cast<uint32_t>(m.alpha_y.size()));
    for (size_t c = 0; c < m.alpha_y.size(); ++c) {
        put<double>(os, m.bias[c]);
        put<uint64_t>(os, static_cast<uint64_t>(m.alpha_y[c].size()));
        for (const auto& [idx, ay] : m.alpha_y[c]) {
            put<uint32_t>(os, static_cast<uint32_t>(idx));
            put<double>(os, ay);
        }
    }
}

inline SvcModel read_svc(std::istream& is) {
    SvcModel m;
    m.hyper.c = get<double>(is);
    m.gamma = get<double>(is);
    m.hyper.gamma = m.gamma;
    m.hyper.tol = get<double>(is);
    m.hyper.kernel = static_cast<SvcKernel>(get<uint8_t>(is));
    m.worst_kkt_gap = get<double>(is);
    m.converged = get<uint8_t>(is) != 0;
    m.support = get_matrix(is);
    const auto n_classes = get<uint32_t>(is);
    for (uint32_t c = 0; c < n_classes; ++c) {
        m.bias.push_back(get<double>(is));
        const auto n_sv = get<uint64_t>(is);
        std::vector<std::pair<int, double>> ay;
        ay.reserve(n_sv);
        for (uint64_t i = 0; i < n_sv; ++i) {
            const auto idx = get<uint32_t>(is);
            const auto a = get<double>(is);
            ay.emplace_back(static_cast<int>(idx), a);
        }
        m.alpha_y.push_back(std::move(ay));
    }
    return m;
}

inline void write_forest(std::ostream& os, const ForestModel& m) {
    put<int32_t>(os, m.n_classes);
    put<int32_t>(os, m.hyper.n_trees);
    put<int32_t>(os, m.hyper.max_depth);
    put<int32_t>(os, m.hyper.min_samples);
    put<int32_t>(os, m.hyper.mtry);
    put<uint64_t>(os, m.hyper.seed);
    put<double>(os, m.oob_accuracy);
    put<uint32_t>(os, static_cast<uint32_t>(m.trees.size()));
    for (const auto& tree : m.trees) {
        put<uint32_t>(os, static_cast<uint32_t>(tree.nodes.size()));
        for (const auto& node : tree.nodes) {
            put<int32_t>(os, node.feature);
            put<double>(os, node.threshold);
            put<int32_t>(os, node.left);
            put<int32_t>(os, node.right);
            put<int32_t>(os, node.leaf_class);
        }
    }
}

inline ForestModel read_forest(std::istream& is) {
    ForestModel m;
    m.n_classes = get<int32_t>(is);
    m.hyper.n_trees = get<int32_t>(is);
    m.hyper.max_depth = get<int32_t>(is);
    m.hyper.min_samples = get<int32_t>(is);
    m.hyper.mtry = get<int32_t>(is);
    m.hyper.seed = get<uint64_t>(is);
    m.oob_accuracy = get<double>(is);
    const auto n_trees = get<uint32_t>(is);
    for (uint32_t t = 0; t < n_trees; ++t) {
        Tree tree;
        const auto n_nodes = get<uint32_t>(is);
        tree.nodes.resize(n_nodes);
        for (auto& node : tree.nodes) {
            node.feature = get<int32_t>(is);
            node.threshold = get<double>(is);
            node.left = get<int32_t>(is);
            node.right = get<int32_t>(is);
            node.leaf_class = get<int32_t>(is);
        }
        m.trees.push_back(std::move(tree));
    }
    return m;
}

} // namespace detail

inline void save_model(const TrainedModel& tm, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw data_error("cannot open model file for writing: " + path);
    os.write(detail::kModelMagic, 4);
    detail::put<uint32_t>(os, detail::kModelVersion);
    detail::put<uint8_t>(os, static_cast<uint8_t>(tm.kind));
    detail::put<uint64_t>(os, tm.provenance.dataset_hash);
    detail::put<uint64_t>(os, tm.provenance.train_size);
    detail::put<double>(os, tm.provenance.train_snr_db);
    detail::put<uint8_t>(os, tm.provenance.normalized ? 1 : 0);
    detail::put<double>(os, tm.provenance.np_factor);
    switch (tm.kind) {
        case ModelKind::mlp: detail::write_mlp(os, std::get<MlpModel>(tm.model)); break;
        case ModelKind::logreg: detail::write_logreg(os, std::get<LogRegModel>(tm.model)); break;
        case ModelKind::svc: detail::write_svc(os, std::get<SvcModel>(tm.model)); break;
        case ModelKind::forest: detail::write_forest(os, std::get<ForestModel>(tm.model)); break;
    }
    if (!os) throw data_error("write failed: " + path);
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw data_error("cannot open model file: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, detail::kModelMagic, 4) != 0)
        throw data_error("not a model file: " + path);
    if (detail::get<uint32_t>(is) != detail::kModelVersion)
        throw data_error("unsupported model version: " + path);
    TrainedModel tm;
    tm.kind = static_cast<ModelKind>(detail::get<uint8_t>(is));
    tm.provenance.dataset_hash = detail::get<uint64_t>(is);
    tm.provenance.train_size = detail::get<uint64_t>(is);
    tm.provenance.train_snr_db = detail::get<double>(is);
    tm.provenance.normalized = detail::get<uint8_t>(is) != 0;
    tm.provenance.np_factor = detail::get<double>(is);
    switch (tm.kind) {
        case ModelKind::mlp: tm.model = detail::read_mlp(is); break;
        case ModelKind::logreg: tm.model = detail::read_logreg(is); break;
        case ModelKind::svc: tm.model = detail::read_svc(is); break;
        case ModelKind::forest: tm.model = detail::read_forest(is); break;
        default: throw data_error("unknown model kind in: " + path);
    }
    return tm;
}

} // namespace nrssb::learn
