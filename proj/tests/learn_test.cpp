#include <gtest/gtest.h>

#include <filesystem>

#include "nrssb/learn/model_io.hpp"
#include "nrssb/learn/vote.hpp"

using namespace nrssb;
using learn::Matrix;
using learn::Vector;

namespace {

// well-separated gaussian blobs: n_classes means on scaled axes, noise sigma
learn::Dataset make_blobs(int n, int n_classes, int dim, double sep, double sigma,
                          uint64_t seed) {
    learn::Dataset ds;
    ds.n_classes = n_classes;
    ds.x.resize(n, dim);
    ds.y.resize(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const int c = i % n_classes;
        ds.y(i) = c;
        for (int j = 0; j < dim; ++j) {
            const double mean = (j % n_classes == c) ? sep : 0.0;
            ds.x(i, j) = mean + sigma * rng.normal();
        }
    }
    return ds;
}

double accuracy(const std::function<int(const Vector&)>& predict, const learn::Dataset& ds) {
    int ok = 0;
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i)
        if (predict(ds.x.row(i).transpose()) == ds.y(i)) ++ok;
    return static_cast<double>(ok) / static_cast<double>(ds.x.rows());
}

// XOR-quadrant layout: class = sign(x0) xor sign(x1); not linearly separable
learn::Dataset make_xor(int n, uint64_t seed) {
    learn::Dataset ds;
    ds.n_classes = 2;
    ds.x.resize(n, 2);
    ds.y.resize(n);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        const double sx = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
        ds.x(i, 0) = sx + 0.3 * rng.normal();
        ds.x(i, 1) = sy + 0.3 * rng.normal();
        ds.y(i) = (sx > 0) != (sy > 0) ? 1 : 0;
    }
    return ds;
}

} // namespace

TEST(DatasetTest, StratifiedSplitWithinOneSample) {
    const auto ds = make_blobs(803, 8, 10, 4.0, 0.5, 1);
    const auto split = learn::stratified_split(ds.y, 0.7, 3);
    EXPECT_EQ(split.train.size() + split.test.size(), 803u);
    std::vector<int> class_total(8, 0), class_train(8, 0);
    for (Eigen::Index i = 0; i < ds.y.size(); ++i) ++class_total[ds.y(i)];
    for (int idx : split.train) ++class_train[ds.y(idx)];
    for (int c = 0; c < 8; ++c) {
        const double target = 0.7 * class_total[c];
        EXPECT_LE(std::abs(class_train[c] - target), 1.0) << "class " << c;
    }
    // disjoint and exhaustive
    std::vector<int> seen(803, 0);
    for (int idx : split.train) ++seen[idx];
    for (int idx : split.test) ++seen[idx];
    for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(MlpTest, ZeroModelPredictsLowestClass) {
    auto model = learn::MlpModel::zeros(20, 8);
    Rng rng(2);
    Vector x(20);
    for (int i = 0; i < 20; ++i) x(i) = rng.normal();
    EXPECT_EQ(model.predict(x), 0);
    const Vector s = model.scores(x);
    for (int c = 0; c < 8; ++c) EXPECT_NEAR(s(c), 0.125, 1e-12);
}

TEST(MlpTest, ScoresSumToOne) {
    learn::MlpHyper hyper;
    hyper.hidden = {16, 16};
    hyper.epochs = 3;
    const auto ds = make_blobs(160, 8, 10, 4.0, 0.5, 2);
    const auto model = learn::mlp_train(ds, hyper);
    Rng rng(5);
    Vector x(10);
    for (int i = 0; i < 10; ++i) x(i) = rng.normal();
    EXPECT_NEAR(model.scores(x).sum(), 1.0, 1e-9);
}

TEST(MlpTest, GradientMatchesFiniteDifferences) {
    learn::MlpHyper hyper;
    hyper.hidden = {7, 5};
    learn::MlpModel model;
    model.init_shape(10, 3, hyper);
    Rng rng(11);
    model.init_random(rng);

    Matrix x(6, 10);
    learn::Labels y(6);
    for (int i = 0; i < 6; ++i) {
        y(i) = i % 3;
        for (int j = 0; j < 10; ++j) x(i, j) = rng.normal();
    }
    std::vector<Matrix> gw;
    std::vector<Vector> gb;
    model.loss_and_grad(x, y, gw, gb);

    const double eps = 1e-4;
    std::vector<Matrix> tw;
    std::vector<Vector> tb;
    for (int probe = 0; probe < 20; ++probe) {
        const size_t l = rng.below(model.weights.size());
        const auto r = static_cast<Eigen::Index>(rng.below(model.weights[l].rows()));
        const auto c = static_cast<Eigen::Index>(rng.below(model.weights[l].cols()));
        auto perturbed = model;
        perturbed.weights[l](r, c) += eps;
        const double fp = perturbed.loss_and_grad(x, y, tw, tb);
        perturbed.weights[l](r, c) -= 2.0 * eps;
        const double fm = perturbed.loss_and_grad(x, y, tw, tb);
        const double fd = (fp - fm) / (2.0 * eps);
        const double g = gw[l](r, c);
        const double rel = std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-8});
        EXPECT_LT(rel, 1e-4) << "layer " << l << " (" << r << "," << c << ")";
    }
}

TEST(MlpTest, BlobsAccuracy) {
    learn::MlpHyper hyper;
    hyper.epochs = 50;
    hyper.batch_size = 100;
    auto ds = make_blobs(1000, 8, 20, 5.0, 0.5, 7);
    const auto split = learn::stratified_split(ds.y, 0.8, 1);
    const auto train = learn::subset(ds, split.train);
    const auto test = learn::subset(ds, split.test);
    const auto model = learn::mlp_train(train, hyper);
    EXPECT_GE(accuracy([&](const Vector& v) { return model.predict(v); }, test), 0.99);
    EXPECT_GE(accuracy([&](const Vector& v) { return model.predict(v); }, train), 0.99);
    // first-epoch learning signal
    ASSERT_GE(model.epoch_loss.size(), 2u);
    EXPECT_LT(model.epoch_loss.back(), model.epoch_loss.front());
}

TEST(MlpTest, TrainingIsDeterministic) {
    learn::MlpHyper hyper;
    hyper.epochs = 5;
    hyper.hidden = {16, 16};
    const auto ds = make_blobs(160, 8, 10, 4.0, 0.5, 3);
    const auto a = learn::mlp_train(ds, hyper);
    const auto b = learn::mlp_train(ds, hyper);
    ASSERT_EQ(a.weights.size(), b.weights.size());
    for (size_t l = 0; l < a.weights.size(); ++l) {
        EXPECT_EQ(a.weights[l], b.weights[l]);
        EXPECT_EQ(a.biases[l], b.biases[l]);
    }
}

TEST(LbfgsTest, ConvexQuadratic) {
    const int d = 10;
    Vector diag(d), b(d);
    for (int i = 0; i < d; ++i) {
        diag(i) = 1.0 + i;
        b(i) = 1.0;
    }
    auto obj = [&](const Vector& x, Vector& grad) {
        grad = diag.cwiseProduct(x) - b;
        return 0.5 * x.dot(diag.cwiseProduct(x)) - b.dot(x);
    };
    learn::LbfgsOptions opt;
    opt.max_iter = 50;
    opt.grad_tol = 1e-8;
    const auto res = learn::lbfgs_minimize(obj, Vector::Zero(d), opt);
    EXPECT_LT(res.grad_norm, 1e-8);
    EXPECT_LE(res.iterations, 50);
    for (int i = 0; i < d; ++i) EXPECT_NEAR(res.x(i), 1.0 / diag(i), 1e-7);
}

TEST(LogRegTest, GradientMatchesFiniteDifferences) {
    Rng rng(13);
    const int n = 40, d = 6;
    Matrix x(n, d);
    Vector y01(n);
    for (int i = 0; i < n; ++i) {
        y01(i) = i % 2;
        for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
    }
    Vector theta(d + 1);
    for (int j = 0; j <= d; ++j) theta(j) = 0.3 * rng.normal();

    Vector grad;
    learn::logreg_objective(x, y01, 1e-3, theta, grad);
    const double eps = 1e-6;
    Vector scratch;
    for (int j = 0; j <= d; ++j) {
        Vector tp = theta, tm = theta;
        tp(j) += eps;
        tm(j) -= eps;
        const double fd = (learn::logreg_objective(x, y01, 1e-3, tp, scratch) -
                           learn::logreg_objective(x, y01, 1e-3, tm, scratch)) /
                          (2.0 * eps);
        const double rel = std::abs(fd - grad(j)) / std::max({std::abs(fd), std::abs(grad(j)), 1e-8});
        EXPECT_LT(rel, 1e-5) << "theta " << j;
    }
}

TEST(LogRegTest, SeparableOneDimensional) {
    learn::Dataset ds;
    ds.n_classes = 2;
    ds.x.resize(40, 1);
    ds.y.resize(40);
    Rng rng(4);
    for (int i = 0; i < 40; ++i) {
        const int c = i % 2;
        ds.y(i) = c;
        ds.x(i, 0) = (c == 0 ? -2.0 : 2.0) + 0.1 * rng.normal();
    }
    const auto model = learn::logreg_train(ds);
    EXPECT_DOUBLE_EQ(accuracy([&](const Vector& v) { return model.predict(v); }, ds), 1.0);
}

TEST(LogRegTest, ZeroThetaPredictsLowestClass) {
    learn::LogRegModel model;
    model.theta = Matrix::Zero(8, 21);
    Rng rng(5);
    Vector x(20);
    for (int i = 0; i < 20; ++i) x(i) = rng.normal();
    for (int c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(model.score(c, x), 0.5);
    EXPECT_EQ(model.predict(x), 0);
}

TEST(LogRegTest, ScoreMatchesFormulaOracle) {
    const auto ds = make_blobs(200, 4, 8, 4.0, 0.5, 6);
    const auto model = learn::logreg_train(ds);
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        Vector x(8);
        for (int i = 0; i < 8; ++i) x(i) = rng.normal();
        for (int c = 0; c < 4; ++c) {
            double z = model.theta(c, 0);
            for (int i = 0; i < 8; ++i) z += model.theta(c, i + 1) * x(i);
            EXPECT_NEAR(model.score(c, x), 1.0 / (1.0 + std::exp(-z)), 1e-12);
        }
    }
}

TEST(SvcTest, KernelSelfSimilarityIsOne) {
    const auto ds = make_blobs(64, 2, 6, 4.0, 0.5, 8);
    learn::SvcHyper hyper;
    const auto model = learn::svc_train(ds, hyper);
    for (Eigen::Index i = 0; i < model.support.rows(); ++i) {
        const Vector x = model.support.row(i).transpose();
        const Vector k = model.kernel_against_support(x);
        EXPECT_NEAR(k(i), 1.0, 1e-12);
    }
}

TEST(SvcTest, XorNeedsRbf) {
    const auto ds = make_xor(240, 9);
    learn::SvcHyper rbf;
    rbf.gamma = 1.0;
    const auto m_rbf = learn::svc_train(ds, rbf);
    EXPECT_GE(accuracy([&](const Vector& v) { return m_rbf.predict(v); }, ds), 0.95);

    learn::SvcHyper lin;
    lin.kernel = learn::SvcKernel::linear;
    const auto m_lin = learn::svc_train(ds, lin);
    // a linear boundary can carve off at most three quadrants of the XOR layout
    EXPECT_LE(accuracy([&](const Vector& v) { return m_lin.predict(v); }, ds), 0.80);
}

TEST(SvcTest, TinyQpMatchesBruteForce) {
    // 6-point binary problem, solved exhaustively on the dual simplex slice
    Matrix x(6, 2);
    x << 0.0, 0.0, 1.0, 0.2, 0.2, 1.0, 2.0, 2.0, 3.0, 1.8, 1.8, 3.0;
    std::vector<int8_t> y = {1, 1, 1, -1, -1, -1};
    learn::SvcHyper hyper;
    hyper.c = 1.0;
    const double gamma = 0.5;

    Matrix k(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            k(i, j) = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());

    auto objective = [&](const std::array<double, 6>& a) {
        double obj = 0.0;
        for (int i = 0; i < 6; ++i) {
            obj += a[i];
            for (int j = 0; j < 6; ++j) obj -= 0.5 * a[i] * a[j] * y[i] * y[j] * k(i, j);
        }
        return obj;
    };

    // refine a grid over the first 5 alphas; the 6th follows from y'a = 0
    std::array<double, 6> best{};
    double best_obj = -1e300;
    std::array<double, 5> center{0.5, 0.5, 0.5, 0.5, 0.5};
    double width = 0.5;
    for (int pass = 0; pass < 4; ++pass) {
        const double step = width / 5.0;
        std::array<double, 6> a{};
        std::array<int, 5> idx{};
        for (idx[0] = -5; idx[0] <= 5; ++idx[0])
            for (idx[1] = -5; idx[1] <= 5; ++idx[1])
                for (idx[2] = -5; idx[2] <= 5; ++idx[2])
                    for (idx[3] = -5; idx[3] <= 5; ++idx[3])
                        for (idx[4] = -5; idx[4] <= 5; ++idx[4]) {
                            bool feasible = true;
                            double ya = 0.0;
                            for (int i = 0; i < 5; ++i) {
                                a[i] = center[i] + idx[i] * step;
                                if (a[i] < 0.0 || a[i] > hyper.c) feasible = false;
                                ya += y[i] * a[i];
                            }
                            if (!feasible) continue;
                            a[5] = ya; // y[5] = -1
                            if (a[5] < 0.0 || a[5] > hyper.c) continue;
                            const double obj = objective(a);
                            if (obj > best_obj) {
                                best_obj = obj;
                                best = a;
                            }
                        }
        for (int i = 0; i < 5; ++i) center[i] = best[i];
        width = 2.0 * step;
    }

    const auto sol = learn::detail::smo_solve(x, y, hyper, gamma);
    EXPECT_TRUE(sol.converged);
    std::array<double, 6> a_smo{};
    for (const auto& [i, ay] : sol.alpha_y) a_smo[static_cast<size_t>(i)] = std::abs(ay);
    EXPECT_NEAR(objective(a_smo), best_obj, 1e-3);
    EXPECT_LT(sol.kkt_gap, 1e-3);
}

TEST(SvcTest, DecisionMatchesKernelSumOracle) {
    const auto ds = make_blobs(200, 4, 8, 4.0, 0.6, 10);
    const auto model = learn::svc_train(ds);
    Rng rng(11);
    for (int t = 0; t < 100; ++t) {
        Vector v(8);
        for (int i = 0; i < 8; ++i) v(i) = rng.normal();
        const Vector krow = model.kernel_against_support(v);
        for (int c = 0; c < 4; ++c) {
            double acc = model.bias[c];
            for (const auto& [idx, ay] : model.alpha_y[c]) {
                const double kv =
                    std::exp(-model.gamma * (model.support.row(idx).transpose() - v).squaredNorm());
                acc += ay * kv;
            }
            EXPECT_NEAR(model.decision(c, krow), acc, 1e-9);
        }
    }
}

TEST(SvcTest, SeparableAccuracyAndKkt) {
    const auto ds = make_blobs(400, 8, 16, 4.0, 0.5, 12);
    const auto model = learn::svc_train(ds);
    EXPECT_TRUE(model.converged);
    EXPECT_LT(model.worst_kkt_gap, 1e-3);
    EXPECT_GE(accuracy([&](const Vector& v) { return model.predict(v); }, ds), 0.99);
    // batch path agrees with the per-sample path
    const auto batch = learn::svc_predict_batch(model, ds.x);
    for (Eigen::Index i = 0; i < ds.x.rows(); ++i)
        EXPECT_EQ(batch(i), model.predict(ds.x.row(i).transpose()));
}

TEST(ForestTest, GiniValues) {
    EXPECT_DOUBLE_EQ(learn::gini({7, 0}), 0.0);
    EXPECT_DOUBLE_EQ(learn::gini({5, 5}), 0.5);
    EXPECT_DOUBLE_EQ(learn::gini({}), 0.0);
}

TEST(ForestTest, BlobsOutOfBagAccuracy) {
    const auto ds = make_blobs(800, 8, 20, 5.0, 0.5, 13);
    const auto model = learn::forest_train(ds);
    EXPECT_GE(model.oob_accuracy, 0.98);
    EXPECT_GE(accuracy([&](const Vector& v) { return model.predict(v); }, ds), 0.99);
}

TEST(ForestTest, PredictMatchesTraversalOracle) {
    const auto ds = make_blobs(400, 4, 10, 4.0, 0.7, 14);
    learn::ForestHyper hyper;
    hyper.n_trees = 20;
    const auto model = learn::forest_train(ds, hyper);
    Rng rng(15);
    for (int t = 0; t < 100; ++t) {
        Vector v(10);
        for (int i = 0; i < 10; ++i) v(i) = rng.normal();
        // independent traversal: walk each tree by hand, plurality with
        // lowest-index tie break
        std::vector<int> votes(4, 0);
        for (const auto& tree : model.trees) {
            int node = 0;
            while (tree.nodes[node].feature >= 0) {
                const auto& nd = tree.nodes[node];
                node = v(nd.feature) <= nd.threshold ? nd.left : nd.right;
            }
            ++votes[tree.nodes[node].leaf_class];
        }
        int expect = 0;
        for (int c = 1; c < 4; ++c)
            if (votes[c] > votes[expect]) expect = c;
        EXPECT_EQ(model.predict(v), expect);
    }
}

TEST(ForestTest, TrainingIsDeterministic) {
    const auto ds = make_blobs(200, 4, 10, 4.0, 0.7, 16);
    learn::ForestHyper hyper;
    hyper.n_trees = 10;
    const auto a = learn::forest_train(ds, hyper);
    const auto b = learn::forest_train(ds, hyper);
    Rng rng(17);
    for (int t = 0; t < 50; ++t) {
        Vector v(10);
        for (int i = 0; i < 10; ++i) v(i) = rng.normal();
        EXPECT_EQ(a.predict(v), b.predict(v));
    }
}

namespace {

// fixed-output member models for the voting tie-break cases
learn::MlpModel const_mlp(int cls, int dim, int n_classes) {
    auto m = learn::MlpModel::zeros(dim, n_classes);
    m.biases.back()(cls) = 1.0;
    return m;
}

learn::LogRegModel const_logreg(int cls, int dim, int n_classes) {
    learn::LogRegModel m;
    m.theta = Matrix::Zero(n_classes, dim + 1);
    m.theta(cls, 0) = 1.0;
    return m;
}

learn::SvcModel const_svc(int cls, int dim, int n_classes) {
    learn::SvcModel m;
    m.support = Matrix::Zero(0, dim);
    m.alpha_y.assign(static_cast<size_t>(n_classes), {});
    m.bias.assign(static_cast<size_t>(n_classes), 0.0);
    m.bias[static_cast<size_t>(cls)] = 1.0;
    m.gamma = 1.0;
    return m;
}

learn::ForestModel const_forest(int cls, int n_classes) {
    learn::ForestModel m;
    m.n_classes = n_classes;
    learn::Tree tree;
    tree.nodes.push_back(learn::TreeNode{-1, 0.0, -1, -1, cls});
    m.trees.push_back(tree);
    return m;
}

} // namespace

TEST(VoteTest, PluralityAndTieBreak) {
    const int dim = 4, n_classes = 8;
    Vector x = Vector::Zero(dim);

    // predictions {2,2,5,7} -> 2
    auto mlp = const_mlp(2, dim, n_classes);
    auto logreg = const_logreg(2, dim, n_classes);
    auto svc = const_svc(5, dim, n_classes);
    auto forest = const_forest(7, n_classes);
    learn::VotingModel vote{&mlp, &logreg, &svc, &forest};
    EXPECT_EQ(vote.predict(x), 2);

    // predictions {1,1,2,2} -> 1 (tie breaks to lowest class)
    mlp = const_mlp(1, dim, n_classes);
    logreg = const_logreg(1, dim, n_classes);
    svc = const_svc(2, dim, n_classes);
    forest = const_forest(2, n_classes);
    EXPECT_EQ(vote.predict(x), 1);

    // unanimous
    mlp = const_mlp(6, dim, n_classes);
    logreg = const_logreg(6, dim, n_classes);
    svc = const_svc(6, dim, n_classes);
    forest = const_forest(6, n_classes);
    EXPECT_EQ(vote.predict(x), 6);
}

TEST(VoteTest, MissingMemberRejected) {
    learn::VotingModel vote{};
    EXPECT_THROW(vote.predict(Vector::Zero(4)), std::logic_error);
}

TEST(VoteTest, OutputIsAlwaysAMemberPrediction) {
    const auto ds = make_blobs(400, 8, 16, 3.0, 1.0, 18);
    learn::MlpHyper mh;
    mh.epochs = 20;
    learn::ForestHyper fh;
    fh.n_trees = 20;
    const auto mlp = learn::mlp_train(ds, mh);
    const auto logreg = learn::logreg_train(ds);
    const auto svc = learn::svc_train(ds);
    const auto forest = learn::forest_train(ds, fh);
    const learn::VotingModel vote{&mlp, &logreg, &svc, &forest};
    Rng rng(19);
    for (int t = 0; t < 100; ++t) {
        Vector v(16);
        for (int i = 0; i < 16; ++i) v(i) = rng.normal();
        const int p = vote.predict(v);
        const bool member = p == mlp.predict(v) || p == logreg.predict(v) ||
                            p == svc.predict(v) || p == forest.predict(v);
        EXPECT_TRUE(member);
    }
}

TEST(ModelIoTest, RoundTripAllKinds) {
    const auto ds = make_blobs(240, 4, 8, 4.0, 0.6, 20);
    learn::MlpHyper mh;
    mh.epochs = 10;
    mh.hidden = {16, 16};
    learn::ForestHyper fh;
    fh.n_trees = 10;

    std::vector<learn::TrainedModel> models;
    {
        learn::TrainedModel tm;
        tm.kind = learn::ModelKind::mlp;
        tm.model = learn::mlp_train(ds, mh);
        models.push_back(std::move(tm));
    }
    {
        learn::TrainedModel tm;
        tm.kind = learn::ModelKind::logreg;
        tm.model = learn::logreg_train(ds);
        models.push_back(std::move(tm));
    }
    {
        learn::TrainedModel tm;
        tm.kind = learn::ModelKind::svc;
        tm.model = learn::svc_train(ds);
        models.push_back(std::move(tm));
    }
    {
        learn::TrainedModel tm;
        tm.kind = learn::ModelKind::forest;
        tm.model = learn::forest_train(ds, fh);
        models.push_back(std::move(tm));
    }

    const auto dir = std::filesystem::temp_directory_path() / "nrssb_model_io_test";
    std::filesystem::create_directories(dir);
    Rng rng(21);
    for (auto& tm : models) {
        tm.provenance.dataset_hash = learn::dataset_hash(ds);
        tm.provenance.train_size = ds.size();
        tm.provenance.train_snr_db = -4.0;
        tm.provenance.normalized = true;
        tm.provenance.np_factor = 2.5;
        const auto path = (dir / (std::string(learn::model_kind_name(tm.kind)) + ".bin")).string();
        learn::save_model(tm, path);
        const auto back = learn::load_model(path);
        EXPECT_EQ(back.kind, tm.kind);
        EXPECT_EQ(back.provenance.dataset_hash, tm.provenance.dataset_hash);
        EXPECT_EQ(back.provenance.train_size, tm.provenance.train_size);
        EXPECT_DOUBLE_EQ(back.provenance.train_snr_db, -4.0);
        EXPECT_TRUE(back.provenance.normalized);
        EXPECT_DOUBLE_EQ(back.provenance.np_factor, 2.5);
        for (int t = 0; t < 50; ++t) {
            Vector v(8);
            for (int i = 0; i < 8; ++i) v(i) = rng.normal();
            EXPECT_EQ(back.predict(v), tm.predict(v)) << learn::model_kind_name(tm.kind);
        }
    }
    std::filesystem::remove_all(dir);
}

TEST(ModelIoTest, BadFileRejected) {
    const auto dir = std::filesystem::temp_directory_path() / "nrssb_model_io_bad";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "junk.bin").string();
    {
        std::ofstream os(path, std::ios::binary);
        os << "not a model";
    }
    EXPECT_THROW(learn::load_model(path), data_error);
    EXPECT_THROW(learn::load_model((dir / "missing.bin").string()), data_error);
    std::filesystem::remove_all(dir);
}
