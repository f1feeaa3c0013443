#pragma once

#include <chrono>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "nrssb/bench/dataset_file.hpp"
#include "nrssb/bench/stats.hpp"
#include "nrssb/chansim.hpp"
#include "nrssb/detect.hpp"
#include "nrssb/learn/model_io.hpp"
#include "nrssb/learn/vote.hpp"

namespace nrssb::bench {

struct ScenarioSpec {
    uint64_t seed = 1;
    chansim::ChannelMode mode = chansim::ChannelMode::beam_signature;
    double snr_db = 0.0;
    int taps = 4;
    int timing_offset = 0;
    double cfo_hz = 0.0;

    chansim::ChannelScenario build(const phy::FrameConfig& frame) const {
        auto sc = chansim::scenario_build(seed, frame.lmax, mode, snr_db, taps, frame.cp_len);
        sc.timing_offset = timing_offset;
        sc.cfo_hz = cfo_hz;
        return sc;
    }
};

struct CaptureConfig {
    phy::FrameConfig frame;
    ScenarioSpec scenario;
    int nid1 = 100;
    int nid2 = 1;
    size_t count = 800;
    uint64_t trial_base = 0; // offsets the per-trial noise streams
};

namespace detail {

// single-SSB frame for fast feature capture: one burst slot at symbol 0
inline phy::FrameConfig capture_frame(const phy::FrameConfig& frame, int margin_samples) {
    phy::FrameConfig cfg = frame;
    cfg.lmax = 1;
    cfg.burst_positions = {0};
    const double span_s =
        (static_cast<double>(phy::kSsbSymbols) * frame.symbol_len() + margin_samples) /
        frame.sample_rate;
    cfg.ssb_period_ms = span_s * 1000.0;
    cfg.buffer_duration = span_s;
    return cfg;
}

} // namespace detail

/// One simulated SSB reception with known timing: grid -> OFDM -> channel ->
/// demodulation. Returns the three PBCH symbols and the transmitted grid.
struct SsbReception {
    phy::SsbGrid tx;
    std::array<cvec, 3> rf;
};

inline SsbReception simulate_reception(int issb, const seq::CellIdentity& cell,
                                       const phy::FrameConfig& frame,
                                       const chansim::ChannelScenario& scenario, uint64_t trial) {
    const auto cap = detail::capture_frame(frame, scenario.timing_offset + 8);
    Rng payload_rng(stream_seed(scenario.seed, 0xBAD0'0000ull + trial));
    SsbReception rec;
    rec.tx = phy::grid_assemble(issb, cell, phy::pbch_random_payload(payload_rng), frame.lmax);
    const auto buf = phy::ofdm_modulate({{rec.tx, 0}}, cap);
    const auto rx = chansim::apply(buf, scenario, {{0, issb, cell.v()}}, cap, trial);
    rec.rf = phy::ofdm_demodulate(rx, static_cast<size_t>(scenario.timing_offset), cap);
    return rec;
}

/// Balanced labeled feature capture across all lmax beam indices. Labels come
/// from the simulation ground truth; each vector carries its SNR tag.
inline std::vector<detect::DmrsFeatureVector> capture_dataset(const CaptureConfig& cfg) {
    cfg.frame.validate();
    const auto cell = seq::pci_compose(cfg.nid1, cfg.nid2);
    const auto scenario = cfg.scenario.build(cfg.frame);
    std::vector<detect::DmrsFeatureVector> out(cfg.count);
    for (size_t trial = 0; trial < cfg.count; ++trial) {
        const int issb = static_cast<int>(trial % cfg.frame.lmax);
        const auto rec =
            simulate_reception(issb, cell, cfg.frame, scenario, cfg.trial_base + trial);
        auto vec = detect::dmrs_extract(rec.rf, cell.v());
        vec.label = issb;
        vec.snr_db = cfg.scenario.snr_db;
        vec.source = detect::FeatureSource::sim;
        out[trial] = std::move(vec);
    }
    return out;
}

struct ModelHypers {
    learn::MlpHyper mlp;
    learn::LogRegHyper logreg;
    learn::SvcHyper svc;
    learn::ForestHyper forest;
};

/// Trains one named model on a dataset, recording provenance. The np_factor is
/// the mean-power normalization divisor applied to the features beforehand (1.0 if
/// they were raw).
inline learn::TrainedModel train_model(const std::string& name, const learn::Dataset& ds,
                                       const ModelHypers& hypers, double snr_db, bool normalized,
                                       double np_factor) {
    learn::TrainedModel tm;
    tm.provenance.dataset_hash = learn::dataset_hash(ds);
    tm.provenance.train_size = ds.size();
    tm.provenance.train_snr_db = snr_db;
    tm.provenance.normalized = normalized;
    tm.provenance.np_factor = np_factor;
    if (name == "mlp") {
        tm.kind = learn::ModelKind::mlp;
        tm.model = learn::mlp_train(ds, hypers.mlp);
    } else if (name == "logreg") {
        tm.kind = learn::ModelKind::logreg;
        tm.model = learn::logreg_train(ds, hypers.logreg);
    } else if (name == "svc") {
        tm.kind = learn::ModelKind::svc;
        tm.model = learn::svc_train(ds, hypers.svc);
    } else if (name == "forest") {
        tm.kind = learn::ModelKind::forest;
        tm.model = learn::forest_train(ds, hypers.forest);
    } else {
        throw config_error("unknown trainable model: " + name);
    }
    return tm;
}

/// Applies the model's stored normalization and predicts the SSB index.
inline int model_detect(const learn::TrainedModel& tm, const detect::DmrsFeatureVector& raw) {
    learn::Vector x(raw.x.size());
    const double scale = tm.provenance.normalized ? 1.0 / std::sqrt(tm.provenance.np_factor) : 1.0;
    for (size_t i = 0; i < raw.x.size(); ++i) x(static_cast<Eigen::Index>(i)) = raw.x[i] * scale;
    return tm.predict(x);
}

struct SweepConfig {
    phy::FrameConfig frame;
    ScenarioSpec scenario;
    std::vector<double> snr_points = {-6.0, -4.0, -2.0};
    std::vector<size_t> training_sizes = {70, 700, 1400, 14000};
    size_t samples_per_point = 20000;
    std::vector<std::string> models = {"corr", "mlp", "logreg", "svc", "forest", "vote"};
    bool normalize = true;
    uint64_t seed = 1;
    ModelHypers hypers;

    void validate() const {
        frame.validate();
        if (models.empty()) throw config_error("sweep: need at least one model");
        if (snr_points.empty()) throw config_error("sweep: need at least one SNR point");
        const size_t test = samples_per_point - static_cast<size_t>(samples_per_point * 0.7 + 0.5);
        if (test < 100) throw config_error("sweep: fewer than 100 test trials per point");
        for (size_t s : training_sizes) {
            if (s > static_cast<size_t>(samples_per_point * 0.7 + 0.5))
                throw config_error("sweep: training size exceeds the 70% split");
        }
    }
};

struct SweepCell {
    double snr_db = 0.0;
    std::string model;
    size_t train_size = 0; // 0 for the correlation baseline
    size_t trials = 0;
    size_t fails = 0;
    double fail_prob = 0.0;
    WilsonInterval ci;
    double train_seconds = 0.0;
    double eval_seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;

    const SweepCell* find(const std::string& model, double snr_db, size_t train_size) const {
        for (const auto& c : cells) {
            if (c.model == model && c.snr_db == snr_db && c.train_size == train_size) return &c;
        }
        return nullptr;
    }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// stratified subsample: size/lmax vectors per class, taken in split order
inline std::vector<int> stratified_take(const std::vector<int>& train_idx, const learn::Labels& y,
                                        int n_classes, size_t size) {
    const size_t per_class = size / static_cast<size_t>(n_classes);
    std::vector<size_t> taken(static_cast<size_t>(n_classes), 0);
    std::vector<int> out;
    out.reserve(size);
    for (int idx : train_idx) {
        auto& t = taken[static_cast<size_t>(y(idx))];
        if (t < per_class) {
            ++t;
            out.push_back(idx);
        }
    }
    for (int idx : train_idx) { // top up if size is not a multiple of lmax
        if (out.size() >= size) break;
        if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
    return out;
}

} // namespace detail

/// Fail-probability sweep over SNR points, models, and training sizes.
/// Each point captures one balanced dataset, splits it 70/30 stratified,
/// trains every learner per training size, and evaluates on the test split.
inline SweepResult run_sweep(const SweepConfig& cfg,
                             const std::function<void(const std::string&)>& log = {}) {
    cfg.validate();
    auto note = [&](const std::string& msg) {
        if (log) log(msg);
    };

    SweepResult result;
    for (size_t point = 0; point < cfg.snr_points.size(); ++point) {
        const double snr = cfg.snr_points[point];
        CaptureConfig cap;
        cap.frame = cfg.frame;
        cap.scenario = cfg.scenario;
        cap.scenario.snr_db = snr;
        cap.count = cfg.samples_per_point;
        cap.trial_base = point * cfg.samples_per_point;
        note("capturing " + std::to_string(cap.count) + " vectors at " + std::to_string(snr) +
             " dB");
        const auto vectors = capture_dataset(cap);
        const auto ds = learn::make_dataset(vectors, cfg.frame.lmax);
        const auto split = learn::stratified_split(ds.y, 0.7, cfg.seed);
        const auto test = learn::subset(ds, split.test);

        for (const auto& model_name : cfg.models) {
            if (model_name == "corr") {
                const auto t0 = std::chrono::steady_clock::now();
                SweepCell cell;
                cell.snr_db = snr;
                cell.model = "corr";
                cell.trials = split.test.size();
                const auto cell_id = seq::pci_compose(cap.nid1, cap.nid2);
                for (int idx : split.test) {
                    const auto& vec = vectors[static_cast<size_t>(idx)];
                    const auto [issb, scores] =
                        detect::correlate_detect(vec, cell_id, cfg.frame.lmax);
                    (void)scores;
                    if (issb != *vec.label) ++cell.fails;
                }
                cell.fail_prob = static_cast<double>(cell.fails) / cell.trials;
                cell.ci = wilson(cell.fails, cell.trials);
                cell.eval_seconds = detail::seconds_since(t0);
                result.cells.push_back(cell);
                continue;
            }

            for (size_t size : cfg.training_sizes) {
                const auto take = detail::stratified_take(split.train, ds.y, ds.n_classes, size);
                auto train_ds = learn::subset(ds, take);
                auto test_ds = test;

                double np = 1.0;
                if (cfg.normalize) {
                    np = train_ds.x.rowwise().squaredNorm().mean() /
                         static_cast<double>(train_ds.x.cols());
                    const double scale = 1.0 / std::sqrt(np);
                    train_ds.x *= scale;
                    test_ds.x *= scale;
                }

                note("training " + model_name + " on " + std::to_string(size) + " vectors at " +
                     std::to_string(snr) + " dB");
                SweepCell cell;
                cell.snr_db = snr;
                cell.model = model_name;
                cell.train_size = size;
                cell.trials = test_ds.size();

                const auto t0 = std::chrono::steady_clock::now();
                learn::Labels pred(test_ds.x.rows());
                if (model_name == "vote") {
                    const auto mlp = learn::mlp_train(train_ds, cfg.hypers.mlp);
                    const auto logreg = learn::logreg_train(train_ds, cfg.hypers.logreg);
                    const auto svc = learn::svc_train(train_ds, cfg.hypers.svc);
                    const auto forest = learn::forest_train(train_ds, cfg.hypers.forest);
                    cell.train_seconds = detail::seconds_since(t0);
                    const learn::VotingModel vote{&mlp, &logreg, &svc, &forest};
                    for (Eigen::Index i = 0; i < test_ds.x.rows(); ++i)
                        pred(i) = vote.predict(test_ds.x.row(i).transpose());
                } else {
                    const auto tm =
                        train_model(model_name, train_ds, cfg.hypers, snr, cfg.normalize, np);
                    cell.train_seconds = detail::seconds_since(t0);
                    if (tm.kind == learn::ModelKind::svc) {
                        pred = learn::svc_predict_batch(std::get<learn::SvcModel>(tm.model),
                                                        test_ds.x);
                    } else {
                        for (Eigen::Index i = 0; i < test_ds.x.rows(); ++i)
                            pred(i) = tm.predict(test_ds.x.row(i).transpose());
                    }
                }
                const auto t1 = std::chrono::steady_clock::now();
                for (Eigen::Index i = 0; i < test_ds.x.rows(); ++i)
                    if (pred(i) != test_ds.y(i)) ++cell.fails;
                cell.fail_prob = static_cast<double>(cell.fails) / cell.trials;
                cell.ci = wilson(cell.fails, cell.trials);
                cell.eval_seconds = detail::seconds_since(t1);
                result.cells.push_back(cell);
            }
        }
    }
    return result;
}

/// Deterministic CSV table (no wall-clock columns, so reruns are byte-identical).
inline std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "snr_db,model,train_size,trials,fails,fail_prob,wilson_lo,wilson_hi\n";
    os << std::setprecision(10);
    for (const auto& c : result.cells) {
        os << c.snr_db << ',' << c.model << ',' << c.train_size << ',' << c.trials << ','
           << c.fails << ',' << c.fail_prob << ',' << c.ci.lo << ',' << c.ci.hi << '\n';
    }
    return os.str();
}

inline std::string sweep_summary(const SweepResult& result) {
    std::ostringstream os;
    os << "sweep summary\n=============\n";
    for (const auto& c : result.cells) {
        os << std::setw(7) << c.snr_db << " dB  " << std::setw(8) << c.model << "  train="
           << std::setw(6) << c.train_size << "  fail=" << std::setw(8) << c.fail_prob << " ["
           << c.ci.lo << ", " << c.ci.hi << "]  train_s=" << c.train_seconds
           << " eval_s=" << c.eval_seconds << "\n";
    }
    return os.str();
}

struct SelectorSimConfig {
    phy::FrameConfig frame;
    ScenarioSpec scenario; // test-side channel
    int nid1 = 100;
    int nid2 = 1;
    size_t n_steps = 400;
    int fixed_beam = -1; // -1: uniform random beam per arrival
    uint64_t seed = 1;
    size_t window = 100;
    double threshold = 0.95;
    double hysteresis = 0.05;
};

struct SelectorStepRecord {
    size_t step = 0;
    bool learner_active = false;
    int true_issb = 0;
    int chosen_issb = 0;
    bool correct = false;
    double cumulative_accuracy = 0.0;
};

struct SelectorSimResult {
    std::vector<SelectorStepRecord> steps;
    std::optional<size_t> switch_step; // first step the learner branch went active
};

/// Streams one SSB per period through the selector. The learner is shadow
/// evaluated with the PBCH CRC under its own hypothesis at every arrival.
inline SelectorSimResult run_selector_sim(const SelectorSimConfig& cfg,
                                          const learn::TrainedModel* model) {
    cfg.frame.validate();
    const auto cell = seq::pci_compose(cfg.nid1, cfg.nid2);
    const auto scenario = cfg.scenario.build(cfg.frame);

    detect::SelectorState state;
    state.window_size = cfg.window;
    state.threshold = cfg.threshold;
    state.hysteresis = cfg.hysteresis;

    SelectorSimResult result;
    Rng beam_rng(stream_seed(cfg.seed, 0xBEA0ull));
    size_t n_correct = 0;
    for (size_t step = 0; step < cfg.n_steps; ++step) {
        const int issb = cfg.fixed_beam >= 0
                             ? cfg.fixed_beam
                             : static_cast<int>(beam_rng.below(static_cast<uint64_t>(cfg.frame.lmax)));
        const auto rec = simulate_reception(issb, cell, cfg.frame, scenario, step);
        const auto vec = detect::dmrs_extract(rec.rf, cell.v());
        const auto [corr_issb, scores] = detect::correlate_detect(vec, cell, cfg.frame.lmax);
        (void)scores;

        std::optional<int> learner_issb;
        std::optional<bool> crc_feedback;
        if (model) {
            learner_issb = model_detect(*model, vec);
            crc_feedback = phy::pbch_recover(rec.rf, *learner_issb, cell, cfg.frame.lmax).crc_ok;
        }
        const int chosen = detect::selector_step(state, corr_issb, learner_issb, crc_feedback);

        SelectorStepRecord r;
        r.step = step;
        r.learner_active = state.active == detect::ActiveDetector::learner;
        if (r.learner_active && !result.switch_step) result.switch_step = step;
        r.true_issb = issb;
        r.chosen_issb = chosen;
        r.correct = chosen == issb;
        if (r.correct) ++n_correct;
        r.cumulative_accuracy = static_cast<double>(n_correct) / static_cast<double>(step + 1);
        result.steps.push_back(r);
    }
    return result;
}

struct IqCaptureStats {
    size_t periods = 0;
    size_t detections = 0;
    size_t crc_labeled = 0;
};

/// Full receive chain over a recorded IQ buffer, one cell search per SSB
/// period: PSS/SSS search, PCI recovery, feature extraction, and CRC-gated
/// labeling of the correlation detector's SSB index hypothesis.
inline std::vector<detect::DmrsFeatureVector> capture_from_iq(const phy::IqBuffer& buf,
                                                              const phy::FrameConfig& frame,
                                                              IqCaptureStats* stats = nullptr) {
    std::vector<detect::DmrsFeatureVector> out;
    IqCaptureStats st;
    const size_t period = frame.period_samples();
    const size_t span = static_cast<size_t>(phy::kSsbSymbols) * frame.symbol_len();
    for (size_t start = 0; start + span <= buf.samples.size(); start += period) {
        ++st.periods;
        phy::IqBuffer chunk;
        chunk.sample_rate = buf.sample_rate;
        chunk.origin = buf.origin;
        const size_t end = std::min(buf.samples.size(), start + period);
        chunk.samples.assign(buf.samples.begin() + start, buf.samples.begin() + end);
        if (chunk.samples.size() < span) break;

        const auto pss = detect::pss_search(chunk, frame);
        if (!pss) continue;
        ++st.detections;
        const auto [nid1, sss_metric] = detect::sss_detect(chunk, pss->n_ssb, pss->nid2, frame);
        (void)sss_metric;
        const auto cell = seq::pci_compose(nid1, pss->nid2);
        const auto rf = phy::ofdm_demodulate(chunk, pss->n_ssb, frame);
        auto vec = detect::dmrs_extract(rf, cell.v());
        vec.source = detect::FeatureSource::capture;
        const auto [issb, scores] = detect::correlate_detect(vec, cell, frame.lmax);
        (void)scores;
        if (phy::pbch_recover(rf, issb, cell, frame.lmax).crc_ok) {
            vec.label = issb; // CRC-verified correlation hypothesis
            ++st.crc_labeled;
        }
        out.push_back(std::move(vec));
    }
    if (stats) *stats = st;
    return out;
}

inline std::string selector_csv(const SelectorSimResult& result) {
    std::ostringstream os;
    os << "step,active,true_issb,chosen_issb,correct,cumulative_accuracy\n";
    os << std::setprecision(10);
    for (const auto& r : result.steps) {
        os << r.step << ',' << (r.learner_active ? "learner" : "correlation") << ',' << r.true_issb
           << ',' << r.chosen_issb << ',' << (r.correct ? 1 : 0) << ',' << r.cumulative_accuracy
           << '\n';
    }
    return os.str();
}

} // namespace nrssb::bench
